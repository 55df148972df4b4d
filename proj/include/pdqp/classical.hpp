#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pdqp/polynomials.hpp"
#include "pdqp/protocol.hpp"
#include "pdqp/rng.hpp"
#include "pdqp/simulator.hpp"

namespace pdqp {

/// Explicit probability mass function over a register tuple: the classical
/// counterpart of SparseState. `condition` plays the role of a collapsing
/// measurement, `sample` of a non-collapsing one.
class DiscreteDistribution {
public:
    static DiscreteDistribution uniform_over(RegisterLayout layout, std::vector<Label> support);
    static DiscreteDistribution from_masses(RegisterLayout layout,
                                            const std::vector<std::pair<Label, double>>& masses);

    const RegisterLayout& layout() const { return layout_; }
    const std::map<Label, double>& masses() const { return masses_; }
    std::size_t support_size() const { return masses_.size(); }
    double mass(const Label& label) const;

    void append_blank_registers(const std::vector<std::uint32_t>& dims);

    /// |u>|0> -> |u>|h(u)> on masses; the deterministic-write analogue.
    void apply_classical_map(const std::vector<std::size_t>& inputs, std::size_t target,
                             const std::function<std::uint32_t(const Label&)>& h);

    std::map<Label, double> marginal(const std::vector<std::size_t>& registers) const;

    /// Samples an outcome and renormalizes onto its fiber.
    std::pair<Label, MeasurementRecord> condition(const std::vector<std::size_t>& registers,
                                                  Rng& rng);

    /// Independent sample; the distribution is untouched.
    std::pair<Label, MeasurementRecord> sample(const std::vector<std::size_t>& registers,
                                               Rng& rng) const;

    std::vector<Label> sample_many(const std::vector<std::size_t>& registers, std::size_t count,
                                   Rng& rng) const;

    std::string debug_serialize() const;

private:
    DiscreteDistribution(RegisterLayout layout, std::map<Label, double> masses);

    void check_registers(const std::vector<std::size_t>& registers) const;
    void verify_total() const;

    RegisterLayout layout_;
    std::map<Label, double> masses_;
};

/// Randomized advice: the uniform distribution over (z, g(z)), the mass
/// function the quantum advice state induces in the computational basis.
DiscreteDistribution build_rand_advice(const BooleanFunction& f);

/// The line protocol run on randomized advice, step for step the quantum
/// run with condition/sample in place of the two measurement kinds.
ProtocolTranscript run_pdpp(const DiscreteDistribution& advice,
                            const std::vector<std::uint8_t>& x, Rng& rng,
                            std::uint64_t sample_cap);

/// Runs the quantum and classical protocols in lockstep on one seed and
/// compares the quantum Born distribution with the classical mass function
/// at every stage. The protocol creates no interference, so the two should
/// agree to rounding error.
struct StageComparison {
    std::string stage;
    double max_abs_diff = 0.0;
};

struct LockstepComparison {
    std::vector<StageComparison> stages;
    bool outcomes_matched = true;
    bool timed_out = false;
    double max_abs_diff = 0.0;
    int quantum_answer = -1;
    int classical_answer = -1;
};

LockstepComparison compare_protocol_lockstep(const BooleanFunction& f,
                                             const std::vector<std::uint8_t>& x,
                                             std::uint64_t seed, std::uint64_t sample_cap);

} // namespace pdqp
