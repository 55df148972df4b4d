#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pdqp/rng.hpp"

namespace pdqp {

using Label = std::vector<std::uint32_t>;
using Amplitude = std::complex<double>;

inline constexpr double kNormTolerance = 1e-9;
inline constexpr double kPruneThreshold = 1e-12;

/// Ordered register dimensions. Registers are q-ary in the protocol and
/// binary in the demo circuits; the ambient label space is the product of
/// the dimensions but states only ever store their support.
struct RegisterLayout {
    std::vector<std::uint32_t> dims;

    explicit RegisterLayout(std::vector<std::uint32_t> d);

    std::size_t register_count() const { return dims.size(); }
    bool contains(const Label& label) const;

    bool operator==(const RegisterLayout&) const = default;
};

enum class MeasurementKind { collapsing, non_collapsing };

struct MeasurementRecord {
    MeasurementKind kind;
    std::vector<std::size_t> registers;
    Label outcome;
    std::uint64_t step = 0;
};

/// Pure state over a register tuple, stored as a sorted map from basis
/// labels to complex amplitudes. Every mutating operation renormalizes or
/// verifies the norm to within 1e-9 and prunes amplitudes below 1e-12.
///
/// States are values: copy one to branch a run. Operations that consume
/// randomness take the generator explicitly.
class SparseState {
public:
    /// Normalized state with exactly the given support.
    static SparseState prepare(RegisterLayout layout,
                               const std::vector<std::pair<Label, Amplitude>>& support);

    const RegisterLayout& layout() const { return layout_; }
    const std::map<Label, Amplitude>& amplitudes() const { return amps_; }
    std::size_t support_size() const { return amps_.size(); }
    Amplitude amplitude(const Label& label) const;

    /// Extends every support label with zero-initialized registers.
    void append_blank_registers(const std::vector<std::uint32_t>& dims);

    /// Reversible write of h(input labels) into a blank target register:
    /// |u>|0> -> |u>|h(u)>. Amplitudes are untouched.
    void apply_classical_map(const std::vector<std::size_t>& inputs, std::size_t target,
                             const std::function<std::uint32_t(const Label&)>& h);

    /// Dense unitary over the targets' joint label space, row-major,
    /// dimension = product of target dims. Verifies U U^dagger = I to 1e-9
    /// entrywise (O(d^3): intended for small joint dimensions).
    void apply_unitary(const std::vector<std::size_t>& targets,
                       const std::vector<Amplitude>& matrix);

    /// Diagonal unitary that negates the amplitude of joint target labels
    /// accepted by the predicate. Unitary by construction.
    void apply_phase_flip(const std::vector<std::size_t>& targets,
                          const std::function<bool(const Label&)>& flip);

    /// Reflection 2|s><s| - I about the uniform vector over the targets'
    /// joint label space, applied in closed form. Equals the dense
    /// Grover-diffusion matrix without materializing it.
    void apply_reflection_about_uniform(const std::vector<std::size_t>& targets);

    /// Exact Born distribution of a computational-basis measurement of the
    /// given registers (marginal over the rest).
    std::map<Label, double> distribution(const std::vector<std::size_t>& registers) const;

    /// Ordinary projective measurement: samples an outcome, keeps the
    /// consistent support, renormalizes.
    std::pair<Label, MeasurementRecord> measure_collapsing(
        const std::vector<std::size_t>& registers, Rng& rng);

    /// Non-collapsing measurement: an independent sample from the same
    /// distribution; the state is bit-identical afterwards.
    std::pair<Label, MeasurementRecord> sample_noncollapsing(
        const std::vector<std::size_t>& registers, Rng& rng) const;

    /// Batch of independent non-collapsing samples. Yields exactly the same
    /// outcome sequence as `count` successive single-sample calls on the
    /// same generator; the marginal is just computed once.
    std::vector<Label> sample_noncollapsing_many(const std::vector<std::size_t>& registers,
                                                 std::size_t count, Rng& rng) const;

    /// Sorted (label, re-bits, im-bits) dump; equality of two dumps is
    /// bit-identity of the states.
    std::string debug_serialize() const;

private:
    SparseState(RegisterLayout layout, std::map<Label, Amplitude> amps);

    void check_registers(const std::vector<std::size_t>& registers) const;
    void normalize_and_prune();
    void verify_normalized() const;

    RegisterLayout layout_;
    std::map<Label, Amplitude> amps_;
};

/// Shared sampling primitive: draws an outcome from an explicit
/// finite distribution (masses need not be exactly normalized).
const Label& sample_outcome(const std::map<Label, double>& masses, Rng& rng);

Label project_label(const Label& label, const std::vector<std::size_t>& registers);

} // namespace pdqp
