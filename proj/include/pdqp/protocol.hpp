#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pdqp/field.hpp"
#include "pdqp/polynomials.hpp"
#include "pdqp/rng.hpp"
#include "pdqp/simulator.hpp"

namespace pdqp {

/// A materialized advice state stores all q^n support terms and is simulated
/// register by register. The analytic form keeps the same advice implicit
/// and samples the ray-measurement outcome from its exact distribution (the
/// measured ray is the canonical label of z - x for z uniform), then builds
/// only the q-1 term reduced state. Identical outcome law, no q^n blowup.
enum class AdviceForm { materialized, analytic };

/// Uniform superposition over (z, g(z)) for z in F_q^n, with g the
/// multilinear extension of f. Layout: n value-q registers for z, one for
/// g(z). The Boolean function is retained for harness verification only;
/// the protocol decoder never reads it.
class AdviceState {
public:
    static AdviceState build(const BooleanFunction& f, AdviceForm form = AdviceForm::materialized);

    /// Largest explicit support the materialized form will allocate.
    static constexpr std::uint64_t kMaxMaterializedSupport = std::uint64_t{1} << 22;

    int input_length() const { return f_.arity(); }
    const PrimeField& field() const { return field_; }
    AdviceForm form() const { return form_; }

    /// (n+1) * ceil(log2 q) qubits to hold n+1 value-q registers.
    int qubit_cost() const;

    const SparseState& state() const;
    const BooleanFunction& function() const { return f_; }

private:
    AdviceState(BooleanFunction f, PrimeField field, AdviceForm form,
                std::optional<SparseState> state);

    BooleanFunction f_;
    PrimeField field_;
    AdviceForm form_;
    std::optional<SparseState> state_;
};

int advice_qubit_cost(int n);

enum class ProtocolBranch { zero_ray, generic };
enum class ProtocolMode { quantum, classical };

struct ProtocolTranscript {
    ProtocolMode mode = ProtocolMode::quantum;
    int n = 0;
    std::uint32_t q = 0;
    std::vector<std::uint8_t> input;
    ProtocolBranch branch = ProtocolBranch::generic;
    std::vector<std::uint32_t> ray_outcome;
    std::vector<MeasurementRecord> samples;
    std::map<std::uint32_t, std::uint32_t> coupons; // j -> p(j)
    int answer = -1;
    std::uint64_t samples_used = 0;
};

/// The sample cap was reached with line values still missing. Carries the
/// partial transcript so the harness can log the failed run.
class CouponTimeout : public std::runtime_error {
public:
    explicit CouponTimeout(ProtocolTranscript partial);
    const ProtocolTranscript& partial() const { return partial_; }

private:
    ProtocolTranscript partial_;
};

class TryTimeout : public std::runtime_error {
public:
    explicit TryTimeout(std::uint64_t tries);
    std::uint64_t tries() const { return tries_; }

private:
    std::uint64_t tries_;
};

/// Cap making the per-run timeout probability at most 1% by a union bound:
/// ceil((q-1) * (ln(q-1) + ln 100)).
std::uint64_t default_sample_cap(std::uint32_t q);

/// Exact coupon-collector expectation (q-1) * H_{q-1} for collecting all
/// q-1 line values under uniform sampling.
double expected_coupon_samples(std::uint32_t q);

/// One full run: write the ray of z - x into fresh ancillas, measure it
/// collapsingly, then either read the value register (zero ray) or collect
/// all q-1 line values by non-collapsing sampling and interpolate at 0.
/// A completed transcript always has answer == f(x).
ProtocolTranscript run_protocol(const AdviceState& advice, const std::vector<std::uint8_t>& x,
                                Rng& rng, std::uint64_t sample_cap);

/// Coupon-collection core on an already reduced line state (registers
/// 0..n-1 hold the point, register n the value). Exposed so sampling
/// statistics can be driven at field sizes whose full advice state would
/// not fit in memory.
void collect_line_values(const SparseState& reduced, const FieldVector& x, const FieldVector& y,
                         std::uint64_t sample_cap, Rng& rng, ProtocolTranscript& transcript);

/// Draw-agnostic version of the coupon loop, shared with the de-quantized
/// run: `draw` must produce one joint (point, value) sample per call.
using SampleDraw = std::function<std::pair<Label, MeasurementRecord>(Rng&)>;
void collect_line_values_with(const SampleDraw& draw, const FieldVector& x, const FieldVector& y,
                              std::uint64_t sample_cap, Rng& rng,
                              ProtocolTranscript& transcript);

/// The uniform state over (z, f(z)) for Boolean z: n+1 binary registers.
SparseState build_uniform_function_state(const BooleanFunction& f);

struct WarmupResult {
    int answer = -1;
    std::uint64_t preparations = 0;
};

/// Prepares fresh copies of the uniform (z, f(z)) state and measures
/// collapsingly until the point register reads x; expected 2^n tries.
WarmupResult pdqexp_eval(const SparseState& advice, const std::vector<std::uint8_t>& x, Rng& rng,
                         std::uint64_t try_cap);

/// Postselection on z = x realized by rejection sampling; runtime behavior
/// identical to pdqexp_eval, kept as its own entry point.
WarmupResult postselect_eval(const SparseState& advice, const std::vector<std::uint8_t>& x,
                             Rng& rng, std::uint64_t try_cap);

} // namespace pdqp
