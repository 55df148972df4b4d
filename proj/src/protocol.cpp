#include "pdqp/protocol.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace pdqp {

namespace {

void check_input_bits(const std::vector<std::uint8_t>& x, int n) {
    if (x.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("protocol input has length " + std::to_string(x.size()) +
                                    ", expected " + std::to_string(n));
    }
    for (auto b : x) {
        if (b > 1) throw std::invalid_argument("protocol input must be bits");
    }
}

FieldVector bits_as_field_vector(const std::vector<std::uint8_t>& x, const PrimeField& field) {
    FieldVector out;
    out.reserve(x.size());
    for (auto b : x) out.emplace_back(b, field);
    return out;
}

std::vector<std::size_t> index_range(std::size_t first, std::size_t count) {
    std::vector<std::size_t> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = first + i;
    return out;
}

bool all_zero(const Label& label) {
    for (auto v : label) {
        if (v != 0) return false;
    }
    return true;
}

/// Enumerates z in F^n in ascending label order, pairing each with g(z).
std::vector<std::pair<Label, Amplitude>> advice_support(const MultilinearExtension& g) {
    const int n = g.function().arity();
    const std::uint32_t q = g.field().order();
    std::uint64_t total = 1;
    for (int i = 0; i < n; ++i) total *= q;
    std::vector<std::pair<Label, Amplitude>> support;
    support.reserve(total);
    Label z(static_cast<std::size_t>(n) + 1, 0);
    FieldVector point(static_cast<std::size_t>(n), FieldElement(0, g.field()));
    for (std::uint64_t counter = 0;; ++counter) {
        for (int i = 0; i < n; ++i) point[static_cast<std::size_t>(i)] = FieldElement(z[static_cast<std::size_t>(i)], g.field());
        z[static_cast<std::size_t>(n)] = g.eval(point).value();
        support.emplace_back(z, Amplitude(1.0, 0.0));
        z[static_cast<std::size_t>(n)] = 0;
        // odometer increment over the first n coordinates
        int i = n - 1;
        while (i >= 0 && ++z[static_cast<std::size_t>(i)] == q) {
            z[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
    }
    return support;
}

} // namespace

AdviceState::AdviceState(BooleanFunction f, PrimeField field, AdviceForm form,
                         std::optional<SparseState> state)
    : f_(std::move(f)), field_(field), form_(form), state_(std::move(state)) {}

AdviceState AdviceState::build(const BooleanFunction& f, AdviceForm form) {
    const PrimeField field = PrimeField::for_input_length(f.arity());
    if (form == AdviceForm::analytic) {
        return AdviceState(f, field, form, std::nullopt);
    }
    const std::uint32_t q = field.order();
    std::uint64_t total = 1;
    for (int i = 0; i < f.arity(); ++i) {
        total *= q;
        if (total > kMaxMaterializedSupport) {
            throw std::invalid_argument(
                "advice support q^n exceeds the desk-scale bound; use AdviceForm::analytic");
        }
    }
    const MultilinearExtension g(f, field);
    RegisterLayout layout(std::vector<std::uint32_t>(static_cast<std::size_t>(f.arity()) + 1, q));
    SparseState state = SparseState::prepare(std::move(layout), advice_support(g));
    return AdviceState(f, field, form, std::move(state));
}

int AdviceState::qubit_cost() const { return advice_qubit_cost(f_.arity()); }

const SparseState& AdviceState::state() const {
    if (!state_) {
        throw std::logic_error("analytic advice has no materialized state");
    }
    return *state_;
}

int advice_qubit_cost(int n) {
    const std::uint32_t q = select_prime(n);
    return (n + 1) * std::bit_width(q - 1);
}

CouponTimeout::CouponTimeout(ProtocolTranscript partial)
    : std::runtime_error("coupon collection hit the sample cap with " +
                         std::to_string(partial.q - 1 - partial.coupons.size()) +
                         " line values missing"),
      partial_(std::move(partial)) {}

TryTimeout::TryTimeout(std::uint64_t tries)
    : std::runtime_error("no success within " + std::to_string(tries) + " preparations"),
      tries_(tries) {}

std::uint64_t default_sample_cap(std::uint32_t q) {
    if (q < 3) throw std::invalid_argument("default_sample_cap: q must be >= 3");
    const double m = static_cast<double>(q - 1);
    return static_cast<std::uint64_t>(std::ceil(m * (std::log(m) + std::log(100.0))));
}

double expected_coupon_samples(std::uint32_t q) {
    if (q < 3) throw std::invalid_argument("expected_coupon_samples: q must be >= 3");
    double harmonic = 0.0;
    for (std::uint32_t k = 1; k <= q - 1; ++k) harmonic += 1.0 / k;
    return static_cast<double>(q - 1) * harmonic;
}

namespace {

/// Recovers the line location j from a sampled point w = x + j*y, reading
/// the first coordinate where y is nonzero, and checks the whole label is
/// consistent. Inconsistency cannot arise from a healthy simulator.
std::uint32_t line_location_of_sample(const Label& sampled_point, const FieldVector& x,
                                      const FieldVector& y) {
    const PrimeField field = x.front().field();
    FieldVector w;
    w.reserve(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) w.emplace_back(sampled_point[i], field);
    std::optional<FieldElement> location;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!y[i].is_zero()) {
            location = (w[i] - x[i]) * y[i].inverse();
            break;
        }
    }
    if (!location) {
        throw std::logic_error("line sample on a zero direction");
    }
    if (!(x + *location * y == w)) {
        throw std::logic_error("sampled label is off the measured line: simulator corruption");
    }
    if (location->is_zero()) {
        throw std::logic_error("sampled label equals x on the generic branch");
    }
    return location->value();
}

int bit_answer(std::uint32_t value, const char* stage) {
    if (value > 1) {
        throw std::logic_error(std::string(stage) + " produced a non-Boolean answer");
    }
    return static_cast<int>(value);
}

} // namespace

void collect_line_values_with(const SampleDraw& draw, const FieldVector& x, const FieldVector& y,
                              std::uint64_t sample_cap, Rng& rng,
                              ProtocolTranscript& transcript) {
    const std::uint32_t q = x.front().order();
    const std::size_t n = x.size();
    while (transcript.coupons.size() < q - 1 && transcript.samples_used < sample_cap) {
        auto [outcome, record] = draw(rng);
        ++transcript.samples_used;
        record.step = transcript.samples.size();
        transcript.samples.push_back(record);
        Label point(outcome.begin(), outcome.begin() + static_cast<std::ptrdiff_t>(n));
        const std::uint32_t location = line_location_of_sample(point, x, y);
        const std::uint32_t value = outcome[n];
        auto [it, inserted] = transcript.coupons.emplace(location, value);
        if (!inserted && it->second != value) {
            throw std::logic_error("conflicting line values sampled: simulator corruption");
        }
    }
    if (transcript.coupons.size() < q - 1) {
        throw CouponTimeout(transcript);
    }
    const PrimeField field(q);
    std::vector<LineSamplePoint> points;
    points.reserve(transcript.coupons.size());
    for (const auto& [location, value] : transcript.coupons) {
        points.push_back({FieldElement(location, field), FieldElement(value, field)});
    }
    const FieldElement at_zero = interpolate_at_zero(points, static_cast<int>(n));
    transcript.answer = bit_answer(at_zero.value(), "interpolation");
}

void collect_line_values(const SparseState& reduced, const FieldVector& x, const FieldVector& y,
                         std::uint64_t sample_cap, Rng& rng, ProtocolTranscript& transcript) {
    const std::vector<std::size_t> point_and_value = index_range(0, x.size() + 1);
    collect_line_values_with(
        [&](Rng& r) { return reduced.sample_noncollapsing(point_and_value, r); }, x, y,
        sample_cap, rng, transcript);
}

ProtocolTranscript run_protocol(const AdviceState& advice, const std::vector<std::uint8_t>& x,
                                Rng& rng, std::uint64_t sample_cap) {
    const int n = advice.input_length();
    check_input_bits(x, n);
    const PrimeField field = advice.field();
    const std::uint32_t q = field.order();
    const FieldVector x_vec = bits_as_field_vector(x, field);
    const std::size_t un = static_cast<std::size_t>(n);

    ProtocolTranscript transcript;
    transcript.mode = ProtocolMode::quantum;
    transcript.n = n;
    transcript.q = q;
    transcript.input = x;

    SparseState reduced = [&] {
        if (advice.form() == AdviceForm::materialized) {
            SparseState state = advice.state();
            state.append_blank_registers(std::vector<std::uint32_t>(un, q));
            const auto point_regs = index_range(0, un);
            for (std::size_t i = 0; i < un; ++i) {
                state.apply_classical_map(point_regs, un + 1 + i, [&](const Label& z) {
                    return ray_canonical(make_vector(z, field) - x_vec)[i].value();
                });
            }
            auto [ray, record] = state.measure_collapsing(index_range(un + 1, un), rng);
            transcript.ray_outcome = ray;
            transcript.samples.push_back(record);
            return state;
        }
        // Analytic form: the measured ray label is distributed as the
        // canonical label of z - x with z uniform, so sample it directly
        // and build the reduced line state it induces.
        Label z_raw(un, 0);
        std::uniform_int_distribution<std::uint32_t> coord(0, q - 1);
        for (auto& c : z_raw) c = coord(rng);
        const FieldVector ray = ray_canonical(make_vector(z_raw, field) - x_vec);
        transcript.ray_outcome = raw_values(ray);
        transcript.samples.push_back(MeasurementRecord{
            MeasurementKind::collapsing, index_range(un + 1, un), transcript.ray_outcome});
        const MultilinearExtension g(advice.function(), field);
        std::vector<std::pair<Label, Amplitude>> support;
        if (all_zero(transcript.ray_outcome)) {
            Label label = raw_values(x_vec);
            label.push_back(g.eval(x_vec).value());
            support.emplace_back(std::move(label), Amplitude(1.0, 0.0));
        } else {
            for (std::uint32_t j = 1; j < q; ++j) {
                const FieldElement loc(j, field);
                Label label = raw_values(x_vec + loc * ray);
                label.push_back(g.eval_line(x_vec, ray, loc).value());
                support.emplace_back(std::move(label), Amplitude(1.0, 0.0));
            }
        }
        RegisterLayout layout(std::vector<std::uint32_t>(un + 1, q));
        return SparseState::prepare(std::move(layout), support);
    }();

    if (all_zero(transcript.ray_outcome)) {
        transcript.branch = ProtocolBranch::zero_ray;
        auto [value, record] = reduced.measure_collapsing({un}, rng);
        record.step = transcript.samples.size();
        transcript.samples.push_back(record);
        transcript.answer = bit_answer(value[0], "zero-ray readout");
        return transcript;
    }

    transcript.branch = ProtocolBranch::generic;
    const FieldVector y_vec = make_vector(transcript.ray_outcome, field);
    collect_line_values(reduced, x_vec, y_vec, sample_cap, rng, transcript);
    return transcript;
}

SparseState build_uniform_function_state(const BooleanFunction& f) {
    const int n = f.arity();
    const std::size_t entries = std::size_t{1} << n;
    std::vector<std::pair<Label, Amplitude>> support;
    support.reserve(entries);
    for (std::size_t w = 0; w < entries; ++w) {
        Label label(static_cast<std::size_t>(n) + 1, 0);
        for (int i = 0; i < n; ++i) {
            label[static_cast<std::size_t>(i)] =
                static_cast<std::uint32_t>((w >> (n - 1 - i)) & 1);
        }
        label[static_cast<std::size_t>(n)] = f(w) ? 1 : 0;
        support.emplace_back(std::move(label), Amplitude(1.0, 0.0));
    }
    RegisterLayout layout(std::vector<std::uint32_t>(static_cast<std::size_t>(n) + 1, 2));
    return SparseState::prepare(std::move(layout), support);
}

namespace {

WarmupResult repeat_until_input_seen(const SparseState& advice, const std::vector<std::uint8_t>& x,
                                     Rng& rng, std::uint64_t try_cap) {
    const std::size_t n = x.size();
    if (advice.layout().register_count() != n + 1) {
        throw std::invalid_argument("advice layout does not match the input length");
    }
    if (n > 12) {
        throw std::invalid_argument("2^n preparations are not feasible past n = 12");
    }
    check_input_bits(x, static_cast<int>(n));
    const auto all_regs = index_range(0, n + 1);
    for (std::uint64_t t = 1; t <= try_cap; ++t) {
        SparseState fresh = advice;
        auto [outcome, record] = fresh.measure_collapsing(all_regs, rng);
        bool matches = true;
        for (std::size_t i = 0; i < n; ++i) matches = matches && outcome[i] == x[i];
        if (matches) {
            return WarmupResult{bit_answer(outcome[n], "warmup readout"), t};
        }
    }
    throw TryTimeout(try_cap);
}

} // namespace

WarmupResult pdqexp_eval(const SparseState& advice, const std::vector<std::uint8_t>& x, Rng& rng,
                         std::uint64_t try_cap) {
    return repeat_until_input_seen(advice, x, rng, try_cap);
}

WarmupResult postselect_eval(const SparseState& advice, const std::vector<std::uint8_t>& x,
                             Rng& rng, std::uint64_t try_cap) {
    return repeat_until_input_seen(advice, x, rng, try_cap);
}

} // namespace pdqp
