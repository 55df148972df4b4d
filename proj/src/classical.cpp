#include "pdqp/classical.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pdqp {

DiscreteDistribution::DiscreteDistribution(RegisterLayout layout, std::map<Label, double> masses)
    : layout_(std::move(layout)), masses_(std::move(masses)) {}

DiscreteDistribution DiscreteDistribution::uniform_over(RegisterLayout layout,
                                                        std::vector<Label> support) {
    if (support.empty()) {
        throw std::invalid_argument("uniform_over: empty support");
    }
    const double mass = 1.0 / static_cast<double>(support.size());
    std::map<Label, double> masses;
    for (auto& label : support) {
        if (!layout.contains(label)) {
            throw std::invalid_argument("uniform_over: label out of range");
        }
        masses.emplace_hint(masses.end(), std::move(label), mass);
    }
    if (masses.size() != support.size()) {
        throw std::invalid_argument("uniform_over: duplicate label in support");
    }
    DiscreteDistribution dist(std::move(layout), std::move(masses));
    dist.verify_total();
    return dist;
}

DiscreteDistribution DiscreteDistribution::from_masses(
    RegisterLayout layout, const std::vector<std::pair<Label, double>>& entries) {
    if (entries.empty()) {
        throw std::invalid_argument("from_masses: empty support");
    }
    double total = 0.0;
    std::map<Label, double> masses;
    for (const auto& [label, mass] : entries) {
        if (!layout.contains(label)) {
            throw std::invalid_argument("from_masses: label out of range");
        }
        if (mass < 0.0) {
            throw std::invalid_argument("from_masses: negative mass");
        }
        total += mass;
        if (mass > 0.0) masses.emplace_hint(masses.end(), label, mass);
    }
    if (total <= 0.0) {
        throw std::invalid_argument("from_masses: zero total mass");
    }
    for (auto& [label, mass] : masses) mass /= total;
    DiscreteDistribution dist(std::move(layout), std::move(masses));
    dist.verify_total();
    return dist;
}

double DiscreteDistribution::mass(const Label& label) const {
    auto it = masses_.find(label);
    return it == masses_.end() ? 0.0 : it->second;
}

void DiscreteDistribution::check_registers(const std::vector<std::size_t>& registers) const {
    if (registers.empty()) {
        throw std::invalid_argument("register set must be nonempty");
    }
    for (std::size_t i = 0; i < registers.size(); ++i) {
        if (registers[i] >= layout_.register_count()) {
            throw std::invalid_argument("register index out of range");
        }
        for (std::size_t k = 0; k < i; ++k) {
            if (registers[k] == registers[i]) {
                throw std::invalid_argument("duplicate register index");
            }
        }
    }
}

void DiscreteDistribution::verify_total() const {
    double total = 0.0;
    for (const auto& [label, mass] : masses_) total += mass;
    if (std::abs(total - 1.0) > kNormTolerance) {
        throw std::logic_error("distribution mass drifted beyond tolerance: " +
                               std::to_string(total));
    }
}

void DiscreteDistribution::append_blank_registers(const std::vector<std::uint32_t>& dims) {
    for (auto dim : dims) {
        if (dim < 2) throw std::invalid_argument("append_blank_registers: dimensions must be >= 2");
    }
    std::map<Label, double> next;
    for (const auto& [label, mass] : masses_) {
        Label extended = label;
        extended.insert(extended.end(), dims.size(), 0);
        next.emplace_hint(next.end(), std::move(extended), mass);
    }
    layout_.dims.insert(layout_.dims.end(), dims.begin(), dims.end());
    masses_ = std::move(next);
    verify_total();
}

void DiscreteDistribution::apply_classical_map(
    const std::vector<std::size_t>& inputs, std::size_t target,
    const std::function<std::uint32_t(const Label&)>& h) {
    check_registers(inputs);
    if (target >= layout_.register_count()) {
        throw std::invalid_argument("apply_classical_map: target out of range");
    }
    for (auto r : inputs) {
        if (r == target) throw std::invalid_argument("apply_classical_map: target among inputs");
    }
    const std::uint32_t target_dim = layout_.dims[target];
    std::map<Label, double> next;
    for (const auto& [label, mass] : masses_) {
        if (label[target] != 0) {
            throw std::invalid_argument("apply_classical_map: target register not blank");
        }
        const std::uint32_t out = h(project_label(label, inputs));
        if (out >= target_dim) {
            throw std::invalid_argument("apply_classical_map: map output out of range");
        }
        Label written = label;
        written[target] = out;
        next.emplace_hint(next.end(), std::move(written), mass);
    }
    if (next.size() != masses_.size()) {
        throw std::logic_error("apply_classical_map: support size changed");
    }
    masses_ = std::move(next);
    verify_total();
}

std::map<Label, double> DiscreteDistribution::marginal(
    const std::vector<std::size_t>& registers) const {
    check_registers(registers);
    std::map<Label, double> out;
    for (const auto& [label, mass] : masses_) {
        out[project_label(label, registers)] += mass;
    }
    return out;
}

std::pair<Label, MeasurementRecord> DiscreteDistribution::condition(
    const std::vector<std::size_t>& registers, Rng& rng) {
    const auto dist = marginal(registers);
    Label outcome = sample_outcome(dist, rng);
    double kept = 0.0;
    for (auto it = masses_.begin(); it != masses_.end();) {
        if (project_label(it->first, registers) != outcome) {
            it = masses_.erase(it);
        } else {
            kept += it->second;
            ++it;
        }
    }
    if (kept <= 0.0) {
        throw std::logic_error("condition: conditioning on a null event");
    }
    for (auto& [label, mass] : masses_) mass /= kept;
    verify_total();
    return {outcome, MeasurementRecord{MeasurementKind::collapsing, registers, outcome}};
}

std::pair<Label, MeasurementRecord> DiscreteDistribution::sample(
    const std::vector<std::size_t>& registers, Rng& rng) const {
    const auto dist = marginal(registers);
    Label outcome = sample_outcome(dist, rng);
    MeasurementRecord record{MeasurementKind::non_collapsing, registers, outcome};
    return {std::move(outcome), std::move(record)};
}

std::vector<Label> DiscreteDistribution::sample_many(const std::vector<std::size_t>& registers,
                                                     std::size_t count, Rng& rng) const {
    const auto dist = marginal(registers);
    std::vector<Label> outcomes;
    outcomes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        outcomes.push_back(sample_outcome(dist, rng));
    }
    return outcomes;
}

std::string DiscreteDistribution::debug_serialize() const {
    std::string out;
    char buf[32];
    for (const auto& [label, mass] : masses_) {
        out.push_back('(');
        for (std::size_t i = 0; i < label.size(); ++i) {
            if (i) out.push_back(',');
            out += std::to_string(label[i]);
        }
        std::snprintf(buf, sizeof(buf), ") %016llx\n",
                      static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(mass)));
        out += buf;
    }
    return out;
}

namespace {

std::vector<std::size_t> index_range(std::size_t first, std::size_t count) {
    std::vector<std::size_t> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = first + i;
    return out;
}

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

bool all_zero(const Label& label) {
    for (auto v : label) {
        if (v != 0) return false;
    }
    return true;
}

} // namespace

DiscreteDistribution build_rand_advice(const BooleanFunction& f) {
    const PrimeField field = PrimeField::for_input_length(f.arity());
    const std::uint32_t q = field.order();
    const int n = f.arity();
    std::uint64_t total = 1;
    for (int i = 0; i < n; ++i) {
        total *= q;
        if (total > AdviceState::kMaxMaterializedSupport) {
            throw std::invalid_argument("randomized advice support q^n exceeds the desk-scale bound");
        }
    }
    const MultilinearExtension g(f, field);
    std::vector<Label> support;
    support.reserve(total);
    Label z(static_cast<std::size_t>(n) + 1, 0);
    FieldVector point(static_cast<std::size_t>(n), FieldElement(0, field));
    for (;;) {
        for (int i = 0; i < n; ++i) {
            point[static_cast<std::size_t>(i)] = FieldElement(z[static_cast<std::size_t>(i)], field);
        }
        z[static_cast<std::size_t>(n)] = g.eval(point).value();
        support.push_back(z);
        z[static_cast<std::size_t>(n)] = 0;
        int i = n - 1;
        while (i >= 0 && ++z[static_cast<std::size_t>(i)] == q) {
            z[static_cast<std::size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
    }
    RegisterLayout layout(std::vector<std::uint32_t>(static_cast<std::size_t>(n) + 1, q));
    return DiscreteDistribution::uniform_over(std::move(layout), std::move(support));
}

ProtocolTranscript run_pdpp(const DiscreteDistribution& advice,
                            const std::vector<std::uint8_t>& x, Rng& rng,
                            std::uint64_t sample_cap) {
    const auto& dims = advice.layout().dims;
    if (dims.size() < 2) {
        throw std::invalid_argument("run_pdpp: advice needs point and value registers");
    }
    const std::uint32_t q = dims.front();
    for (auto d : dims) {
        if (d != q) throw std::invalid_argument("run_pdpp: advice registers must share one dimension");
    }
    const int n = static_cast<int>(dims.size()) - 1;
    const std::size_t un = static_cast<std::size_t>(n);
    check_input_bits(x, n);
    const PrimeField field(q);
    const FieldVector x_vec = bits_as_field_vector(x, field);

    ProtocolTranscript transcript;
    transcript.mode = ProtocolMode::classical;
    transcript.n = n;
    transcript.q = q;
    transcript.input = x;

    DiscreteDistribution dist = advice;
    dist.append_blank_registers(std::vector<std::uint32_t>(un, q));
    const auto point_regs = index_range(0, un);
    for (std::size_t i = 0; i < un; ++i) {
        dist.apply_classical_map(point_regs, un + 1 + i, [&](const Label& z) {
            return ray_canonical(make_vector(z, field) - x_vec)[i].value();
        });
    }
    auto [ray, record] = dist.condition(index_range(un + 1, un), rng);
    transcript.ray_outcome = ray;
    transcript.samples.push_back(record);

    if (all_zero(ray)) {
        transcript.branch = ProtocolBranch::zero_ray;
        auto [value, value_record] = dist.condition({un}, rng);
        value_record.step = transcript.samples.size();
        transcript.samples.push_back(value_record);
        if (value[0] > 1) {
            throw std::logic_error("zero-ray readout produced a non-Boolean answer");
        }
        transcript.answer = static_cast<int>(value[0]);
        return transcript;
    }

    transcript.branch = ProtocolBranch::generic;
    const FieldVector y_vec = make_vector(ray, field);
    const auto point_and_value = index_range(0, un + 1);
    collect_line_values_with([&](Rng& r) { return dist.sample(point_and_value, r); }, x_vec,
                             y_vec, sample_cap, rng, transcript);
    return transcript;
}

namespace {

double find_or_zero(const std::map<Label, double>& m, const Label& key) {
    auto it = m.find(key);
    return it == m.end() ? 0.0 : it->second;
}

double max_pointwise_diff(const std::map<Label, double>& a, const std::map<Label, double>& b) {
    double worst = 0.0;
    for (const auto& [label, value] : a) {
        worst = std::max(worst, std::abs(value - find_or_zero(b, label)));
    }
    for (const auto& [label, value] : b) {
        worst = std::max(worst, std::abs(value - find_or_zero(a, label)));
    }
    return worst;
}

} // namespace

LockstepComparison compare_protocol_lockstep(const BooleanFunction& f,
                                             const std::vector<std::uint8_t>& x,
                                             std::uint64_t seed, std::uint64_t sample_cap) {
    const int n = f.arity();
    const std::size_t un = static_cast<std::size_t>(n);
    const AdviceState quantum_advice = AdviceState::build(f);
    const PrimeField field = quantum_advice.field();
    const std::uint32_t q = field.order();
    const FieldVector x_vec = bits_as_field_vector(x, field);

    SparseState state = quantum_advice.state();
    DiscreteDistribution dist = build_rand_advice(f);

    LockstepComparison out;
    auto record_stage = [&](const std::string& name, double diff) {
        out.stages.push_back({name, diff});
        out.max_abs_diff = std::max(out.max_abs_diff, diff);
    };

    record_stage("advice", max_pointwise_diff(state.distribution(index_range(0, un + 1)),
                                              dist.masses()));

    state.append_blank_registers(std::vector<std::uint32_t>(un, q));
    dist.append_blank_registers(std::vector<std::uint32_t>(un, q));
    const auto point_regs = index_range(0, un);
    for (std::size_t i = 0; i < un; ++i) {
        auto ray_coord = [&](const Label& z) {
            return ray_canonical(make_vector(z, field) - x_vec)[i].value();
        };
        state.apply_classical_map(point_regs, un + 1 + i, ray_coord);
        dist.apply_classical_map(point_regs, un + 1 + i, ray_coord);
    }
    record_stage("ray_written", max_pointwise_diff(state.distribution(index_range(0, 2 * un + 1)),
                                                   dist.masses()));
    const auto ray_regs = index_range(un + 1, un);
    record_stage("ray_marginal",
                 max_pointwise_diff(state.distribution(ray_regs), dist.marginal(ray_regs)));

    Rng quantum_rng = make_rng(seed);
    Rng classical_rng = make_rng(seed);
    auto [qray, qrec] = state.measure_collapsing(ray_regs, quantum_rng);
    auto [cray, crec] = dist.condition(ray_regs, classical_rng);
    if (qray != cray) {
        out.outcomes_matched = false;
        return out;
    }
    record_stage("post_collapse", max_pointwise_diff(state.distribution(index_range(0, 2 * un + 1)),
                                                     dist.masses()));

    const auto point_and_value = index_range(0, un + 1);
    if (all_zero(qray)) {
        auto [qvalue, qvrec] = state.measure_collapsing({un}, quantum_rng);
        auto [cvalue, cvrec] = dist.condition({un}, classical_rng);
        out.outcomes_matched = qvalue == cvalue;
        out.quantum_answer = static_cast<int>(qvalue[0]);
        out.classical_answer = static_cast<int>(cvalue[0]);
        return out;
    }

    const FieldVector y_vec = make_vector(qray, field);
    ProtocolTranscript quantum_t;
    quantum_t.n = n;
    quantum_t.q = q;
    ProtocolTranscript classical_t = quantum_t;
    classical_t.mode = ProtocolMode::classical;
    record_stage("line_marginal", max_pointwise_diff(state.distribution(point_and_value),
                                                     dist.marginal(point_and_value)));
    try {
        while (quantum_t.coupons.size() < q - 1) {
            if (quantum_t.samples_used >= sample_cap) {
                out.timed_out = true;
                return out;
            }
            auto [qs, qsr] = state.sample_noncollapsing(point_and_value, quantum_rng);
            auto [cs, csr] = dist.sample(point_and_value, classical_rng);
            ++quantum_t.samples_used;
            ++classical_t.samples_used;
            if (qs != cs) {
                out.outcomes_matched = false;
                return out;
            }
            Label point(qs.begin(), qs.begin() + n);
            FieldVector w = make_vector(point, field);
            std::size_t pivot = 0;
            while (y_vec[pivot].is_zero()) ++pivot;
            const std::uint32_t loc =
                ((w[pivot] - x_vec[pivot]) * y_vec[pivot].inverse()).value();
            quantum_t.coupons.emplace(loc, qs[un]);
            classical_t.coupons.emplace(loc, cs[un]);
        }
    } catch (const CouponTimeout&) {
        out.timed_out = true;
        return out;
    }
    std::vector<LineSamplePoint> points;
    for (const auto& [loc, value] : quantum_t.coupons) {
        points.push_back({FieldElement(loc, field), FieldElement(value, field)});
    }
    out.quantum_answer = static_cast<int>(interpolate_at_zero(points, n).value());
    points.clear();
    for (const auto& [loc, value] : classical_t.coupons) {
        points.push_back({FieldElement(loc, field), FieldElement(value, field)});
    }
    out.classical_answer = static_cast<int>(interpolate_at_zero(points, n).value());
    return out;
}

} // namespace pdqp

