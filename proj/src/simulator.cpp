#include "pdqp/simulator.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace pdqp {

RegisterLayout::RegisterLayout(std::vector<std::uint32_t> d) : dims(std::move(d)) {
    if (dims.empty()) {
        throw std::invalid_argument("RegisterLayout: need at least one register");
    }
    for (auto dim : dims) {
        if (dim < 2) throw std::invalid_argument("RegisterLayout: dimensions must be >= 2");
    }
}

bool RegisterLayout::contains(const Label& label) const {
    if (label.size() != dims.size()) return false;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (label[i] >= dims[i]) return false;
    }
    return true;
}

SparseState::SparseState(RegisterLayout layout, std::map<Label, Amplitude> amps)
    : layout_(std::move(layout)), amps_(std::move(amps)) {}

SparseState SparseState::prepare(RegisterLayout layout,
                                 const std::vector<std::pair<Label, Amplitude>>& support) {
    if (support.empty()) {
        throw std::invalid_argument("prepare: empty support");
    }
    std::map<Label, Amplitude> amps;
    for (const auto& [label, amp] : support) {
        if (!layout.contains(label)) {
            throw std::invalid_argument("prepare: label out of range");
        }
        // end() hint makes bulk construction from pre-sorted support linear
        amps.emplace_hint(amps.end(), label, amp);
    }
    if (amps.size() != support.size()) {
        throw std::invalid_argument("prepare: duplicate label in support");
    }
    SparseState state(std::move(layout), std::move(amps));
    state.normalize_and_prune();
    return state;
}

Amplitude SparseState::amplitude(const Label& label) const {
    auto it = amps_.find(label);
    return it == amps_.end() ? Amplitude(0.0, 0.0) : it->second;
}

void SparseState::check_registers(const std::vector<std::size_t>& registers) const {
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

void SparseState::normalize_and_prune() {
    double total = 0.0;
    for (const auto& [label, amp] : amps_) total += std::norm(amp);
    if (total <= 0.0) {
        throw std::logic_error("state has vanished: zero total probability");
    }
    const double scale = 1.0 / std::sqrt(total);
    for (auto it = amps_.begin(); it != amps_.end();) {
        it->second *= scale;
        if (std::abs(it->second) < kPruneThreshold) {
            it = amps_.erase(it);
        } else {
            ++it;
        }
    }
    verify_normalized();
}

void SparseState::verify_normalized() const {
    double total = 0.0;
    for (const auto& [label, amp] : amps_) total += std::norm(amp);
    if (std::abs(total - 1.0) > kNormTolerance) {
        throw std::logic_error("state norm drifted beyond tolerance: " + std::to_string(total));
    }
}

void SparseState::append_blank_registers(const std::vector<std::uint32_t>& dims) {
    for (auto dim : dims) {
        if (dim < 2) throw std::invalid_argument("append_blank_registers: dimensions must be >= 2");
    }
    std::map<Label, Amplitude> next;
    for (const auto& [label, amp] : amps_) {
        Label extended = label;
        extended.insert(extended.end(), dims.size(), 0);
        next.emplace_hint(next.end(), std::move(extended), amp);
    }
    layout_.dims.insert(layout_.dims.end(), dims.begin(), dims.end());
    amps_ = std::move(next);
    verify_normalized();
}

void SparseState::apply_classical_map(const std::vector<std::size_t>& inputs, std::size_t target,
                                      const std::function<std::uint32_t(const Label&)>& h) {
    check_registers(inputs);
    if (target >= layout_.register_count()) {
        throw std::invalid_argument("apply_classical_map: target out of range");
    }
    for (auto r : inputs) {
        if (r == target) throw std::invalid_argument("apply_classical_map: target among inputs");
    }
    const std::uint32_t target_dim = layout_.dims[target];
    std::map<Label, Amplitude> next;
    for (const auto& [label, amp] : amps_) {
        if (label[target] != 0) {
            throw std::invalid_argument("apply_classical_map: target register not blank");
        }
        const std::uint32_t out = h(project_label(label, inputs));
        if (out >= target_dim) {
            throw std::invalid_argument("apply_classical_map: map output out of range");
        }
        Label written = label;
        written[target] = out;
        next.emplace_hint(next.end(), std::move(written), amp);
    }
    // writing a function of other registers cannot merge basis states
    if (next.size() != amps_.size()) {
        throw std::logic_error("apply_classical_map: support size changed");
    }
    amps_ = std::move(next);
    verify_normalized();
}

namespace {

std::uint64_t joint_dimension(const RegisterLayout& layout,
                              const std::vector<std::size_t>& targets) {
    std::uint64_t dim = 1;
    for (auto t : targets) {
        dim *= layout.dims[t];
        if (dim > (std::uint64_t{1} << 32)) {
            throw std::invalid_argument("joint target dimension too large");
        }
    }
    return dim;
}

std::uint64_t joint_index(const Label& label, const std::vector<std::size_t>& targets,
                          const RegisterLayout& layout) {
    std::uint64_t idx = 0;
    for (auto t : targets) {
        idx = idx * layout.dims[t] + label[t];
    }
    return idx;
}

void write_joint_index(Label& label, std::uint64_t idx, const std::vector<std::size_t>& targets,
                       const RegisterLayout& layout) {
    for (auto it = targets.rbegin(); it != targets.rend(); ++it) {
        const std::uint32_t dim = layout.dims[*it];
        label[*it] = static_cast<std::uint32_t>(idx % dim);
        idx /= dim;
    }
}

void verify_unitary(const std::vector<Amplitude>& matrix, std::uint64_t dim) {
    if (matrix.size() != dim * dim) {
        throw std::invalid_argument("apply_unitary: matrix size does not match joint dimension");
    }
    for (std::uint64_t r = 0; r < dim; ++r) {
        for (std::uint64_t c = 0; c < dim; ++c) {
            Amplitude acc(0.0, 0.0);
            for (std::uint64_t k = 0; k < dim; ++k) {
                acc += matrix[r * dim + k] * std::conj(matrix[c * dim + k]);
            }
            const Amplitude expected = r == c ? Amplitude(1.0, 0.0) : Amplitude(0.0, 0.0);
            if (std::abs(acc - expected) > kNormTolerance) {
                throw std::invalid_argument("apply_unitary: matrix is not unitary");
            }
        }
    }
}

/// Groups the support by the non-target part of the label and hands each
/// group's local dense vector to `transform`.
template <typename Fn>
void transform_target_blocks(std::map<Label, Amplitude>& amps, const RegisterLayout& layout,
                             const std::vector<std::size_t>& targets, std::uint64_t dim,
                             Fn&& transform) {
    std::map<Label, std::vector<Amplitude>> blocks;
    std::vector<std::size_t> rest;
    for (std::size_t r = 0; r < layout.register_count(); ++r) {
        bool is_target = false;
        for (auto t : targets) is_target = is_target || t == r;
        if (!is_target) rest.push_back(r);
    }
    for (const auto& [label, amp] : amps) {
        const Label key = project_label(label, rest);
        auto [it, inserted] = blocks.try_emplace(key);
        if (inserted) it->second.assign(dim, Amplitude(0.0, 0.0));
        it->second[joint_index(label, targets, layout)] = amp;
    }
    std::map<Label, Amplitude> next;
    Label scratch(layout.register_count(), 0);
    for (auto& [key, local] : blocks) {
        transform(local);
        for (std::size_t i = 0; i < rest.size(); ++i) scratch[rest[i]] = key[i];
        for (std::uint64_t idx = 0; idx < dim; ++idx) {
            if (std::abs(local[idx]) < kPruneThreshold) continue;
            write_joint_index(scratch, idx, targets, layout);
            next.emplace(scratch, local[idx]);
        }
    }
    amps = std::move(next);
}

} // namespace

void SparseState::apply_unitary(const std::vector<std::size_t>& targets,
                                const std::vector<Amplitude>& matrix) {
    check_registers(targets);
    const std::uint64_t dim = joint_dimension(layout_, targets);
    verify_unitary(matrix, dim);
    transform_target_blocks(amps_, layout_, targets, dim,
                            [&](std::vector<Amplitude>& local) {
                                std::vector<Amplitude> out(dim, Amplitude(0.0, 0.0));
                                for (std::uint64_t r = 0; r < dim; ++r) {
                                    Amplitude acc(0.0, 0.0);
                                    for (std::uint64_t c = 0; c < dim; ++c) {
                                        acc += matrix[r * dim + c] * local[c];
                                    }
                                    out[r] = acc;
                                }
                                local = std::move(out);
                            });
    verify_normalized();
}

void SparseState::apply_phase_flip(const std::vector<std::size_t>& targets,
                                   const std::function<bool(const Label&)>& flip) {
    check_registers(targets);
    for (auto& [label, amp] : amps_) {
        if (flip(project_label(label, targets))) amp = -amp;
    }
    verify_normalized();
}

void SparseState::apply_reflection_about_uniform(const std::vector<std::size_t>& targets) {
    check_registers(targets);
    const std::uint64_t dim = joint_dimension(layout_, targets);
    transform_target_blocks(amps_, layout_, targets, dim,
                            [&](std::vector<Amplitude>& local) {
                                Amplitude sum(0.0, 0.0);
                                for (const auto& a : local) sum += a;
                                const Amplitude mean2 = sum * (2.0 / static_cast<double>(dim));
                                for (auto& a : local) a = mean2 - a;
                            });
    verify_normalized();
}

std::map<Label, double> SparseState::distribution(const std::vector<std::size_t>& registers) const {
    check_registers(registers);
    std::map<Label, double> dist;
    for (const auto& [label, amp] : amps_) {
        dist[project_label(label, registers)] += std::norm(amp);
    }
    return dist;
}

const Label& sample_outcome(const std::map<Label, double>& masses, Rng& rng) {
    if (masses.empty()) {
        throw std::logic_error("sample_outcome: empty distribution");
    }
    double total = 0.0;
    for (const auto& [label, mass] : masses) total += mass;
    const double u = uniform_unit(rng) * total;
    double cum = 0.0;
    const Label* last = nullptr;
    for (const auto& [label, mass] : masses) {
        cum += mass;
        last = &label;
        if (u < cum) return label;
    }
    return *last;
}

std::pair<Label, MeasurementRecord> SparseState::measure_collapsing(
    const std::vector<std::size_t>& registers, Rng& rng) {
    const auto dist = distribution(registers);
    Label outcome = sample_outcome(dist, rng);
    for (auto it = amps_.begin(); it != amps_.end();) {
        if (project_label(it->first, registers) != outcome) {
            it = amps_.erase(it);
        } else {
            ++it;
        }
    }
    normalize_and_prune();
    return {outcome, MeasurementRecord{MeasurementKind::collapsing, registers, outcome}};
}

std::pair<Label, MeasurementRecord> SparseState::sample_noncollapsing(
    const std::vector<std::size_t>& registers, Rng& rng) const {
    const auto dist = distribution(registers);
    Label outcome = sample_outcome(dist, rng);
    MeasurementRecord record{MeasurementKind::non_collapsing, registers, outcome};
    return {std::move(outcome), std::move(record)};
}

std::vector<Label> SparseState::sample_noncollapsing_many(
    const std::vector<std::size_t>& registers, std::size_t count, Rng& rng) const {
    const auto dist = distribution(registers);
    std::vector<Label> outcomes;
    outcomes.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        outcomes.push_back(sample_outcome(dist, rng));
    }
    return outcomes;
}

std::string SparseState::debug_serialize() const {
    std::string out;
    char buf[64];
    for (const auto& [label, amp] : amps_) {
        out.push_back('(');
        for (std::size_t i = 0; i < label.size(); ++i) {
            if (i) out.push_back(',');
            out += std::to_string(label[i]);
        }
        std::snprintf(buf, sizeof(buf), ") %016llx %016llx\n",
                      static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(amp.real())),
                      static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(amp.imag())));
        out += buf;
    }
    return out;
}

Label project_label(const Label& label, const std::vector<std::size_t>& registers) {
    Label out;
    out.reserve(registers.size());
    for (auto r : registers) out.push_back(label[r]);
    return out;
}

} // namespace pdqp
