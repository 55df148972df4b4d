#include "pdqp/demos.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace pdqp {

namespace {

constexpr std::uint64_t kMaxDemoDomain = std::uint64_t{1} << 16;

int checked_log2(std::uint64_t domain_size, const char* who) {
    if (domain_size < 2 || domain_size > kMaxDemoDomain ||
        !std::has_single_bit(domain_size)) {
        throw std::invalid_argument(std::string(who) +
                                    ": domain size must be a power of 2 in [2, 2^16]");
    }
    return std::countr_zero(domain_size);
}

Label encode_bits(std::uint32_t value, int bits) {
    Label out(static_cast<std::size_t>(bits), 0);
    for (int i = 0; i < bits; ++i) {
        out[static_cast<std::size_t>(i)] = (value >> (bits - 1 - i)) & 1;
    }
    return out;
}

std::uint32_t decode_bits(const Label& label) {
    std::uint32_t value = 0;
    for (auto b : label) value = (value << 1) | b;
    return value;
}

std::vector<std::size_t> index_range(std::size_t first, std::size_t count) {
    std::vector<std::size_t> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = first + i;
    return out;
}

} // namespace

TwoToOneFunction::TwoToOneFunction(std::vector<std::uint32_t> table) : table_(std::move(table)) {
    const std::size_t n = table_.size();
    if (n < 2 || n % 2 != 0 || n > kMaxDemoDomain) {
        throw std::invalid_argument("TwoToOneFunction: domain size must be even, in [2, 2^16]");
    }
    std::map<std::uint32_t, std::uint32_t> hits;
    for (auto v : table_) {
        if (v >= n) throw std::invalid_argument("TwoToOneFunction: image out of range");
        ++hits[v];
    }
    if (hits.size() != n / 2) {
        throw std::invalid_argument("TwoToOneFunction: expected exactly N/2 distinct images");
    }
    for (const auto& [image, count] : hits) {
        if (count != 2) {
            throw std::invalid_argument("TwoToOneFunction: every image must have 2 preimages");
        }
    }
}

TwoToOneFunction TwoToOneFunction::floor_half(std::uint32_t domain_size) {
    std::vector<std::uint32_t> table(domain_size);
    for (std::uint32_t x = 0; x < domain_size; ++x) table[x] = x / 2;
    return TwoToOneFunction(std::move(table));
}

TwoToOneFunction TwoToOneFunction::random_pairing(std::uint32_t domain_size, Rng& rng) {
    if (domain_size < 2 || domain_size % 2 != 0) {
        throw std::invalid_argument("random_pairing: domain size must be even and >= 2");
    }
    std::vector<std::uint32_t> order(domain_size);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::uint32_t> images(domain_size);
    std::iota(images.begin(), images.end(), 0);
    std::shuffle(images.begin(), images.end(), rng);
    std::vector<std::uint32_t> table(domain_size);
    for (std::uint32_t pair = 0; pair < domain_size / 2; ++pair) {
        table[order[2 * pair]] = images[pair];
        table[order[2 * pair + 1]] = images[pair];
    }
    return TwoToOneFunction(std::move(table));
}

SampleTimeout::SampleTimeout(std::uint64_t samples)
    : std::runtime_error("second preimage not seen within " + std::to_string(samples) +
                         " samples") {}

MarkedItemNotFound::MarkedItemNotFound(std::uint64_t samples)
    : std::runtime_error("no marked item among " + std::to_string(samples) + " samples") {}

namespace {

SparseState prepare_collision_state(const TwoToOneFunction& f) {
    const std::uint32_t domain = f.domain_size();
    const int bits = std::bit_width(domain - 1);
    const std::size_t ubits = static_cast<std::size_t>(bits);
    std::vector<std::pair<Label, Amplitude>> support;
    support.reserve(domain);
    for (std::uint32_t x = 0; x < domain; ++x) {
        Label label = encode_bits(x, bits);
        const Label value = encode_bits(f(x), bits);
        label.insert(label.end(), value.begin(), value.end());
        support.emplace_back(std::move(label), Amplitude(1.0, 0.0));
    }
    RegisterLayout layout(std::vector<std::uint32_t>(2 * ubits, 2));
    return SparseState::prepare(std::move(layout), support);
}

} // namespace

CollisionInstance::CollisionInstance(TwoToOneFunction f)
    : f_(std::move(f)), state_(prepare_collision_state(f_)) {}

CollisionResult CollisionInstance::run(Rng& rng, std::uint64_t sample_cap) const {
    const std::size_t ubits = state_.layout().register_count() / 2;
    SparseState state = state_;
    state.measure_collapsing(index_range(ubits, ubits), rng);
    if (state.support_size() != 2) {
        throw std::logic_error("collision state should collapse to exactly one preimage pair");
    }

    const auto point_regs = index_range(0, ubits);
    CollisionResult result;
    bool have_first = false;
    for (std::uint64_t s = 0; s < sample_cap; ++s) {
        auto [outcome, record] = state.sample_noncollapsing(point_regs, rng);
        ++result.samples_used;
        const std::uint32_t x = decode_bits(outcome);
        if (!have_first) {
            result.first = x;
            have_first = true;
        } else if (x != result.first) {
            result.second = x;
            if (f_(result.first) != f_(result.second)) {
                throw std::logic_error("collapsed preimages disagree under f");
            }
            return result;
        }
    }
    throw SampleTimeout(result.samples_used);
}

CollisionResult find_collision(const TwoToOneFunction& f, Rng& rng, std::uint64_t sample_cap) {
    return CollisionInstance(f).run(rng, sample_cap);
}

std::uint32_t grover_iterations(std::uint64_t domain_size) {
    if (domain_size == 1) return 0;
    const double root = std::cbrt(static_cast<double>(domain_size));
    return static_cast<std::uint32_t>(std::ceil(root - 1e-9));
}

std::uint32_t grover_sample_budget(std::uint64_t domain_size) {
    return domain_size == 1 ? 1 : 3 * grover_iterations(domain_size);
}

double grover_marked_probability(std::uint64_t domain_size) {
    if (domain_size == 1) return 1.0;
    const double theta = std::asin(1.0 / std::sqrt(static_cast<double>(domain_size)));
    const double s = std::sin((2.0 * grover_iterations(domain_size) + 1.0) * theta);
    return s * s;
}

namespace {

std::uint32_t unique_marked_item(const BooleanFunction& oracle) {
    const std::uint64_t domain = std::uint64_t{1} << oracle.arity();
    std::uint64_t marked_count = 0;
    std::uint32_t marked = 0;
    for (std::uint64_t w = 0; w < domain; ++w) {
        if (oracle(w)) {
            ++marked_count;
            marked = static_cast<std::uint32_t>(w);
        }
    }
    if (marked_count != 1) {
        throw std::invalid_argument("grover: oracle must mark exactly one item");
    }
    return marked;
}

SparseState amplify_marked(const BooleanFunction& oracle, std::uint32_t marked,
                           std::uint32_t iterations) {
    const std::uint64_t domain = std::uint64_t{1} << oracle.arity();
    checked_log2(domain, "grover");
    const int bits = oracle.arity();
    const std::size_t ubits = static_cast<std::size_t>(bits);
    std::vector<std::pair<Label, Amplitude>> support;
    support.reserve(domain);
    for (std::uint64_t w = 0; w < domain; ++w) {
        support.emplace_back(encode_bits(static_cast<std::uint32_t>(w), bits),
                             Amplitude(1.0, 0.0));
    }
    RegisterLayout layout(std::vector<std::uint32_t>(ubits, 2));
    SparseState state = SparseState::prepare(std::move(layout), support);

    const auto all_regs = index_range(0, ubits);
    const Label marked_label = encode_bits(marked, bits);
    for (std::uint32_t t = 0; t < iterations; ++t) {
        state.apply_phase_flip(all_regs, [&](const Label& l) { return l == marked_label; });
        state.apply_reflection_about_uniform(all_regs);
    }
    return state;
}

} // namespace

GroverInstance::GroverInstance(const BooleanFunction& oracle)
    : oracle_(oracle),
      marked_(unique_marked_item(oracle_)),
      iterations_(grover_iterations(std::uint64_t{1} << oracle_.arity())),
      sample_budget_(grover_sample_budget(std::uint64_t{1} << oracle_.arity())),
      state_(amplify_marked(oracle_, marked_, iterations_)),
      marked_probability_(state_.distribution(index_range(
          0, state_.layout().register_count()))[encode_bits(marked_, oracle_.arity())]) {}

GroverResult GroverInstance::run(Rng& rng) const {
    GroverResult result;
    result.iterations = iterations_;
    result.sample_budget = sample_budget_;
    result.marked_probability = marked_probability_;
    const auto all_regs = index_range(0, state_.layout().register_count());
    const auto samples = state_.sample_noncollapsing_many(all_regs, sample_budget_, rng);
    for (const auto& outcome : samples) {
        ++result.samples_used;
        const std::uint32_t x = decode_bits(outcome);
        if (oracle_(x)) {
            result.found = x;
            return result;
        }
    }
    throw MarkedItemNotFound(result.samples_used);
}

GroverResult grover_noncollapsing(const BooleanFunction& oracle, Rng& rng) {
    return GroverInstance(oracle).run(rng);
}

double index_message_bound(std::uint64_t domain_size) {
    const double log_n = std::log2(static_cast<double>(domain_size));
    return 6.0 * log_n * std::max(1.0, std::log2(log_n));
}

IndexResult index_protocol(const IndexInstance& instance, Rng& rng, std::uint64_t sample_cap) {
    const std::uint64_t domain = instance.alice_bits.size();
    const int n = checked_log2(domain, "index_protocol");
    if (instance.bob_index < 1 || instance.bob_index > domain) {
        throw std::invalid_argument("index_protocol: index out of [1, N]");
    }

    const BooleanFunction f(n, instance.alice_bits);
    const std::uint64_t q = select_prime(n);
    std::uint64_t support = 1;
    bool fits = true;
    for (int i = 0; i < n && fits; ++i) {
        support *= q;
        fits = support <= AdviceState::kMaxMaterializedSupport;
    }
    const AdviceState advice =
        AdviceState::build(f, fits ? AdviceForm::materialized : AdviceForm::analytic);

    IndexResult result;
    result.message_qubits = advice.qubit_cost();
    if (result.message_qubits > index_message_bound(domain)) {
        throw std::logic_error("index message exceeds its size bound");
    }
    result.transcript =
        run_protocol(advice, index_to_bits(instance.bob_index - 1, n), rng, sample_cap);
    result.bit = result.transcript.answer;
    return result;
}

} // namespace pdqp
