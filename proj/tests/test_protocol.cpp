#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include "oracles.hpp"
#include "pdqp/protocol.hpp"

using namespace pdqp;

namespace {

BooleanFunction function_by_code(int n, std::uint32_t code) {
    std::vector<std::uint8_t> table(std::size_t{1} << n);
    for (std::size_t i = 0; i < table.size(); ++i) {
        table[i] = static_cast<std::uint8_t>((code >> (table.size() - 1 - i)) & 1);
    }
    return BooleanFunction(n, table);
}

/// Replays the advice + ray-writing + ray-collapse stages through the public
/// simulator ops, returning the measured ray and the collapsed state.
std::pair<Label, SparseState> collapse_ray_stage(const AdviceState& advice,
                                                 const std::vector<std::uint8_t>& x, Rng& rng) {
    const PrimeField field = advice.field();
    const std::uint32_t q = field.order();
    const std::size_t n = x.size();
    FieldVector x_vec;
    for (auto b : x) x_vec.emplace_back(b, field);
    SparseState state = advice.state();
    state.append_blank_registers(std::vector<std::uint32_t>(n, q));
    std::vector<std::size_t> point_regs(n);
    std::iota(point_regs.begin(), point_regs.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        state.apply_classical_map(point_regs, n + 1 + i, [&](const Label& z) {
            return ray_canonical(make_vector(z, field) - x_vec)[i].value();
        });
    }
    std::vector<std::size_t> ray_regs(n);
    std::iota(ray_regs.begin(), ray_regs.end(), n + 1);
    auto [ray, record] = state.measure_collapsing(ray_regs, rng);
    return {ray, std::move(state)};
}

} // namespace

TEST_SUITE("protocol") {

TEST_CASE("advice support pairs every point with its extension value") {
    const AdviceState identity = AdviceState::build(BooleanFunction(1, {0, 1}));
    CHECK(identity.field().order() == 3);
    const auto& amps = identity.state().amplitudes();
    CHECK(amps.size() == 3);
    const double expected = 1.0 / std::sqrt(3.0);
    for (std::uint32_t z = 0; z < 3; ++z) {
        // the extension of the identity bit map is g(z) = z
        auto it = amps.find({z, z});
        REQUIRE(it != amps.end());
        CHECK(std::abs(it->second - Amplitude(expected, 0.0)) < 1e-12);
    }

    const AdviceState and2 = AdviceState::build(BooleanFunction::conjunction(2));
    CHECK(and2.state().support_size() == 25);
    // g(2, 3) = 2 * 3 = 1 mod 5 for the conjunction
    CHECK(and2.state().amplitude({2, 3, 1}) != Amplitude(0.0, 0.0));
    for (const auto& [label, amp] : and2.state().amplitudes()) {
        CHECK(std::abs(std::abs(amp) - 0.2) < 1e-12);
        CHECK(label[2] == oracles::mle_by_term_sum(BooleanFunction::conjunction(2), 5,
                                                   {label[0], label[1]}));
    }

    const AdviceState zero = AdviceState::build(BooleanFunction::constant(1, false));
    for (std::uint32_t z = 0; z < 3; ++z) {
        CHECK(zero.state().amplitude({z, 0}) != Amplitude(0.0, 0.0));
    }
}

TEST_CASE("advice cost and the desk-scale bound") {
    CHECK(advice_qubit_cost(2) == 9);   // 3 registers of ceil(log2 5) qubits
    CHECK(advice_qubit_cost(10) == 44); // 11 registers of ceil(log2 13) qubits
    for (int n = 1; n <= 64; ++n) {
        const double bound = 2.0 * (n + 1) * std::log2(2.0 * n + 2.0);
        CHECK(advice_qubit_cost(n) <= bound);
    }
    CHECK_THROWS_AS(AdviceState::build(BooleanFunction::parity(8)), std::invalid_argument);
    CHECK_NOTHROW(AdviceState::build(BooleanFunction::parity(8), AdviceForm::analytic));
}

TEST_CASE("sample budget formulas") {
    CHECK(default_sample_cap(5) == 24);
    CHECK(default_sample_cap(3) == 11);
    CHECK(default_sample_cap(13) == 86);
    CHECK_THROWS_AS(default_sample_cap(2), std::invalid_argument);

    CHECK(expected_coupon_samples(3) == doctest::Approx(3.0));
    CHECK(expected_coupon_samples(5) == doctest::Approx(25.0 / 3.0));
    double h12 = 0.0;
    for (int k = 1; k <= 12; ++k) h12 += 1.0 / k;
    CHECK(expected_coupon_samples(13) == doctest::Approx(12.0 * h12));
    CHECK_THROWS_AS(expected_coupon_samples(2), std::invalid_argument);
}

TEST_CASE("every completed run answers f(x), exhaustively at n = 2") {
    const std::uint64_t cap = default_sample_cap(5);
    std::uint64_t timeouts = 0;
    std::uint64_t runs = 0;
    for (std::uint32_t code = 0; code < 16; ++code) {
        const BooleanFunction f = function_by_code(2, code);
        const AdviceState advice = AdviceState::build(f);
        for (std::uint32_t xi = 0; xi < 4; ++xi) {
            const std::vector<std::uint8_t> x{static_cast<std::uint8_t>(xi >> 1),
                                              static_cast<std::uint8_t>(xi & 1)};
            for (std::uint64_t seed = 0; seed < 25; ++seed) {
                Rng rng = make_rng(seed, code * 4 + xi);
                ++runs;
                try {
                    const ProtocolTranscript t = run_protocol(advice, x, rng, cap);
                    CHECK(t.answer == (f(x) ? 1 : 0));
                    CHECK(t.q == 5);
                    if (t.branch == ProtocolBranch::zero_ray) {
                        CHECK(t.samples_used == 0);
                        CHECK(t.coupons.empty());
                    } else {
                        CHECK(t.coupons.size() == 4);
                        for (const auto& [j, v] : t.coupons) {
                            CHECK(j >= 1);
                            CHECK(j <= 4);
                        }
                    }
                } catch (const CouponTimeout&) {
                    ++timeouts;
                }
            }
        }
    }
    CHECK(runs == 1600);
    CHECK(timeouts < runs / 50); // cap gives ~0.4% per-run timeout probability
}

TEST_CASE("the smallest instance n = 1 runs over F_3") {
    for (std::uint32_t code = 0; code < 4; ++code) {
        const BooleanFunction f = function_by_code(1, code);
        const AdviceState advice = AdviceState::build(f);
        CHECK(advice.field().order() == 3);
        for (std::uint8_t bit : {std::uint8_t{0}, std::uint8_t{1}}) {
            for (std::uint64_t seed = 0; seed < 40; ++seed) {
                Rng rng = make_rng(seed, 300 + code * 2 + bit);
                try {
                    const ProtocolTranscript t =
                        run_protocol(advice, {bit}, rng, default_sample_cap(3));
                    CHECK(t.answer == (f({bit}) ? 1 : 0));
                } catch (const CouponTimeout&) {
                }
            }
        }
    }
}

TEST_CASE("larger materialized instances stay exact") {
    Rng frng = make_rng(404);
    const BooleanFunction f = BooleanFunction::random(4, frng);
    const AdviceState advice = AdviceState::build(f);
    CHECK(advice.field().order() == 7);
    CHECK(advice.state().support_size() == 2401);
    int completed = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        Rng rng = make_rng(seed, 500);
        std::vector<std::uint8_t> x(4);
        for (auto& b : x) b = static_cast<std::uint8_t>(rng() & 1);
        try {
            const ProtocolTranscript t = run_protocol(advice, x, rng, default_sample_cap(7));
            ++completed;
            CHECK(t.answer == (f(x) ? 1 : 0));
            CHECK(t.coupons.size() == 6);
        } catch (const CouponTimeout&) {
        }
    }
    CHECK(completed >= 35);
}

TEST_CASE("zero-ray branch reads the answer without sampling") {
    const BooleanFunction f = BooleanFunction::parity(2);
    const AdviceState advice = AdviceState::build(f);
    const std::vector<std::uint8_t> x{1, 0};
    bool seen = false;
    for (std::uint64_t seed = 0; seed < 400 && !seen; ++seed) {
        Rng rng = make_rng(seed);
        const ProtocolTranscript t = run_protocol(advice, x, rng, default_sample_cap(5));
        if (t.branch == ProtocolBranch::zero_ray) {
            seen = true;
            CHECK(t.samples_used == 0);
            CHECK(t.answer == 1);
            CHECK(t.ray_outcome == std::vector<std::uint32_t>{0, 0});
        }
    }
    CHECK(seen); // probability 1/25 per run, 400 runs miss with odds ~1e-7
}

TEST_CASE("ray statistics and the reduced state match the uniform-line law") {
    const BooleanFunction f = BooleanFunction::conjunction(2);
    const AdviceState advice = AdviceState::build(f);
    const PrimeField field = advice.field();
    const MultilinearExtension g(f, field);
    const std::vector<std::uint8_t> x{0, 1};
    FieldVector x_vec;
    for (auto b : x) x_vec.emplace_back(b, field);

    // the ray marginal puts exactly 1/25 on the zero label
    {
        SparseState state = advice.state();
        state.append_blank_registers({5, 5});
        for (std::size_t i = 0; i < 2; ++i) {
            state.apply_classical_map({0, 1}, 3 + i, [&](const Label& z) {
                return ray_canonical(make_vector(z, field) - x_vec)[i].value();
            });
        }
        auto ray_dist = state.distribution({3, 4});
        CHECK(ray_dist[{0, 0}] == doctest::Approx(0.04).epsilon(1e-9));
        // 6 canonical rays of 4 points each plus the zero label
        CHECK(ray_dist.size() == 7);
    }

    int zero_rays = 0;
    const int runs = 4000;
    for (int seed = 0; seed < runs; ++seed) {
        Rng rng = make_rng(static_cast<std::uint64_t>(seed), 99);
        auto [ray, state] = collapse_ray_stage(advice, x, rng);
        bool zero = ray == Label{0, 0};
        if (zero) {
            ++zero_rays;
            CHECK(state.support_size() == 1);
            continue;
        }
        // reduced support is the punctured line {x + j y} with its values
        CHECK(state.support_size() == 4);
        const FieldVector y = make_vector(ray, field);
        for (std::uint32_t j = 1; j < 5; ++j) {
            const FieldElement loc(j, field);
            Label expected = raw_values(x_vec + loc * y);
            expected.push_back(g.eval_line(x_vec, y, loc).value());
            expected.push_back(ray[0]);
            expected.push_back(ray[1]);
            const Amplitude amp = state.amplitude(expected);
            CHECK(std::abs(std::abs(amp) - 0.5) < 1e-9);
        }
    }
    const double freq = zero_rays / static_cast<double>(runs);
    const double sigma = std::sqrt(0.04 * 0.96 / runs);
    CHECK(std::abs(freq - 0.04) <= 3.5 * sigma);
}

TEST_CASE("generic-branch sampling behaves like a coupon collector") {
    const BooleanFunction f = BooleanFunction::parity(2);
    const AdviceState advice = AdviceState::build(f);
    std::uint64_t generic = 0;
    std::uint64_t samples = 0;
    for (int seed = 0; seed < 3000; ++seed) {
        Rng rng = make_rng(static_cast<std::uint64_t>(seed), 7);
        try {
            const ProtocolTranscript t =
                run_protocol(advice, {0, 1}, rng, default_sample_cap(5));
            if (t.branch == ProtocolBranch::generic) {
                ++generic;
                samples += t.samples_used;
            }
        } catch (const CouponTimeout&) {
        }
    }
    const double mean = samples / static_cast<double>(generic);
    CHECK(std::abs(mean - expected_coupon_samples(5)) < 0.45);
}

TEST_CASE("the sample cap turns into CouponTimeout on the generic branch") {
    const BooleanFunction f = BooleanFunction::parity(2);
    const AdviceState advice = AdviceState::build(f);
    int timeouts = 0;
    int generic_attempts = 0;
    for (int seed = 0; seed < 80; ++seed) {
        Rng rng = make_rng(static_cast<std::uint64_t>(seed), 3);
        try {
            const ProtocolTranscript t = run_protocol(advice, {1, 1}, rng, 1);
            CHECK(t.branch == ProtocolBranch::zero_ray); // only branch that can finish
        } catch (const CouponTimeout& e) {
            ++timeouts;
            CHECK(e.partial().samples_used == 1);
            CHECK(e.partial().coupons.size() == 1);
            ++generic_attempts;
        }
    }
    CHECK(timeouts == generic_attempts);
    CHECK(timeouts > 60); // generic branch probability is 24/25
}

TEST_CASE("timeout rate stays under the union bound") {
    const BooleanFunction f = function_by_code(2, 0b0110);
    const AdviceState advice = AdviceState::build(f);
    const std::uint64_t cap = default_sample_cap(5);
    int timeouts = 0;
    const int runs = 5000;
    for (int seed = 0; seed < runs; ++seed) {
        Rng rng = make_rng(static_cast<std::uint64_t>(seed), 21);
        try {
            run_protocol(advice, {1, 0}, rng, cap);
        } catch (const CouponTimeout&) {
            ++timeouts;
        }
    }
    const double bound = 4.0 * std::pow(0.75, static_cast<double>(cap));
    const double sigma = std::sqrt(bound * (1 - bound) / runs);
    CHECK(timeouts / static_cast<double>(runs) <= bound + 3 * sigma);
}

TEST_CASE("analytic advice reproduces the protocol at n = 2") {
    for (std::uint32_t code : {0b0110u, 0b0001u, 0b1011u}) {
        const BooleanFunction f = function_by_code(2, code);
        const AdviceState advice = AdviceState::build(f, AdviceForm::analytic);
        CHECK_THROWS_AS(advice.state(), std::logic_error);
        for (std::uint32_t xi = 0; xi < 4; ++xi) {
            const std::vector<std::uint8_t> x{static_cast<std::uint8_t>(xi >> 1),
                                              static_cast<std::uint8_t>(xi & 1)};
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                Rng rng = make_rng(seed, code);
                try {
                    const ProtocolTranscript t = run_protocol(advice, x, rng, 24);
                    CHECK(t.answer == (f(x) ? 1 : 0));
                } catch (const CouponTimeout&) {
                }
            }
        }
    }
}

TEST_CASE("analytic advice scales to n = 10 where q^n is astronomical") {
    Rng frng = make_rng(123);
    const BooleanFunction f = BooleanFunction::random(10, frng);
    const AdviceState advice = AdviceState::build(f, AdviceForm::analytic);
    CHECK(advice.field().order() == 13);
    CHECK(advice.qubit_cost() == 44);
    int completed = 0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng = make_rng(seed, 5);
        std::vector<std::uint8_t> x(10);
        for (auto& b : x) b = static_cast<std::uint8_t>(rng() & 1);
        try {
            const ProtocolTranscript t = run_protocol(advice, x, rng, default_sample_cap(13));
            ++completed;
            CHECK(t.answer == (f(x) ? 1 : 0));
            CHECK(t.coupons.size() == 12);
        } catch (const CouponTimeout&) {
        }
    }
    CHECK(completed >= 25);
}

TEST_CASE("input validation") {
    const AdviceState advice = AdviceState::build(BooleanFunction::parity(2));
    Rng rng = make_rng(1);
    CHECK_THROWS_AS(run_protocol(advice, {1}, rng, 24), std::invalid_argument);
    CHECK_THROWS_AS(run_protocol(advice, {1, 2}, rng, 24), std::invalid_argument);
}

TEST_CASE("warmups repeat preparations until the input shows up") {
    // n = 1, identity function, x = 1
    const BooleanFunction identity(1, {0, 1});
    const SparseState advice = build_uniform_function_state(identity);
    CHECK(advice.support_size() == 2);
    Rng rng = make_rng(3);
    const WarmupResult r = pdqexp_eval(advice, {1}, rng, 1000);
    CHECK(r.answer == 1);

    // mean preparations concentrate near 2^n
    Rng frng = make_rng(77);
    const BooleanFunction f = BooleanFunction::random(3, frng);
    const SparseState advice3 = build_uniform_function_state(f);
    for (const bool postselect : {false, true}) {
        double total = 0.0;
        const int runs = 1000;
        for (int seed = 0; seed < runs; ++seed) {
            Rng r2 = make_rng(static_cast<std::uint64_t>(seed), postselect ? 1 : 2);
            std::vector<std::uint8_t> x(3);
            for (auto& b : x) b = static_cast<std::uint8_t>(r2() & 1);
            const WarmupResult w = postselect ? postselect_eval(advice3, x, r2, 1 << 12)
                                              : pdqexp_eval(advice3, x, r2, 1 << 12);
            CHECK(w.answer == (f(x) ? 1 : 0));
            total += static_cast<double>(w.preparations);
        }
        CHECK(std::abs(total / runs - 8.0) < 1.0);
    }
}

TEST_CASE("a cap of one preparation times out seven times in eight at n = 3") {
    Rng frng = make_rng(99);
    const BooleanFunction f = BooleanFunction::random(3, frng);
    const SparseState advice = build_uniform_function_state(f);
    int timeouts = 0;
    const int runs = 2000;
    for (int seed = 0; seed < runs; ++seed) {
        Rng rng = make_rng(static_cast<std::uint64_t>(seed), 4);
        try {
            pdqexp_eval(advice, {1, 0, 1}, rng, 1);
        } catch (const TryTimeout& e) {
            CHECK(e.tries() == 1);
            ++timeouts;
        }
    }
    const double rate = timeouts / static_cast<double>(runs);
    const double sigma = std::sqrt(0.875 * 0.125 / runs);
    CHECK(std::abs(rate - 0.875) <= 3.5 * sigma);
}

} // TEST_SUITE
