#include "pdqp/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace pdqp {

namespace {

// stream 0 is reserved for experiment-level draws (the function table, the
// marked item); trial t uses stream t + 1
constexpr std::uint64_t kSetupStream = 0;

std::vector<std::uint8_t> random_bits(int n, Rng& rng) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1);
    return bits;
}

double binomial_sigma(double p, double trials) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / trials);
}

int pow2_log(std::uint64_t domain) {
    if (domain < 2 || !std::has_single_bit(domain)) {
        throw std::invalid_argument("N must be a power of 2 and >= 2");
    }
    return std::countr_zero(domain);
}

} // namespace

ExperimentKind experiment_kind_from_name(const std::string& name) {
    if (name == "protocol") return ExperimentKind::protocol;
    if (name == "pdpp") return ExperimentKind::pdpp;
    if (name == "collision") return ExperimentKind::collision;
    if (name == "grover") return ExperimentKind::grover;
    if (name == "index") return ExperimentKind::index;
    if (name == "pdqexp") return ExperimentKind::pdqexp;
    throw std::invalid_argument("unknown experiment: " + name);
}

std::string experiment_kind_name(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::protocol: return "protocol";
        case ExperimentKind::pdpp: return "pdpp";
        case ExperimentKind::collision: return "collision";
        case ExperimentKind::grover: return "grover";
        case ExperimentKind::index: return "index";
        case ExperimentKind::pdqexp: return "pdqexp";
    }
    throw std::invalid_argument("unknown experiment kind");
}

std::string bits_to_string(const std::vector<std::uint8_t>& bits) {
    std::string out;
    out.reserve(bits.size());
    for (auto b : bits) out.push_back(b ? '1' : '0');
    return out;
}

std::vector<std::uint8_t> bits_from_string(const std::string& s) {
    std::vector<std::uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("bit string must be 0/1");
        bits.push_back(c == '1' ? 1 : 0);
    }
    return bits;
}

json transcript_record(const ProtocolTranscript& transcript, std::uint64_t seed,
                       std::uint64_t trial, bool timeout) {
    json record;
    record["seed"] = seed;
    record["trial"] = trial;
    record["mode"] = transcript.mode == ProtocolMode::quantum ? "quantum" : "classical";
    record["n"] = transcript.n;
    record["q"] = transcript.q;
    record["x"] = bits_to_string(transcript.input);
    record["branch"] = transcript.branch == ProtocolBranch::zero_ray ? "zero-ray" : "generic";
    record["ray"] = transcript.ray_outcome;
    record["samples_used"] = transcript.samples_used;
    if (timeout) {
        record["answer"] = nullptr;
    } else {
        record["answer"] = transcript.answer;
    }
    record["timeout"] = timeout;
    return record;
}

namespace {

struct Tally {
    std::uint64_t completed = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t correct = 0;
    std::uint64_t zero_ray = 0;
    std::uint64_t generic_completed = 0;
    std::uint64_t generic_samples = 0;
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

json base_summary(const ExperimentConfig& config) {
    json summary;
    summary["experiment"] = experiment_kind_name(config.kind);
    summary["trials"] = config.trials;
    summary["seed"] = config.seed;
    return summary;
}

ExperimentResult run_line_protocol(const ExperimentConfig& config) {
    const int n = config.n;
    Rng setup = make_rng(config.seed, kSetupStream);
    const BooleanFunction f = config.fn_spec == "random" ? BooleanFunction::random(n, setup)
                                                         : BooleanFunction::parse_spec(n, config.fn_spec);
    const bool classical = config.kind == ExperimentKind::pdpp ||
                           config.mode == ProtocolMode::classical;

    std::optional<AdviceState> quantum_advice;
    std::optional<DiscreteDistribution> classical_advice;
    std::uint32_t q = 0;
    if (classical) {
        classical_advice = build_rand_advice(f);
        q = classical_advice->layout().dims.front();
    } else {
        std::uint64_t support = 1;
        bool fits = true;
        const std::uint64_t prime = select_prime(n);
        for (int i = 0; i < n && fits; ++i) {
            support *= prime;
            fits = support <= AdviceState::kMaxMaterializedSupport;
        }
        quantum_advice = AdviceState::build(
            f, fits ? AdviceForm::materialized : AdviceForm::analytic);
        q = quantum_advice->field().order();
    }
    const std::uint64_t cap = config.sample_cap.value_or(default_sample_cap(q));

    ExperimentResult result;
    Tally tally;
    for (std::uint64_t trial = 0; trial < config.trials; ++trial) {
        Rng rng = make_rng(config.seed, trial + 1);
        const std::vector<std::uint8_t> x =
            config.fixed_input ? *config.fixed_input : random_bits(n, rng);
        try {
            const ProtocolTranscript transcript =
                classical ? run_pdpp(*classical_advice, x, rng, cap)
                          : run_protocol(*quantum_advice, x, rng, cap);
            ++tally.completed;
            if (transcript.branch == ProtocolBranch::zero_ray) {
                ++tally.zero_ray;
            } else {
                ++tally.generic_completed;
                tally.generic_samples += transcript.samples_used;
            }
            if (transcript.answer == (f(x) ? 1 : 0)) {
                ++tally.correct;
            } else {
                tally.violations.push_back("trial " + std::to_string(trial) +
                                           ": wrong answer on x=" + bits_to_string(x));
            }
            result.records.push_back(
                transcript_record(transcript, config.seed, trial, false).dump());
        } catch (const CouponTimeout& timeout) {
            ++tally.timeouts;
            result.records.push_back(
                transcript_record(timeout.partial(), config.seed, trial, true).dump());
        }
    }

    json summary = base_summary(config);
    summary["mode"] = classical ? "classical" : "quantum";
    summary["n"] = n;
    summary["q"] = q;
    summary["fn"] = f.to_hex();
    summary["sample_cap"] = cap;
    summary["completed"] = tally.completed;
    summary["timeouts"] = tally.timeouts;
    summary["correct"] = tally.correct;
    const double trials = static_cast<double>(config.trials);
    summary["success_rate"] = static_cast<double>(tally.correct) / trials;
    summary["accepts_with_two_thirds"] = static_cast<double>(tally.correct) / trials >= 2.0 / 3.0;
    summary["zero_ray_rate"] = static_cast<double>(tally.zero_ray) / trials;
    summary["zero_ray_expected"] = std::pow(static_cast<double>(q), -n);
    if (tally.generic_completed > 0) {
        summary["mean_samples_generic"] =
            static_cast<double>(tally.generic_samples) / static_cast<double>(tally.generic_completed);
    }
    summary["expected_coupon_samples"] = expected_coupon_samples(q);
    if (!summary["accepts_with_two_thirds"].get<bool>()) {
        tally.violations.push_back("acceptance probability fell below 2/3");
    }
    summary["violations"] = tally.violations;
    result.summary = std::move(summary);
    result.correctness_ok = tally.ok();
    return result;
}

ExperimentResult run_collision(const ExperimentConfig& config) {
    if (config.two_to_one != "random" && config.two_to_one != "floorhalf") {
        throw std::invalid_argument("two_to_one must be floorhalf or random");
    }
    Rng setup = make_rng(config.seed, kSetupStream);
    const std::uint32_t domain = static_cast<std::uint32_t>(config.domain);
    const TwoToOneFunction f = config.two_to_one == "random"
                                   ? TwoToOneFunction::random_pairing(domain, setup)
                                   : TwoToOneFunction::floor_half(domain);
    const CollisionInstance instance(f);
    const std::uint64_t cap = config.sample_cap.value_or(64);

    ExperimentResult result;
    Tally tally;
    std::uint64_t total_samples = 0;
    for (std::uint64_t trial = 0; trial < config.trials; ++trial) {
        Rng rng = make_rng(config.seed, trial + 1);
        json record;
        record["seed"] = config.seed;
        record["trial"] = trial;
        record["N"] = domain;
        try {
            const CollisionResult run = instance.run(rng, cap);
            ++tally.completed;
            total_samples += run.samples_used;
            const bool genuine = run.first != run.second && f(run.first) == f(run.second);
            if (genuine) {
                ++tally.correct;
            } else {
                tally.violations.push_back("trial " + std::to_string(trial) +
                                           ": returned pair is not a collision");
            }
            record["pair"] = {run.first, run.second};
            record["samples_used"] = run.samples_used;
            record["timeout"] = false;
        } catch (const SampleTimeout&) {
            ++tally.timeouts;
            record["pair"] = nullptr;
            record["samples_used"] = cap;
            record["timeout"] = true;
        }
        result.records.push_back(record.dump());
    }

    json summary = base_summary(config);
    summary["N"] = domain;
    summary["two_to_one"] = config.two_to_one;
    summary["sample_cap"] = cap;
    summary["completed"] = tally.completed;
    summary["timeouts"] = tally.timeouts;
    summary["collisions_genuine"] = tally.correct;
    if (tally.completed > 0) {
        summary["mean_samples"] =
            static_cast<double>(total_samples) / static_cast<double>(tally.completed);
    }
    // two coupons to collect, same law as the line protocol at q = 3
    summary["expected_samples"] = expected_coupon_samples(3);
    summary["violations"] = tally.violations;
    result.summary = std::move(summary);
    result.correctness_ok = tally.ok();
    return result;
}

ExperimentResult run_grover(const ExperimentConfig& config) {
    const std::uint64_t domain = config.domain;
    const int n = pow2_log(domain);
    Rng setup = make_rng(config.seed, kSetupStream);
    std::vector<std::uint8_t> table(domain, 0);
    const std::uint64_t marked =
        std::uniform_int_distribution<std::uint64_t>(0, domain - 1)(setup);
    table[marked] = 1;
    const BooleanFunction oracle(n, table);
    const GroverInstance instance(oracle);

    const double p = grover_marked_probability(domain);
    const double expected_success =
        1.0 - std::pow(1.0 - p, static_cast<double>(grover_sample_budget(domain)));

    ExperimentResult result;
    Tally tally;
    std::uint64_t total_samples = 0;
    for (std::uint64_t trial = 0; trial < config.trials; ++trial) {
        Rng rng = make_rng(config.seed, trial + 1);
        json record;
        record["seed"] = config.seed;
        record["trial"] = trial;
        record["N"] = domain;
        record["T"] = instance.iterations();
        record["K"] = grover_sample_budget(domain);
        try {
            const GroverResult run = instance.run(rng);
            ++tally.completed;
            total_samples += run.samples_used;
            if (run.found == marked) {
                ++tally.correct;
            } else {
                tally.violations.push_back("trial " + std::to_string(trial) +
                                           ": returned item is not the marked one");
            }
            record["found"] = run.found;
            record["samples_used"] = run.samples_used;
            record["success"] = true;
        } catch (const MarkedItemNotFound&) {
            ++tally.timeouts;
            record["found"] = nullptr;
            record["samples_used"] = grover_sample_budget(domain);
            record["success"] = false;
        }
        result.records.push_back(record.dump());
    }

    const double empirical = static_cast<double>(tally.completed) /
                             static_cast<double>(config.trials);
    json summary = base_summary(config);
    summary["N"] = domain;
    summary["T"] = instance.iterations();
    summary["K"] = grover_sample_budget(domain);
    summary["marked"] = marked;
    summary["marked_probability_simulated"] = instance.marked_probability();
    summary["marked_probability_closed_form"] = p;
    const double probability_gap = std::abs(instance.marked_probability() - p);
    summary["probability_gap"] = probability_gap;
    summary["expected_success"] = expected_success;
    summary["empirical_success"] = empirical;
    summary["success_sigma"] = binomial_sigma(expected_success, static_cast<double>(config.trials));
    summary["found_rate_total_samples"] = total_samples;
    if (probability_gap > 1e-9) {
        tally.violations.push_back("simulated marked probability drifted from the closed form");
    }
    summary["violations"] = tally.violations;
    result.summary = std::move(summary);
    result.correctness_ok = tally.ok();
    return result;
}

ExperimentResult run_index(const ExperimentConfig& config) {
    const std::uint64_t domain = config.domain;
    const int n = pow2_log(domain);
    const std::uint64_t cap = config.sample_cap.value_or(default_sample_cap(select_prime(n)));
    const bool fixed_fn = config.fn_spec != "random";

    ExperimentResult result;
    Tally tally;
    for (std::uint64_t trial = 0; trial < config.trials; ++trial) {
        Rng rng = make_rng(config.seed, trial + 1);
        IndexInstance instance;
        instance.alice_bits = fixed_fn
                                  ? BooleanFunction::parse_spec(n, config.fn_spec).table()
                                  : random_bits(static_cast<int>(domain), rng);
        instance.bob_index = std::uniform_int_distribution<std::uint64_t>(1, domain)(rng);
        json record;
        record["seed"] = config.seed;
        record["trial"] = trial;
        record["N"] = domain;
        record["i"] = instance.bob_index;
        try {
            const IndexResult run = index_protocol(instance, rng, cap);
            ++tally.completed;
            const bool expected = instance.alice_bits[instance.bob_index - 1] != 0;
            if (run.bit == (expected ? 1 : 0)) {
                ++tally.correct;
            } else {
                tally.violations.push_back("trial " + std::to_string(trial) +
                                           ": recovered bit differs from x_i");
            }
            record["bit"] = run.bit;
            record["message_qubits"] = run.message_qubits;
            record["samples_used"] = run.transcript.samples_used;
            record["timeout"] = false;
        } catch (const CouponTimeout& timeout) {
            ++tally.timeouts;
            record["bit"] = nullptr;
            record["samples_used"] = timeout.partial().samples_used;
            record["timeout"] = true;
        }
        result.records.push_back(record.dump());
    }

    json summary = base_summary(config);
    summary["N"] = domain;
    summary["q"] = select_prime(n);
    summary["sample_cap"] = cap;
    summary["completed"] = tally.completed;
    summary["timeouts"] = tally.timeouts;
    summary["correct"] = tally.correct;
    summary["message_qubits"] = advice_qubit_cost(n);
    summary["message_bound"] = index_message_bound(domain);
    summary["violations"] = tally.violations;
    result.summary = std::move(summary);
    result.correctness_ok = tally.ok();
    return result;
}

ExperimentResult run_warmup(const ExperimentConfig& config) {
    const int n = config.n;
    Rng setup = make_rng(config.seed, kSetupStream);
    const BooleanFunction f = config.fn_spec == "random" ? BooleanFunction::random(n, setup)
                                                         : BooleanFunction::parse_spec(n, config.fn_spec);
    const SparseState advice = build_uniform_function_state(f);
    const bool postselect = config.warmup == "postselect";
    if (!postselect && config.warmup != "pdqexp") {
        throw std::invalid_argument("warmup must be pdqexp or postselect");
    }
    const std::uint64_t cap = config.sample_cap.value_or((std::uint64_t{1} << n) * 32);

    ExperimentResult result;
    Tally tally;
    std::uint64_t total_tries = 0;
    for (std::uint64_t trial = 0; trial < config.trials; ++trial) {
        Rng rng = make_rng(config.seed, trial + 1);
        const std::vector<std::uint8_t> x =
            config.fixed_input ? *config.fixed_input : random_bits(n, rng);
        json record;
        record["seed"] = config.seed;
        record["trial"] = trial;
        record["variant"] = config.warmup;
        record["x"] = bits_to_string(x);
        try {
            const WarmupResult run = postselect ? postselect_eval(advice, x, rng, cap)
                                                : pdqexp_eval(advice, x, rng, cap);
            ++tally.completed;
            total_tries += run.preparations;
            if (run.answer == (f(x) ? 1 : 0)) {
                ++tally.correct;
            } else {
                tally.violations.push_back("trial " + std::to_string(trial) +
                                           ": warmup answer differs from f(x)");
            }
            record["answer"] = run.answer;
            record["preparations"] = run.preparations;
            record["timeout"] = false;
        } catch (const TryTimeout&) {
            ++tally.timeouts;
            record["answer"] = nullptr;
            record["preparations"] = cap;
            record["timeout"] = true;
        }
        result.records.push_back(record.dump());
    }

    json summary = base_summary(config);
    summary["variant"] = config.warmup;
    summary["n"] = n;
    summary["fn"] = f.to_hex();
    summary["try_cap"] = cap;
    summary["completed"] = tally.completed;
    summary["timeouts"] = tally.timeouts;
    summary["correct"] = tally.correct;
    if (tally.completed > 0) {
        summary["mean_preparations"] =
            static_cast<double>(total_tries) / static_cast<double>(tally.completed);
    }
    summary["expected_preparations"] = std::pow(2.0, n);
    summary["violations"] = tally.violations;
    result.summary = std::move(summary);
    result.correctness_ok = tally.ok();
    return result;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    if (config.trials < 1) {
        throw std::invalid_argument("trials must be >= 1");
    }
    switch (config.kind) {
        case ExperimentKind::protocol:
        case ExperimentKind::pdpp:
            return run_line_protocol(config);
        case ExperimentKind::collision:
            return run_collision(config);
        case ExperimentKind::grover:
            return run_grover(config);
        case ExperimentKind::index:
            return run_index(config);
        case ExperimentKind::pdqexp:
            return run_warmup(config);
    }
    throw std::invalid_argument("unknown experiment kind");
}

} // namespace pdqp
