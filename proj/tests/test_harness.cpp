#include <doctest.h>

#include <cmath>

#include "pdqp/harness.hpp"

using namespace pdqp;

TEST_SUITE("harness") {

TEST_CASE("identical configs replay byte for byte") {
    ExperimentConfig config;
    config.kind = ExperimentKind::protocol;
    config.n = 2;
    config.fn_spec = "random";
    config.trials = 60;
    config.seed = 424242;
    const ExperimentResult a = run_experiment(config);
    const ExperimentResult b = run_experiment(config);
    CHECK(a.records == b.records);
    CHECK(a.summary.dump() == b.summary.dump());

    config.seed = 424243;
    const ExperimentResult c = run_experiment(config);
    CHECK(a.records != c.records);
}

TEST_CASE("protocol experiment: correct answers, recomputed reference values") {
    ExperimentConfig config;
    config.kind = ExperimentKind::protocol;
    config.n = 2;
    config.fn_spec = "xor";
    config.trials = 1000;
    config.seed = 7;
    const ExperimentResult result = run_experiment(config);
    CHECK(result.correctness_ok);
    CHECK(result.summary["fn"] == "6");
    CHECK(result.summary["q"] == 5);
    CHECK(result.summary["success_rate"].get<double>() >= 0.99);
    CHECK(result.summary["accepts_with_two_thirds"].get<bool>());
    CHECK(result.summary["expected_coupon_samples"].get<double>() ==
          doctest::Approx(expected_coupon_samples(5)));
    CHECK(result.summary["zero_ray_expected"].get<double>() == doctest::Approx(1.0 / 25));
    CHECK(result.records.size() == 1000);

    // records parse back and carry the transcript fields
    const json record = json::parse(result.records.front());
    CHECK(record.contains("seed"));
    CHECK(record.contains("branch"));
    CHECK(record.contains("ray"));
    CHECK(record.contains("samples_used"));
    CHECK(record.contains("answer"));
    CHECK(record.contains("timeout"));
    CHECK(record["mode"] == "quantum");
}

TEST_CASE("pdpp experiment mirrors the quantum sweep") {
    ExperimentConfig config;
    config.kind = ExperimentKind::pdpp;
    config.n = 2;
    config.fn_spec = "and";
    config.trials = 500;
    config.seed = 11;
    const ExperimentResult result = run_experiment(config);
    CHECK(result.correctness_ok);
    CHECK(result.summary["mode"] == "classical");
    CHECK(result.summary["success_rate"].get<double>() >= 0.98);
    CHECK(json::parse(result.records.front())["mode"] == "classical");
}

TEST_CASE("protocol --mode classical equals the pdpp subcommand semantics") {
    ExperimentConfig config;
    config.kind = ExperimentKind::protocol;
    config.mode = ProtocolMode::classical;
    config.n = 2;
    config.fn_spec = "const1";
    config.trials = 50;
    config.seed = 5;
    const ExperimentResult viaMode = run_experiment(config);
    config.kind = ExperimentKind::pdpp;
    config.mode = ProtocolMode::quantum;
    const ExperimentResult viaKind = run_experiment(config);
    CHECK(viaMode.summary["mode"] == "classical");
    CHECK(viaKind.summary["mode"] == "classical");
    CHECK(viaMode.summary["correct"] == viaKind.summary["correct"]);
}

TEST_CASE("random truth tables are drawn from the run seed") {
    ExperimentConfig config;
    config.kind = ExperimentKind::protocol;
    config.n = 3;
    config.fn_spec = "random";
    config.trials = 5;
    config.seed = 99;
    const ExperimentResult a = run_experiment(config);
    const ExperimentResult b = run_experiment(config);
    CHECK(a.summary["fn"] == b.summary["fn"]);
    config.seed = 100;
    const ExperimentResult c = run_experiment(config);
    CHECK(a.summary["fn"] != c.summary["fn"]);
}

TEST_CASE("collision experiment tallies genuine pairs and sample counts") {
    ExperimentConfig config;
    config.kind = ExperimentKind::collision;
    config.domain = 1024;
    config.trials = 800;
    config.seed = 13;
    const ExperimentResult result = run_experiment(config);
    CHECK(result.correctness_ok);
    CHECK(result.summary["collisions_genuine"] == 800);
    CHECK(result.summary["expected_samples"].get<double>() == doctest::Approx(3.0));
    const double mean = result.summary["mean_samples"].get<double>();
    CHECK(std::abs(mean - 3.0) < 0.2);

    config.two_to_one = "random";
    config.trials = 100;
    CHECK(run_experiment(config).correctness_ok);
}

TEST_CASE("grover experiment checks the closed form against the simulator") {
    ExperimentConfig config;
    config.kind = ExperimentKind::grover;
    config.domain = 64;
    config.trials = 400;
    config.seed = 17;
    const ExperimentResult result = run_experiment(config);
    CHECK(result.correctness_ok);
    CHECK(result.summary["probability_gap"].get<double>() <= 1e-9);
    const double expected = result.summary["expected_success"].get<double>();
    const double empirical = result.summary["empirical_success"].get<double>();
    const double sigma = result.summary["success_sigma"].get<double>();
    CHECK(std::abs(empirical - expected) <= std::max(3.0 * sigma, 1e-3));
}

TEST_CASE("index experiment reports the message size next to its bound") {
    ExperimentConfig config;
    config.kind = ExperimentKind::index;
    config.domain = 16;
    config.trials = 100;
    config.seed = 19;
    const ExperimentResult result = run_experiment(config);
    CHECK(result.correctness_ok);
    CHECK(result.summary["message_qubits"] == advice_qubit_cost(4));
    CHECK(result.summary["message_bound"].get<double>() >=
          result.summary["message_qubits"].get<double>());
}

TEST_CASE("pdqexp experiment concentrates near 2^n preparations") {
    ExperimentConfig config;
    config.kind = ExperimentKind::pdqexp;
    config.n = 3;
    config.fn_spec = "random";
    config.trials = 400;
    config.seed = 23;
    const ExperimentResult result = run_experiment(config);
    CHECK(result.correctness_ok);
    CHECK(result.summary["expected_preparations"].get<double>() == doctest::Approx(8.0));
    CHECK(std::abs(result.summary["mean_preparations"].get<double>() - 8.0) < 1.2);

    config.warmup = "postselect";
    const ExperimentResult post = run_experiment(config);
    CHECK(post.correctness_ok);
    CHECK(post.summary["variant"] == "postselect");
}

TEST_CASE("config validation") {
    ExperimentConfig config;
    config.trials = 0;
    CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
    CHECK_THROWS_AS(experiment_kind_from_name("nope"), std::invalid_argument);
    CHECK_THROWS_AS(bits_from_string("01x"), std::invalid_argument);

    config.trials = 1;
    config.kind = ExperimentKind::grover;
    config.domain = 48; // not a power of two
    CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);

    config.kind = ExperimentKind::collision;
    config.domain = 15; // odd
    CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);

    config.kind = ExperimentKind::pdqexp;
    config.warmup = "bogus";
    CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
}

TEST_CASE("fixed inputs pin x across trials") {
    ExperimentConfig config;
    config.kind = ExperimentKind::protocol;
    config.n = 2;
    config.fn_spec = "xor";
    config.fixed_input = bits_from_string("01");
    config.trials = 30;
    config.seed = 29;
    const ExperimentResult result = run_experiment(config);
    CHECK(result.correctness_ok);
    for (const auto& line : result.records) {
        CHECK(json::parse(line)["x"] == "01");
    }
}

} // TEST_SUITE
