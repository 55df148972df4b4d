#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pdqp/harness.hpp"

namespace {

// exit codes: 0 all good, 1 correctness violation, 2 usage, 3 I/O
constexpr int kExitOk = 0;
constexpr int kExitScientific = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct CliOptions {
    pdqp::ExperimentConfig config;
    std::string out_path;
    std::string mode = "quantum";
    std::string input_bits;
};

void add_common_flags(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--trials", opts.config.trials, "independent seeded runs")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", opts.config.seed, "experiment seed");
    cmd->add_option("--sample-cap", opts.config.sample_cap,
                    "cap on samples (or preparations) per run");
    cmd->add_option("--out", opts.out_path, "write one JSON record per run to this file");
}

void add_fn_flag(CLI::App* cmd, CliOptions& opts) {
    cmd->add_option("--fn", opts.config.fn_spec,
                    "truth table: hex literal, random, and, xor, const0, const1");
}

int run(const CliOptions& opts) {
    const pdqp::ExperimentResult result = pdqp::run_experiment(opts.config);

    if (!opts.out_path.empty()) {
        std::ofstream out(opts.out_path);
        if (!out) {
            std::cerr << "error: cannot open " << opts.out_path << " for writing\n";
            return kExitIo;
        }
        for (const auto& line : result.records) out << line << '\n';
        if (!out.good()) {
            std::cerr << "error: short write to " << opts.out_path << "\n";
            return kExitIo;
        }
    }

    std::cout << result.summary.dump(2) << std::endl;
    return result.correctness_ok ? kExitOk : kExitScientific;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact simulator and experiment harness for quantum computation with "
                 "non-collapsing measurements and quantum advice"};
    app.require_subcommand(1);

    CliOptions opts;

    auto* protocol = app.add_subcommand(
        "protocol", "line protocol: evaluate f(x) from the advice state");
    protocol->add_option("--n", opts.config.n, "input length")->check(CLI::PositiveNumber);
    add_fn_flag(protocol, opts);
    protocol->add_option("--mode", opts.mode, "quantum | classical");
    protocol->add_option("--x", opts.input_bits, "fixed input bits (default: random per trial)");
    add_common_flags(protocol, opts);

    auto* pdpp = app.add_subcommand(
        "pdpp", "the same protocol on randomized advice and an explicit mass function");
    pdpp->add_option("--n", opts.config.n, "input length")->check(CLI::PositiveNumber);
    add_fn_flag(pdpp, opts);
    pdpp->add_option("--x", opts.input_bits, "fixed input bits (default: random per trial)");
    add_common_flags(pdpp, opts);

    auto* collision = app.add_subcommand(
        "collision", "find a collision of a two-to-one function with non-collapsing reads");
    collision->add_option("--N,--cap-N", opts.config.domain, "domain size (even)")
        ->check(CLI::PositiveNumber);
    collision->add_option("--two-to-one", opts.config.two_to_one, "floorhalf | random");
    add_common_flags(collision, opts);

    auto* grover = app.add_subcommand(
        "grover", "N^(1/3)-iteration Grover search read out by non-collapsing samples");
    grover->add_option("--N,--cap-N", opts.config.domain, "domain size (power of 2)")
        ->check(CLI::PositiveNumber);
    add_common_flags(grover, opts);

    auto* index = app.add_subcommand(
        "index", "one-way communication: Bob recovers x_i from a short advice message");
    index->add_option("--N,--cap-N", opts.config.domain, "string length (power of 2)")
        ->check(CLI::PositiveNumber);
    add_fn_flag(index, opts);
    add_common_flags(index, opts);

    auto* pdqexp = app.add_subcommand(
        "pdqexp", "warm-up: repeat preparation and measurement until z = x");
    pdqexp->add_option("--n", opts.config.n, "input length")->check(CLI::PositiveNumber);
    add_fn_flag(pdqexp, opts);
    pdqexp->add_option("--variant", opts.config.warmup, "pdqexp | postselect");
    pdqexp->add_option("--x", opts.input_bits, "fixed input bits (default: random per trial)");
    add_common_flags(pdqexp, opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (protocol->parsed()) {
            opts.config.kind = pdqp::ExperimentKind::protocol;
            if (opts.mode == "classical") {
                opts.config.mode = pdqp::ProtocolMode::classical;
            } else if (opts.mode != "quantum") {
                std::cerr << "error: --mode must be quantum or classical\n";
                return kExitUsage;
            }
        } else if (pdpp->parsed()) {
            opts.config.kind = pdqp::ExperimentKind::pdpp;
        } else if (collision->parsed()) {
            opts.config.kind = pdqp::ExperimentKind::collision;
        } else if (grover->parsed()) {
            opts.config.kind = pdqp::ExperimentKind::grover;
        } else if (index->parsed()) {
            opts.config.kind = pdqp::ExperimentKind::index;
        } else if (pdqexp->parsed()) {
            opts.config.kind = pdqp::ExperimentKind::pdqexp;
        }
        if (!opts.input_bits.empty()) {
            opts.config.fixed_input = pdqp::bits_from_string(opts.input_bits);
        }
        return run(opts);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitScientific;
    }
}
