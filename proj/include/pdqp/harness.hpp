#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdqp/classical.hpp"
#include "pdqp/demos.hpp"
#include "pdqp/protocol.hpp"

namespace pdqp {

using json = nlohmann::ordered_json;

enum class ExperimentKind { protocol, pdpp, collision, grover, index, pdqexp };

ExperimentKind experiment_kind_from_name(const std::string& name);
std::string experiment_kind_name(ExperimentKind kind);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::protocol;
    int n = 2;                      // input length (protocol, pdpp, pdqexp)
    std::uint64_t domain = 16;      // N (collision, grover, index)
    std::string fn_spec = "random"; // hex | random | and | xor | const0 | const1
    std::uint64_t trials = 100;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> sample_cap;
    ProtocolMode mode = ProtocolMode::quantum;
    std::string two_to_one = "floorhalf"; // floorhalf | random
    std::string warmup = "pdqexp";        // pdqexp | postselect
    std::optional<std::vector<std::uint8_t>> fixed_input;
};

struct ExperimentResult {
    json summary;
    std::vector<std::string> records; // JSON lines, one per trial
    bool correctness_ok = true;
};

/// Runs `trials` independent seeded runs of the configured operation,
/// collects one record per run, and aggregates a summary whose theoretical
/// reference values are recomputed from the module formulas. Correctness
/// violations (never probabilistic timeouts) clear correctness_ok.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::string bits_to_string(const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> bits_from_string(const std::string& s);

json transcript_record(const ProtocolTranscript& transcript, std::uint64_t seed,
                       std::uint64_t trial, bool timeout);

} // namespace pdqp
