#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pdqp/polynomials.hpp"
#include "pdqp/protocol.hpp"
#include "pdqp/rng.hpp"
#include "pdqp/simulator.hpp"

namespace pdqp {

/// Function [N] -> [N] with every image hit exactly twice.
class TwoToOneFunction {
public:
    explicit TwoToOneFunction(std::vector<std::uint32_t> table);

    static TwoToOneFunction floor_half(std::uint32_t domain_size); // f(x) = x / 2
    static TwoToOneFunction random_pairing(std::uint32_t domain_size, Rng& rng);

    std::uint32_t domain_size() const { return static_cast<std::uint32_t>(table_.size()); }
    std::uint32_t operator()(std::uint32_t x) const { return table_[x]; }

private:
    std::vector<std::uint32_t> table_;
};

class SampleTimeout : public std::runtime_error {
public:
    explicit SampleTimeout(std::uint64_t samples);
};

class MarkedItemNotFound : public std::runtime_error {
public:
    explicit MarkedItemNotFound(std::uint64_t samples);
};

struct CollisionResult {
    std::uint32_t first = 0;
    std::uint32_t second = 0;
    std::uint64_t samples_used = 0;
};

/// Collision search: the uniform (x, f(x)) state on binary registers is
/// prepared once; each run collapses the value registers to pin a preimage
/// pair, then reads both preimages with non-collapsing samples (a
/// two-coupon collector, 3 samples on average).
class CollisionInstance {
public:
    explicit CollisionInstance(TwoToOneFunction f);

    CollisionResult run(Rng& rng, std::uint64_t sample_cap) const;

    const TwoToOneFunction& function() const { return f_; }
    const SparseState& prepared_state() const { return state_; }

private:
    TwoToOneFunction f_;
    SparseState state_;
};

CollisionResult find_collision(const TwoToOneFunction& f, Rng& rng, std::uint64_t sample_cap);

std::uint32_t grover_iterations(std::uint64_t domain_size);     // ceil(N^(1/3))
std::uint32_t grover_sample_budget(std::uint64_t domain_size);  // 3 * ceil(N^(1/3))

/// sin^2((2T+1) * arcsin(1/sqrt(N))) with T = grover_iterations(N): the
/// marked-item probability after T exact Grover iterations.
double grover_marked_probability(std::uint64_t domain_size);

struct GroverResult {
    std::uint32_t found = 0;
    std::uint32_t iterations = 0;
    std::uint32_t sample_budget = 0;
    std::uint64_t samples_used = 0;
    double marked_probability = 0.0; // read from the simulated state
};

/// Search with ceil(N^(1/3)) exact Grover iterations on log2(N) binary
/// registers (phase-flip oracle plus reflection about uniform), followed by
/// 3 * ceil(N^(1/3)) non-collapsing samples. The amplified state is
/// deterministic, so one instance serves any number of sampling runs.
class GroverInstance {
public:
    explicit GroverInstance(const BooleanFunction& oracle);

    /// Draws the sample budget and returns on the first sample the oracle
    /// confirms marked; throws MarkedItemNotFound otherwise.
    GroverResult run(Rng& rng) const;

    double marked_probability() const { return marked_probability_; }
    std::uint32_t iterations() const { return iterations_; }
    std::uint32_t marked_item() const { return marked_; }
    const SparseState& amplified_state() const { return state_; }

private:
    BooleanFunction oracle_;
    std::uint32_t marked_;
    std::uint32_t iterations_;
    std::uint32_t sample_budget_;
    SparseState state_;
    double marked_probability_;
};

GroverResult grover_noncollapsing(const BooleanFunction& oracle, Rng& rng);

/// One-way communication: Alice holds an N-bit string, Bob an index in
/// [1, N]. Alice's message is the advice state for the string read as a
/// truth table; Bob runs the line protocol on the index's bit pattern.
struct IndexInstance {
    std::vector<std::uint8_t> alice_bits;
    std::uint64_t bob_index = 1; // 1-based
};

struct IndexResult {
    int bit = -1;
    int message_qubits = 0;
    ProtocolTranscript transcript;
};

IndexResult index_protocol(const IndexInstance& instance, Rng& rng, std::uint64_t sample_cap);

/// Message-size bound the index protocol asserts, c * log2(N) * log2(log2(N))
/// qubits with c = 6 (the loglog factor floored at 1 so N = 2 is covered).
double index_message_bound(std::uint64_t domain_size);

} // namespace pdqp
