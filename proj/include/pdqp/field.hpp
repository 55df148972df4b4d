#pragma once

#include <cstdint>
#include <vector>

namespace pdqp {

bool is_prime(std::uint32_t m);

/// Smallest prime q with q >= n + 2. Bertrand's postulate guarantees
/// q <= 2n + 1, so the register dimension stays linear in n.
std::uint32_t select_prime(int n);

/// Prime-order field F_q. Orders are desk scale (q fits in 32 bits with
/// room for products in 64), so primality is trial division and inverses
/// are Fermat exponentiation.
class PrimeField {
public:
    explicit PrimeField(std::uint32_t q);

    static PrimeField for_input_length(int n) { return PrimeField(select_prime(n)); }

    std::uint32_t order() const { return q_; }

    bool operator==(const PrimeField&) const = default;

private:
    std::uint32_t q_;
};

/// Canonical residue mod q, tagged with its field order. Mixing elements of
/// distinct fields throws std::invalid_argument.
class FieldElement {
public:
    FieldElement(std::uint32_t value, const PrimeField& field);

    /// Reduces an arbitrary signed value into [0, q).
    static FieldElement reduce(std::int64_t value, const PrimeField& field);

    std::uint32_t value() const { return value_; }
    std::uint32_t order() const { return q_; }
    PrimeField field() const { return PrimeField(q_); }
    bool is_zero() const { return value_ == 0; }

    FieldElement operator+(const FieldElement& other) const;
    FieldElement operator-(const FieldElement& other) const;
    FieldElement operator*(const FieldElement& other) const;
    FieldElement operator-() const;

    /// Multiplicative inverse; throws std::domain_error on zero.
    FieldElement inverse() const;

    bool operator==(const FieldElement&) const = default;

private:
    std::uint32_t value_;
    std::uint32_t q_;
};

/// Coordinate vector over one shared field.
using FieldVector = std::vector<FieldElement>;

FieldVector operator+(const FieldVector& a, const FieldVector& b);
FieldVector operator-(const FieldVector& a, const FieldVector& b);
FieldVector operator*(const FieldElement& scalar, const FieldVector& v);

FieldVector make_vector(const std::vector<std::uint32_t>& values, const PrimeField& field);
std::vector<std::uint32_t> raw_values(const FieldVector& v);

} // namespace pdqp
