#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pdqp/field.hpp"
#include "pdqp/rng.hpp"

namespace pdqp {

/// Truth table of f: {0,1}^n -> {0,1}. Entry i is f evaluated at the n-bit
/// binary expansion of i, coordinate 0 being the most significant bit.
///
/// Hex serialization packs the table MSB-first into ceil(2^n / 4) lowercase
/// digits; trailing pad bits must be zero.
class BooleanFunction {
public:
    BooleanFunction(int n, std::vector<std::uint8_t> table);

    static BooleanFunction from_hex(int n, std::string_view hex);
    static BooleanFunction conjunction(int n);   // 1 iff all inputs are 1
    static BooleanFunction parity(int n);        // xor of the inputs
    static BooleanFunction constant(int n, bool bit);
    static BooleanFunction random(int n, Rng& rng);

    /// Accepts "and" | "xor" | "const0" | "const1" or a hex table literal.
    static BooleanFunction parse_spec(int n, const std::string& spec);

    int arity() const { return n_; }
    const std::vector<std::uint8_t>& table() const { return table_; }

    bool operator()(std::uint64_t index) const { return table_[index] != 0; }
    bool operator()(const std::vector<std::uint8_t>& bits) const;

    std::string to_hex() const;

    bool operator==(const BooleanFunction&) const = default;

private:
    int n_;
    std::vector<std::uint8_t> table_;
};

std::uint64_t bits_to_index(const std::vector<std::uint8_t>& bits);
std::vector<std::uint8_t> index_to_bits(std::uint64_t index, int n);

/// The unique polynomial over F_q of degree <= 1 in every variable that
/// agrees with f on {0,1}^n. Evaluation folds the truth table one variable
/// at a time, O(2^n) field operations per point, no coefficient expansion.
class MultilinearExtension {
public:
    MultilinearExtension(BooleanFunction f, PrimeField field);

    const BooleanFunction& function() const { return f_; }
    const PrimeField& field() const { return field_; }

    FieldElement eval(const FieldVector& z) const;

    /// Restriction to the line t -> x + t*y, evaluated at t = j.
    FieldElement eval_line(const FieldVector& x, const FieldVector& y, const FieldElement& j) const;

private:
    BooleanFunction f_;
    PrimeField field_;
};

/// Canonical representative of the ray through v: the scalar multiple whose
/// leftmost nonzero coordinate is 1, or the zero vector for v = 0.
FieldVector ray_canonical(const FieldVector& v);

/// One recovered value of the line restriction: location j != 0 and the
/// claimed value p(j).
struct LineSamplePoint {
    FieldElement location;
    FieldElement value;
};

/// p(0) for the unique polynomial of degree <= degree_bound through the
/// points, using the first degree_bound + 1 of them after sorting by
/// location. Extra points are not cross-checked here; see
/// consistent_with_interpolant.
FieldElement interpolate_at_zero(const std::vector<LineSamplePoint>& points, int degree_bound);

/// Whether every supplied point lies on the degree <= degree_bound
/// interpolant through the first degree_bound + 1 (sorted by location).
bool consistent_with_interpolant(const std::vector<LineSamplePoint>& points, int degree_bound);

} // namespace pdqp
