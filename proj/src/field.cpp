#include "pdqp/field.hpp"

#include <stdexcept>
#include <string>

namespace pdqp {

bool is_prime(std::uint32_t m) {
    if (m < 2) return false;
    for (std::uint64_t d = 2; d * d <= m; ++d) {
        if (m % d == 0) return false;
    }
    return true;
}

std::uint32_t select_prime(int n) {
    if (n < 1) {
        throw std::invalid_argument("select_prime: n must be >= 1");
    }
    std::uint32_t q = static_cast<std::uint32_t>(n) + 2;
    while (!is_prime(q)) ++q;
    return q;
}

PrimeField::PrimeField(std::uint32_t q) : q_(q) {
    if (!is_prime(q)) {
        throw std::invalid_argument("PrimeField: order " + std::to_string(q) + " is not prime");
    }
}

FieldElement::FieldElement(std::uint32_t value, const PrimeField& field)
    : value_(value), q_(field.order()) {
    if (value_ >= q_) {
        throw std::invalid_argument("FieldElement: value " + std::to_string(value) +
                                    " outside [0, " + std::to_string(q_) + ")");
    }
}

FieldElement FieldElement::reduce(std::int64_t value, const PrimeField& field) {
    const std::int64_t q = field.order();
    std::int64_t r = value % q;
    if (r < 0) r += q;
    return FieldElement(static_cast<std::uint32_t>(r), field);
}

namespace {

void require_same_field(const FieldElement& a, const FieldElement& b) {
    if (a.order() != b.order()) {
        throw std::invalid_argument("field mismatch: F_" + std::to_string(a.order()) +
                                    " vs F_" + std::to_string(b.order()));
    }
}

} // namespace

FieldElement FieldElement::operator+(const FieldElement& other) const {
    require_same_field(*this, other);
    std::uint32_t s = value_ + other.value_;
    if (s >= q_) s -= q_;
    return FieldElement(s, PrimeField(q_));
}

FieldElement FieldElement::operator-(const FieldElement& other) const {
    require_same_field(*this, other);
    std::uint32_t s = value_ >= other.value_ ? value_ - other.value_ : value_ + q_ - other.value_;
    return FieldElement(s, PrimeField(q_));
}

FieldElement FieldElement::operator*(const FieldElement& other) const {
    require_same_field(*this, other);
    std::uint64_t p = static_cast<std::uint64_t>(value_) * other.value_;
    return FieldElement(static_cast<std::uint32_t>(p % q_), PrimeField(q_));
}

FieldElement FieldElement::operator-() const {
    return FieldElement(value_ == 0 ? 0 : q_ - value_, PrimeField(q_));
}

FieldElement FieldElement::inverse() const {
    if (value_ == 0) {
        throw std::domain_error("FieldElement: zero has no inverse");
    }
    // Fermat: a^(q-2) mod q.
    std::uint64_t base = value_;
    std::uint64_t acc = 1;
    std::uint32_t e = q_ - 2;
    while (e > 0) {
        if (e & 1) acc = acc * base % q_;
        base = base * base % q_;
        e >>= 1;
    }
    return FieldElement(static_cast<std::uint32_t>(acc), PrimeField(q_));
}

namespace {

void require_same_length(const FieldVector& a, const FieldVector& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("vector length mismatch: " + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()));
    }
}

} // namespace

FieldVector operator+(const FieldVector& a, const FieldVector& b) {
    require_same_length(a, b);
    FieldVector out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] + b[i]);
    return out;
}

FieldVector operator-(const FieldVector& a, const FieldVector& b) {
    require_same_length(a, b);
    FieldVector out;
    out.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(a[i] - b[i]);
    return out;
}

FieldVector operator*(const FieldElement& scalar, const FieldVector& v) {
    FieldVector out;
    out.reserve(v.size());
    for (const auto& c : v) out.push_back(scalar * c);
    return out;
}

FieldVector make_vector(const std::vector<std::uint32_t>& values, const PrimeField& field) {
    FieldVector out;
    out.reserve(values.size());
    for (auto v : values) out.emplace_back(v, field);
    return out;
}

std::vector<std::uint32_t> raw_values(const FieldVector& v) {
    std::vector<std::uint32_t> out;
    out.reserve(v.size());
    for (const auto& c : v) out.push_back(c.value());
    return out;
}

} // namespace pdqp
