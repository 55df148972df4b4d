#include "pdqp/polynomials.hpp"

#include <algorithm>
#include <stdexcept>

namespace pdqp {

namespace {

constexpr int kMaxArity = 20; // 2^20 table entries; past that the table itself is the problem

void check_arity(int n) {
    if (n < 1 || n > kMaxArity) {
        throw std::invalid_argument("BooleanFunction: arity must be in [1, " +
                                    std::to_string(kMaxArity) + "]");
    }
}

} // namespace

BooleanFunction::BooleanFunction(int n, std::vector<std::uint8_t> table)
    : n_(n), table_(std::move(table)) {
    check_arity(n);
    if (table_.size() != (std::size_t{1} << n_)) {
        throw std::invalid_argument("BooleanFunction: table length " +
                                    std::to_string(table_.size()) + " != 2^" + std::to_string(n_));
    }
    for (auto& b : table_) {
        if (b > 1) throw std::invalid_argument("BooleanFunction: table entries must be bits");
    }
}

BooleanFunction BooleanFunction::from_hex(int n, std::string_view hex) {
    check_arity(n);
    const std::size_t entries = std::size_t{1} << n;
    const std::size_t digits = (entries + 3) / 4;
    if (hex.size() != digits) {
        throw std::invalid_argument("BooleanFunction: expected " + std::to_string(digits) +
                                    " hex digits, got " + std::to_string(hex.size()));
    }
    std::vector<std::uint8_t> table(entries, 0);
    for (std::size_t d = 0; d < digits; ++d) {
        const char c = hex[d];
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else throw std::invalid_argument("BooleanFunction: invalid hex digit");
        for (int b = 0; b < 4; ++b) {
            const std::size_t idx = d * 4 + static_cast<std::size_t>(b);
            const int bit = (v >> (3 - b)) & 1;
            if (idx < entries) {
                table[idx] = static_cast<std::uint8_t>(bit);
            } else if (bit != 0) {
                throw std::invalid_argument("BooleanFunction: nonzero padding bits");
            }
        }
    }
    return BooleanFunction(n, std::move(table));
}

std::string BooleanFunction::to_hex() const {
    const std::size_t entries = table_.size();
    const std::size_t digits = (entries + 3) / 4;
    std::string out(digits, '0');
    for (std::size_t d = 0; d < digits; ++d) {
        int v = 0;
        for (int b = 0; b < 4; ++b) {
            const std::size_t idx = d * 4 + static_cast<std::size_t>(b);
            if (idx < entries && table_[idx]) v |= 1 << (3 - b);
        }
        out[d] = "0123456789abcdef"[v];
    }
    return out;
}

BooleanFunction BooleanFunction::conjunction(int n) {
    check_arity(n);
    std::vector<std::uint8_t> table(std::size_t{1} << n, 0);
    table.back() = 1;
    return BooleanFunction(n, std::move(table));
}

BooleanFunction BooleanFunction::parity(int n) {
    check_arity(n);
    std::vector<std::uint8_t> table(std::size_t{1} << n);
    for (std::size_t i = 0; i < table.size(); ++i) {
        table[i] = static_cast<std::uint8_t>(std::popcount(i) & 1);
    }
    return BooleanFunction(n, std::move(table));
}

BooleanFunction BooleanFunction::constant(int n, bool bit) {
    check_arity(n);
    return BooleanFunction(n, std::vector<std::uint8_t>(std::size_t{1} << n, bit ? 1 : 0));
}

BooleanFunction BooleanFunction::random(int n, Rng& rng) {
    check_arity(n);
    std::vector<std::uint8_t> table(std::size_t{1} << n);
    std::uint64_t word = 0;
    int left = 0;
    for (auto& b : table) {
        if (left == 0) {
            word = rng();
            left = 64;
        }
        b = static_cast<std::uint8_t>(word & 1);
        word >>= 1;
        --left;
    }
    return BooleanFunction(n, std::move(table));
}

BooleanFunction BooleanFunction::parse_spec(int n, const std::string& spec) {
    if (spec == "and") return conjunction(n);
    if (spec == "xor") return parity(n);
    if (spec == "const0") return constant(n, false);
    if (spec == "const1") return constant(n, true);
    return from_hex(n, spec);
}

bool BooleanFunction::operator()(const std::vector<std::uint8_t>& bits) const {
    if (bits.size() != static_cast<std::size_t>(n_)) {
        throw std::invalid_argument("BooleanFunction: input length mismatch");
    }
    return (*this)(bits_to_index(bits));
}

std::uint64_t bits_to_index(const std::vector<std::uint8_t>& bits) {
    std::uint64_t idx = 0;
    for (auto b : bits) {
        if (b > 1) throw std::invalid_argument("bits_to_index: entries must be bits");
        idx = (idx << 1) | b;
    }
    return idx;
}

std::vector<std::uint8_t> index_to_bits(std::uint64_t index, int n) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((index >> (n - 1 - i)) & 1);
    }
    return bits;
}

MultilinearExtension::MultilinearExtension(BooleanFunction f, PrimeField field)
    : f_(std::move(f)), field_(field) {}

FieldElement MultilinearExtension::eval(const FieldVector& z) const {
    const int n = f_.arity();
    if (z.size() != static_cast<std::size_t>(n)) {
        throw std::invalid_argument("mle eval: point has wrong dimension");
    }
    const FieldElement one(1, field_);
    for (const auto& c : z) {
        if (c.order() != field_.order()) {
            throw std::invalid_argument("mle eval: point over a different field");
        }
    }
    // Fold the table variable by variable, last coordinate first:
    // v'[w] = (1 - z_i) * v[w0] + z_i * v[w1].
    std::vector<FieldElement> vals;
    vals.reserve(f_.table().size());
    for (auto b : f_.table()) vals.emplace_back(b, field_);
    for (int i = n - 1; i >= 0; --i) {
        const FieldElement& t = z[static_cast<std::size_t>(i)];
        const FieldElement s = one - t;
        const std::size_t half = vals.size() / 2;
        for (std::size_t w = 0; w < half; ++w) {
            vals[w] = s * vals[2 * w] + t * vals[2 * w + 1];
        }
        vals.erase(vals.begin() + static_cast<std::ptrdiff_t>(half), vals.end());
    }
    return vals[0];
}

FieldElement MultilinearExtension::eval_line(const FieldVector& x, const FieldVector& y,
                                             const FieldElement& j) const {
    return eval(x + j * y);
}

FieldVector ray_canonical(const FieldVector& v) {
    for (const auto& c : v) {
        if (!c.is_zero()) {
            return c.inverse() * v;
        }
    }
    return v; // zero vector is its own label
}

namespace {

std::vector<LineSamplePoint> checked_sorted_points(std::vector<LineSamplePoint> pts,
                                                   int degree_bound) {
    if (pts.empty()) throw std::invalid_argument("interpolation: no points");
    const std::uint32_t q = pts.front().location.order();
    if (degree_bound < 0 || static_cast<std::uint32_t>(degree_bound) > q - 2) {
        throw std::invalid_argument("interpolation: degree bound must be in [0, q-2]");
    }
    if (pts.size() < static_cast<std::size_t>(degree_bound) + 1) {
        throw std::invalid_argument("interpolation: need at least degree_bound + 1 points");
    }
    for (const auto& p : pts) {
        if (p.location.order() != q || p.value.order() != q) {
            throw std::invalid_argument("interpolation: mixed fields");
        }
        if (p.location.is_zero()) {
            throw std::invalid_argument("interpolation: sample at 0 is not allowed");
        }
    }
    std::sort(pts.begin(), pts.end(), [](const LineSamplePoint& a, const LineSamplePoint& b) {
        return a.location.value() < b.location.value();
    });
    for (std::size_t i = 1; i < pts.size(); ++i) {
        if (pts[i].location == pts[i - 1].location) {
            throw std::invalid_argument("interpolation: duplicate sample location");
        }
    }
    return pts;
}

/// Lagrange evaluation at t of the polynomial through pts[0..count).
FieldElement lagrange_eval(const std::vector<LineSamplePoint>& pts, std::size_t count,
                           const FieldElement& t) {
    const PrimeField field = t.field();
    FieldElement acc(0, field);
    for (std::size_t m = 0; m < count; ++m) {
        FieldElement basis(1, field);
        for (std::size_t k = 0; k < count; ++k) {
            if (k == m) continue;
            basis = basis * (t - pts[k].location) * (pts[m].location - pts[k].location).inverse();
        }
        acc = acc + pts[m].value * basis;
    }
    return acc;
}

} // namespace

FieldElement interpolate_at_zero(const std::vector<LineSamplePoint>& points, int degree_bound) {
    const auto pts = checked_sorted_points(points, degree_bound);
    const PrimeField field = pts.front().location.field();
    return lagrange_eval(pts, static_cast<std::size_t>(degree_bound) + 1, FieldElement(0, field));
}

bool consistent_with_interpolant(const std::vector<LineSamplePoint>& points, int degree_bound) {
    const auto pts = checked_sorted_points(points, degree_bound);
    const std::size_t used = static_cast<std::size_t>(degree_bound) + 1;
    for (std::size_t i = used; i < pts.size(); ++i) {
        if (!(lagrange_eval(pts, used, pts[i].location) == pts[i].value)) {
            return false;
        }
    }
    return true;
}

} // namespace pdqp
