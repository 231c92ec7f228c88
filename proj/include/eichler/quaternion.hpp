#pragma once

// The totally definite quaternion algebra B_{p,L} = (a, b)_Q (x) L, with a, b rational
// integers taken from the classical table of presentations of B_{p,oo}.

#include "eichler/field.hpp"
#include "eichler/linalg.hpp"

#include <array>
#include <ostream>

namespace eichler {

/// Structure constants i^2 = a, j^2 = b over the field with the given shape.
struct QuaternionShape {
    FieldShape field{};
    long a = -1;
    long b = -1;

    bool operator==(const QuaternionShape&) const = default;
};

class QuaternionElement {
public:
    QuaternionElement() = default;
    QuaternionElement(QuaternionShape shape, std::array<FieldElement, 4> coords)
        : shape_(shape), c_(std::move(coords))
    {
    }

    static QuaternionElement zero(QuaternionShape s)
    {
        FieldElement z(s.field, 0);
        return {s, {z, z, z, z}};
    }

    static QuaternionElement scalar(QuaternionShape s, const FieldElement& x)
    {
        FieldElement z(s.field, 0);
        return {s, {x, z, z, z}};
    }

    QuaternionShape shape() const { return shape_; }
    const FieldElement& operator[](std::size_t i) const { return c_[i]; }
    const std::array<FieldElement, 4>& coords() const { return c_; }

    bool is_zero() const
    {
        return c_[0].is_zero() && c_[1].is_zero() && c_[2].is_zero() && c_[3].is_zero();
    }

    QuaternionElement conjugate() const { return {shape_, {c_[0], -c_[1], -c_[2], -c_[3]}}; }

    FieldElement reduced_trace() const { return FieldElement(shape_.field, 2) * c_[0]; }

    /// t^2 - a x^2 - b y^2 + ab z^2.
    FieldElement reduced_norm() const
    {
        const FieldShape f = shape_.field;
        FieldElement A(f, shape_.a), B(f, shape_.b);
        return c_[0] * c_[0] - A * c_[1] * c_[1] - B * c_[2] * c_[2] + A * B * c_[3] * c_[3];
    }

    QuaternionElement inverse() const
    {
        FieldElement n = reduced_norm();
        EICHLER_CHECK(!n.is_zero(), ErrorCode::InvalidArgument, "quaternion is not invertible");
        return conjugate().scaled(n.inverse());
    }

    QuaternionElement scaled(const FieldElement& s) const
    {
        return {shape_, {s * c_[0], s * c_[1], s * c_[2], s * c_[3]}};
    }

    friend QuaternionElement operator+(const QuaternionElement& x, const QuaternionElement& y)
    {
        check(x, y);
        return {x.shape_, {x.c_[0] + y.c_[0], x.c_[1] + y.c_[1], x.c_[2] + y.c_[2], x.c_[3] + y.c_[3]}};
    }
    friend QuaternionElement operator-(const QuaternionElement& x, const QuaternionElement& y)
    {
        check(x, y);
        return {x.shape_, {x.c_[0] - y.c_[0], x.c_[1] - y.c_[1], x.c_[2] - y.c_[2], x.c_[3] - y.c_[3]}};
    }
    friend QuaternionElement operator-(const QuaternionElement& x)
    {
        return {x.shape_, {-x.c_[0], -x.c_[1], -x.c_[2], -x.c_[3]}};
    }
    friend QuaternionElement operator*(const QuaternionElement& x, const QuaternionElement& y)
    {
        check(x, y);
        const FieldShape f = x.shape_.field;
        FieldElement A(f, x.shape_.a), B(f, x.shape_.b);
        const auto& [t1, x1, y1, z1] = x.c_;
        const auto& [t2, x2, y2, z2] = y.c_;
        return {x.shape_,
                {t1 * t2 + A * x1 * x2 + B * y1 * y2 - A * B * z1 * z2,
                 t1 * x2 + x1 * t2 - B * y1 * z2 + B * z1 * y2,
                 t1 * y2 + y1 * t2 + A * x1 * z2 - A * z1 * x2,
                 t1 * z2 + z1 * t2 + x1 * y2 - y1 * x2}};
    }
    friend bool operator==(const QuaternionElement& x, const QuaternionElement& y) { return x.c_ == y.c_; }

    /* Coordinates over Q in the basis {omega^s * e_t}: index t for g = 1, and
     * (2t, 2t+1) for the (1, omega) parts of the e_t coordinate when g = 2.
     */
    RatVector to_rational_vector() const
    {
        const int g = shape_.field.degree;
        RatVector v(4 * g);
        for (int t = 0; t < 4; ++t) {
            if (g == 1) {
                v[t] = c_[t].a();
            } else {
                v[2 * t] = c_[t].a();
                v[2 * t + 1] = c_[t].b();
            }
        }
        return v;
    }

    static QuaternionElement from_rational_vector(QuaternionShape s, const RatVector& v)
    {
        const int g = s.field.degree;
        EICHLER_CHECK(v.size() == static_cast<std::size_t>(4 * g), ErrorCode::Internal, "coordinate length");
        std::array<FieldElement, 4> c;
        for (int t = 0; t < 4; ++t)
            c[t] = g == 1 ? FieldElement(s.field, v[t]) : FieldElement(s.field, v[2 * t], v[2 * t + 1]);
        return {s, c};
    }

    friend std::ostream& operator<<(std::ostream& os, const QuaternionElement& x)
    {
        os << "[" << x.c_[0] << " " << x.c_[1] << " " << x.c_[2] << " " << x.c_[3] << "]";
        return os;
    }

private:
    static void check(const QuaternionElement& x, const QuaternionElement& y)
    {
        EICHLER_CHECK(x.shape_ == y.shape_, ErrorCode::InvalidArgument, "mixed quaternion algebras");
    }

    QuaternionShape shape_{};
    std::array<FieldElement, 4> c_;
};

class QuaternionAlgebra {
public:
    QuaternionAlgebra(Field field, std::int64_t p, long a, long b, std::int64_t aux_q = 0)
        : field_(std::move(field)), p_(p), shape_{field_.shape(), a, b}, aux_q_(aux_q)
    {
    }

    const Field& field() const { return field_; }
    std::int64_t p() const { return p_; }
    long a() const { return shape_.a; }
    long b() const { return shape_.b; }
    /// The auxiliary prime q of the presentation (-p, -q) when p = 1 mod 8; zero otherwise.
    std::int64_t auxiliary_prime() const { return aux_q_; }
    QuaternionShape shape() const { return shape_; }
    int degree() const { return field_.degree(); }
    /// Rank of the underlying Z-structure.
    std::size_t z_rank() const { return 4 * static_cast<std::size_t>(field_.degree()); }

    QuaternionElement element(const FieldElement& t, const FieldElement& x, const FieldElement& y,
                              const FieldElement& z) const
    {
        return {shape_, {t, x, y, z}};
    }

    /// Element with rational coordinates (t, x, y, z).
    QuaternionElement rational(const Rational& t, const Rational& x, const Rational& y, const Rational& z) const
    {
        return element(field_.element(t), field_.element(x), field_.element(y), field_.element(z));
    }

    QuaternionElement scalar(const FieldElement& x) const { return QuaternionElement::scalar(shape_, x); }
    QuaternionElement one() const { return scalar(field_.element(1)); }
    QuaternionElement omega() const { return scalar(FieldElement(field_.omega())); }

private:
    Field field_;
    std::int64_t p_;
    QuaternionShape shape_;
    std::int64_t aux_q_;
};

inline FieldElement reduced_norm(const QuaternionElement& x) { return x.reduced_norm(); }
inline FieldElement reduced_trace(const QuaternionElement& x) { return x.reduced_trace(); }
inline QuaternionElement conjugate(const QuaternionElement& x) { return x.conjugate(); }

namespace detail {

/* O_L / P^k with coordinates (u, v) in the basis {1, omega}, reduced by the
 * upper-triangular HNF [[d0, h], [0, d1]] of P^k.  Degree one uses d1 = 1.
 */
class ResidueRing {
public:
    ResidueRing(const Field& field, const AlgebraicInteger& generator, int k) : shape_(field.shape())
    {
        AlgebraicInteger pk = field.one();
        for (int i = 0; i < k; ++i)
            pk = pk * generator;
        if (field.degree() == 1) {
            d0_ = to_int64(abs(pk.a()));
            h_ = 0;
            d1_ = 1;
        } else {
            AlgebraicInteger pkw = pk * field.omega();
            IntMatrix hnf = hermite_normal_form({{pk.a(), pk.b()}, {pkw.a(), pkw.b()}}, 2);
            d0_ = to_int64(hnf[0][0]);
            h_ = to_int64(hnf[0][1]);
            d1_ = to_int64(hnf[1][1]);
        }
    }

    std::int64_t size() const { return d0_ * d1_; }
    std::int64_t id(std::int64_t u, std::int64_t v) const { return u + d0_ * v; }
    std::pair<std::int64_t, std::int64_t> element(std::int64_t id) const { return {id % d0_, id / d0_}; }

    std::int64_t reduce(std::int64_t u, std::int64_t v) const
    {
        std::int64_t q = floordiv(u, d0_);
        u -= q * d0_;
        v -= q * h_;
        v = v % d1_;
        if (v < 0)
            v += d1_;
        return id(u, v);
    }

    std::int64_t reduce(const AlgebraicInteger& x) const
    {
        Integer u = x.a(), v = x.b();
        Integer q = floor_div(u, d0_);
        u -= q * d0_;
        v -= q * h_;
        v = mod_floor(v, d1_);
        return id(u.get_si(), v.get_si());
    }

    std::int64_t mul(std::int64_t x, std::int64_t y) const
    {
        auto [u0, u1] = element(x);
        auto [v0, v1] = element(y);
        __int128 bb = static_cast<__int128>(u1) * v1;
        __int128 a = static_cast<__int128>(u0) * v0 - shape_.omega_norm * bb;
        __int128 b = static_cast<__int128>(u0) * v1 + static_cast<__int128>(u1) * v0 + shape_.omega_trace * bb;
        // Reduce the 128-bit values into range before the int64 reduction.
        __int128 m = static_cast<__int128>(d0_) * d1_;
        a %= m;
        b %= m;
        return reduce(static_cast<std::int64_t>(a), static_cast<std::int64_t>(b));
    }

    std::int64_t add(std::int64_t x, std::int64_t y) const
    {
        auto [u0, u1] = element(x);
        auto [v0, v1] = element(y);
        return reduce(u0 + v0, u1 + v1);
    }

private:
    static std::int64_t floordiv(std::int64_t a, std::int64_t b)
    {
        std::int64_t q = a / b;
        if ((a % b != 0) && ((a < 0) != (b < 0)))
            --q;
        return q;
    }

    FieldShape shape_;
    std::int64_t d0_ = 1, h_ = 0, d1_ = 1;
};

} // namespace detail

namespace detail {

inline AlgebraicInteger strip_even_valuation(AlgebraicInteger x, const PrimeIdeal& P)
{
    const FieldElement pi2 = FieldElement(P.generator * P.generator);
    while (valuation(x, P) >= 2)
        x = (FieldElement(x) / pi2).to_integer();
    return x;
}

/* Searches for a primitive solution of a x^2 + b y^2 = z^2 in O_L / P^k.  A
 * primitive triple can be scaled so that one unit coordinate equals 1, leaving
 * the cases x = 1, y = 1, and z = 1 with x, y in P.
 */
inline bool has_primitive_solution(const Field& field, const AlgebraicInteger& a, const AlgebraicInteger& b,
                                   const PrimeIdeal& P, int k)
{
    ResidueRing ring(field, P.generator, k);
    ResidueRing residue(field, P.generator, 1);
    const std::int64_t n = ring.size();
    std::vector<char> is_unit(n), is_square(n, 0);
    std::vector<std::int64_t> squares(n);
    for (std::int64_t r = 0; r < n; ++r) {
        auto [u, v] = ring.element(r);
        is_unit[r] = residue.reduce(u, v) != 0;
        squares[r] = ring.mul(r, r);
        is_square[squares[r]] = 1;
    }
    const std::int64_t ra = ring.reduce(a), rb = ring.reduce(b);
    for (std::int64_t y = 0; y < n; ++y)
        if (is_square[ring.add(ra, ring.mul(rb, squares[y]))])
            return true;
    for (std::int64_t x = 0; x < n; ++x)
        if (is_square[ring.add(ring.mul(ra, squares[x]), rb)])
            return true;
    std::vector<std::int64_t> in_p;
    for (std::int64_t r = 0; r < n; ++r)
        if (!is_unit[r])
            in_p.push_back(r);
    const std::int64_t one = ring.reduce(field.one());
    for (std::int64_t x : in_p) {
        std::int64_t ax = ring.mul(ra, squares[x]);
        for (std::int64_t y : in_p)
            if (ring.add(ax, ring.mul(rb, squares[y])) == one)
                return true;
    }
    return false;
}

/// Brute force modulo P^k with k = 2(v(2) + 1) + 1, enough for Hensel lifting at any prime.
inline int hilbert_symbol_full(const Field& field, AlgebraicInteger a, AlgebraicInteger b, const PrimeIdeal& P)
{
    a = strip_even_valuation(a, P);
    b = strip_even_valuation(b, P);
    const int k = 2 * (valuation(field.integer(2), P) + 1) + 1;
    return has_primitive_solution(field, a, b, P, k) ? 1 : -1;
}

} // namespace detail

/* Local Hilbert symbol (a, b)_P at a finite prime by brute-force search.
 *
 * Above 2 the search runs over O_L / P^k (see hilbert_symbol_full).  At odd P,
 * with a = pi^alpha u and b = pi^beta v after stripping even powers, any
 * solution modulo P with a unit partial derivative lifts, so the search runs
 * over the residue field:
 *   alpha = beta = 0: always solvable;
 *   alpha = 1, beta = 0: v y^2 = z^2 with y = 1;
 *   alpha = beta = 1: u x^2 + v y^2 = 0 with x = 1.
 */
inline int hilbert_symbol(const Field& field, AlgebraicInteger a, AlgebraicInteger b, const PrimeIdeal& P)
{
    EICHLER_CHECK(!a.is_zero() && !b.is_zero(), ErrorCode::InvalidArgument, "Hilbert symbol of zero");
    if (P.rational_prime == 2)
        return detail::hilbert_symbol_full(field, a, b, P);
    a = detail::strip_even_valuation(a, P);
    b = detail::strip_even_valuation(b, P);
    int alpha = valuation(a, P), beta = valuation(b, P);
    if (alpha == 0 && beta == 0)
        return 1;
    if (alpha == 0) {
        std::swap(a, b);
        std::swap(alpha, beta);
    }
    const FieldElement pi = FieldElement(P.generator);
    AlgebraicInteger u = (FieldElement(a) / pi).to_integer();
    detail::ResidueRing residue(field, P.generator, 1);
    const std::int64_t q = residue.size();
    std::vector<char> is_square(q, 0);
    for (std::int64_t r = 0; r < q; ++r)
        is_square[residue.mul(r, r)] = 1;
    if (beta == 0)
        return is_square[residue.reduce(b)] ? 1 : -1;
    AlgebraicInteger v = (FieldElement(b) / pi).to_integer();
    // u + v y^2 = 0 for some y  <=>  -u/v is a square  <=>  -u v is a square.
    return is_square[residue.reduce(-(u * v))] ? 1 : -1;
}

/* Finite primes of L at which the algebra ramifies, computed from local Hilbert
 * symbols and checked against the primes above p with odd residue degree.  The
 * real places ramify because a and b are negative.
 */
inline std::vector<PrimeIdeal> verify_ramification(const QuaternionAlgebra& B)
{
    const Field& field = B.field();
    EICHLER_CHECK(B.a() < 0 && B.b() < 0, ErrorCode::RamificationMismatch,
                  "structure constants are not totally negative");
    std::vector<std::int64_t> ells{2, B.p()};
    for (long c : {B.a(), B.b()})
        for (auto& [q, e] : factor_integer(Integer(c)))
            ells.push_back(to_int64(q));
    std::sort(ells.begin(), ells.end());
    ells.erase(std::unique(ells.begin(), ells.end()), ells.end());

    std::vector<PrimeIdeal> ramified;
    for (auto ell : ells)
        for (const auto& P : primes_above(field, ell))
            if (hilbert_symbol(field, field.integer(B.a()), field.integer(B.b()), P) == -1)
                ramified.push_back(P);

    std::vector<PrimeIdeal> expected;
    for (const auto& P : primes_above(field, B.p()))
        if (P.residue_degree % 2 == 1)
            expected.push_back(P);
    auto by_gen = [](const PrimeIdeal& x, const PrimeIdeal& y) { return canonical_less(x.generator, y.generator); };
    std::sort(ramified.begin(), ramified.end(), by_gen);
    std::sort(expected.begin(), expected.end(), by_gen);
    EICHLER_CHECK(ramified == expected, ErrorCode::RamificationMismatch,
                  "presentation (" + std::to_string(B.a()) + "," + std::to_string(B.b()) +
                      ") does not ramify exactly above p = " + std::to_string(B.p()));
    // Hilbert reciprocity: an even number of ramified places in total.
    EICHLER_CHECK((ramified.size() + field.degree()) % 2 == 0, ErrorCode::RamificationMismatch,
                  "odd number of ramified places");
    return ramified;
}

/// B_{p,oo} (x) L from the rational presentation table, certified by verify_ramification.
inline QuaternionAlgebra construct_algebra(const Field& field, std::int64_t p)
{
    EICHLER_CHECK(is_prime(p), ErrorCode::CompositeP, std::to_string(p) + " is not prime");
    EICHLER_CHECK(field.discriminant() % p != 0, ErrorCode::RamifiedPrime,
                  std::to_string(p) + " ramifies in L");
    long a = -1, b = -1;
    std::int64_t q = 0;
    if (p == 2) {
        a = -1;
        b = -1;
    } else if (p % 4 == 3) {
        a = -1;
        b = -p;
    } else if (p % 8 == 5) {
        a = -2;
        b = -p;
    } else {
        for (q = 3;; q += 4)
            if (is_prime(q) && legendre(q, p) == -1)
                break;
        a = -p;
        b = -q;
    }
    QuaternionAlgebra B(field, p, a, b, q);
    verify_ramification(B);
    return B;
}

} // namespace eichler
