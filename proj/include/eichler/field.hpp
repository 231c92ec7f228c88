#pragma once

// Exact arithmetic in L = Q or a real quadratic field Q(sqrt d) of narrow class
// number one.  Elements are written a + b*omega in the integral basis {1, omega}.

#include "eichler/common.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <ostream>
#include <tuple>
#include <type_traits>

namespace eichler {

/// omega^2 = omega_trace * omega - omega_norm.  Degree one ignores omega.
struct FieldShape {
    int degree = 1;
    int omega_trace = 0;
    int omega_norm = 0;

    bool operator==(const FieldShape&) const = default;
};

template <class Coeff>
class QuadraticNumber {
public:
    QuadraticNumber() = default;
    QuadraticNumber(FieldShape shape, Coeff a, Coeff b = Coeff(0))
        : shape_(shape), a_(std::move(a)), b_(std::move(b))
    {
        if constexpr (std::is_same_v<Coeff, Rational>) {
            a_.canonicalize();
            b_.canonicalize();
        }
        EICHLER_CHECK(shape_.degree == 2 || b_ == 0, ErrorCode::InvalidArgument,
                      "omega coordinate must vanish over Q");
    }

    const Coeff& a() const { return a_; }
    const Coeff& b() const { return b_; }
    FieldShape shape() const { return shape_; }
    bool is_zero() const { return a_ == 0 && b_ == 0; }
    bool is_rational() const { return b_ == 0; }

    QuadraticNumber conjugate() const
    {
        if (shape_.degree == 1)
            return *this;
        return {shape_, a_ + Coeff(shape_.omega_trace) * b_, -b_};
    }

    Coeff norm() const
    {
        if (shape_.degree == 1)
            return a_;
        return a_ * a_ + Coeff(shape_.omega_trace) * a_ * b_ + Coeff(shape_.omega_norm) * b_ * b_;
    }

    Coeff trace() const
    {
        if (shape_.degree == 1)
            return a_;
        return Coeff(2) * a_ + Coeff(shape_.omega_trace) * b_;
    }

    QuadraticNumber operator-() const { return {shape_, -a_, -b_}; }

    friend QuadraticNumber operator+(const QuadraticNumber& x, const QuadraticNumber& y)
    {
        check_shape(x, y);
        return {x.shape_, x.a_ + y.a_, x.b_ + y.b_};
    }
    friend QuadraticNumber operator-(const QuadraticNumber& x, const QuadraticNumber& y)
    {
        check_shape(x, y);
        return {x.shape_, x.a_ - y.a_, x.b_ - y.b_};
    }
    friend QuadraticNumber operator*(const QuadraticNumber& x, const QuadraticNumber& y)
    {
        check_shape(x, y);
        const FieldShape& s = x.shape_;
        if (s.degree == 1)
            return {s, x.a_ * y.a_};
        Coeff bb = x.b_ * y.b_;
        return {s, x.a_ * y.a_ - Coeff(s.omega_norm) * bb,
                x.a_ * y.b_ + x.b_ * y.a_ + Coeff(s.omega_trace) * bb};
    }
    friend QuadraticNumber operator*(const Coeff& c, const QuadraticNumber& x)
    {
        return {x.shape_, c * x.a_, c * x.b_};
    }
    QuadraticNumber& operator+=(const QuadraticNumber& y) { return *this = *this + y; }
    QuadraticNumber& operator-=(const QuadraticNumber& y) { return *this = *this - y; }
    QuadraticNumber& operator*=(const QuadraticNumber& y) { return *this = *this * y; }

    friend bool operator==(const QuadraticNumber& x, const QuadraticNumber& y)
    {
        return x.a_ == y.a_ && x.b_ == y.b_;
    }
    friend bool operator!=(const QuadraticNumber& x, const QuadraticNumber& y) { return !(x == y); }

    friend std::ostream& operator<<(std::ostream& os, const QuadraticNumber& x)
    {
        os << "(" << x.a_ << "," << x.b_ << ")";
        return os;
    }

private:
    static void check_shape(const QuadraticNumber& x, const QuadraticNumber& y)
    {
        EICHLER_CHECK(x.shape_ == y.shape_, ErrorCode::InvalidArgument, "mixed fields in arithmetic");
    }

    FieldShape shape_{};
    Coeff a_ = 0;
    Coeff b_ = 0;
};

/// Element of O_L.
using AlgebraicInteger = QuadraticNumber<Integer>;

/// Element of L, coordinates kept as reduced rationals.
class FieldElement : public QuadraticNumber<Rational> {
public:
    using Base = QuadraticNumber<Rational>;
    FieldElement() = default;
    FieldElement(const Base& x) : Base(x) {}
    FieldElement(FieldShape shape, Rational a, Rational b = Rational(0)) : Base(shape, std::move(a), std::move(b)) {}
    FieldElement(const AlgebraicInteger& x) : Base(x.shape(), Rational(x.a()), Rational(x.b())) {}

    FieldElement inverse() const
    {
        EICHLER_CHECK(!is_zero(), ErrorCode::InvalidArgument, "division by zero in L");
        if (shape().degree == 1)
            return FieldElement(shape(), 1 / a());
        Rational n = norm();
        FieldElement c = conjugate();
        return FieldElement(shape(), c.a() / n, c.b() / n);
    }

    friend FieldElement operator/(const FieldElement& x, const FieldElement& y)
    {
        return FieldElement(static_cast<const Base&>(x) * static_cast<const Base&>(y.inverse()));
    }

    /// Positive common denominator of both coordinates.
    Integer denominator() const
    {
        Integer l;
        mpz_lcm(l.get_mpz_t(), a().get_den_mpz_t(), b().get_den_mpz_t());
        return l;
    }

    AlgebraicInteger numerator() const
    {
        Integer d = denominator();
        Rational ra = a() * d, rb = b() * d;
        return {shape(), ra.get_num(), rb.get_num()};
    }

    bool is_integral() const { return denominator() == 1; }

    AlgebraicInteger to_integer() const
    {
        EICHLER_CHECK(is_integral(), ErrorCode::Internal, "element of L is not integral");
        return {shape(), a().get_num(), b().get_num()};
    }
};

inline FieldElement operator+(const FieldElement& x, const FieldElement& y)
{
    return FieldElement(static_cast<const FieldElement::Base&>(x) + static_cast<const FieldElement::Base&>(y));
}
inline FieldElement operator-(const FieldElement& x, const FieldElement& y)
{
    return FieldElement(static_cast<const FieldElement::Base&>(x) - static_cast<const FieldElement::Base&>(y));
}
inline FieldElement operator*(const FieldElement& x, const FieldElement& y)
{
    return FieldElement(static_cast<const FieldElement::Base&>(x) * static_cast<const FieldElement::Base&>(y));
}
inline FieldElement operator-(const FieldElement& x)
{
    return FieldElement(-static_cast<const FieldElement::Base&>(x));
}

inline Integer norm(const AlgebraicInteger& x) { return x.norm(); }
inline Integer trace(const AlgebraicInteger& x) { return x.trace(); }
inline Rational norm(const FieldElement& x) { return x.norm(); }
inline Rational trace(const FieldElement& x) { return x.trace(); }

/// For degree at most two, x >> 0 iff trace and norm are both positive.
template <class Coeff>
bool is_totally_positive(const QuadraticNumber<Coeff>& x)
{
    if (x.shape().degree == 1)
        return x.a() > 0;
    return x.trace() > 0 && x.norm() > 0;
}

/// Canonical ordering of field elements: trace, then the omega coordinate.
/// For fixed trace this is the order of the first real embedding.
template <class Coeff>
bool canonical_less(const QuadraticNumber<Coeff>& x, const QuadraticNumber<Coeff>& y)
{
    Coeff tx = x.trace(), ty = y.trace();
    if (tx != ty)
        return tx < ty;
    if (x.b() != y.b())
        return x.b() < y.b();
    return x.a() < y.a();
}

struct PrimeIdeal {
    Integer rational_prime;
    int residue_degree = 1;
    int ramification_index = 1;
    AlgebraicInteger generator;  // canonical totally positive
    Integer norm;

    bool operator==(const PrimeIdeal& o) const { return generator == o.generator; }
};

/// FieldDescriptor: L = Q (d = 1) or Q(sqrt d) for d in the narrow-class-number-one allowlist.
class Field {
public:
    static constexpr std::array<int, 5> allowlist{1, 2, 5, 13, 17};

    static Field make(int d)
    {
        EICHLER_CHECK(std::find(allowlist.begin(), allowlist.end(), d) != allowlist.end(),
                      ErrorCode::UnsupportedField,
                      "d = " + std::to_string(d) + " is not in the narrow class number one allowlist");
        Field f;
        f.d_ = d;
        if (d == 1) {
            f.shape_ = {1, 0, 0};
            f.discriminant_ = 1;
            f.fundamental_unit_ = AlgebraicInteger(f.shape_, -1);
            f.zeta_ = Rational(1, 12);
            return f;
        }
        if (d % 4 == 1) {
            f.shape_ = {2, 1, -(d - 1) / 4};
            f.discriminant_ = d;
        } else {
            f.shape_ = {2, 0, -d};
            f.discriminant_ = 4 * d;
        }
        switch (d) {
        case 2:
            f.fundamental_unit_ = AlgebraicInteger(f.shape_, 1, 1);
            f.zeta_ = Rational(1, 12);
            break;
        case 5:
            f.fundamental_unit_ = AlgebraicInteger(f.shape_, 0, 1);
            f.zeta_ = Rational(1, 30);
            break;
        case 13:
            f.fundamental_unit_ = AlgebraicInteger(f.shape_, 1, 1);
            f.zeta_ = Rational(1, 6);
            break;
        case 17:
            f.fundamental_unit_ = AlgebraicInteger(f.shape_, 3, 2);
            f.zeta_ = Rational(1, 3);
            break;
        }
        return f;
    }

    int d() const { return d_; }
    int degree() const { return shape_.degree; }
    FieldShape shape() const { return shape_; }
    const Integer& discriminant() const { return discriminant_; }
    /// Absolute value of zeta_L(-1).
    const Rational& zeta_minus_one() const { return zeta_; }

    AlgebraicInteger zero() const { return {shape_, 0, 0}; }
    AlgebraicInteger one() const { return {shape_, 1, 0}; }
    AlgebraicInteger integer(const Integer& a, const Integer& b = 0) const { return {shape_, a, b}; }
    AlgebraicInteger omega() const
    {
        EICHLER_CHECK(degree() == 2, ErrorCode::InvalidArgument, "omega is undefined over Q");
        return {shape_, 0, 1};
    }
    FieldElement element(const Rational& a, const Rational& b = 0) const { return {shape_, a, b}; }

    /// Fundamental unit (g = 2); -1 over Q.
    const AlgebraicInteger& fundamental_unit() const { return fundamental_unit_; }

    /// Generator of the totally positive units: eps^2 (the allowlisted fields all have N(eps) = -1).
    AlgebraicInteger totally_positive_unit() const
    {
        if (degree() == 1)
            return one();
        return fundamental_unit_ * fundamental_unit_;
    }

    /// Real embeddings (sqrt d taken positive first), for reporting and search rectangles only.
    template <class Coeff>
    std::array<double, 2> embed(const QuadraticNumber<Coeff>& x) const
    {
        double a = to_double(x.a()), b = to_double(x.b());
        if (degree() == 1)
            return {a, a};
        double s = std::sqrt(static_cast<double>(d_));
        double w1 = d_ % 4 == 1 ? (1 + s) / 2 : s;
        double w2 = d_ % 4 == 1 ? (1 - s) / 2 : -s;
        return {a + b * w1, a + b * w2};
    }

    bool operator==(const Field& o) const { return d_ == o.d_; }

private:
    static double to_double(const Integer& x) { return x.get_d(); }
    static double to_double(const Rational& x) { return x.get_d(); }

    int d_ = 1;
    FieldShape shape_{};
    Integer discriminant_ = 1;
    AlgebraicInteger fundamental_unit_;
    Rational zeta_;
};

/// Units of O_L that are totally positive, modulo squares of units.  Under the allowlist this is {1};
/// the fundamental unit having norm -1 is the witness.
inline std::vector<AlgebraicInteger> totally_positive_units_mod_squares(const Field& field)
{
    if (field.degree() == 2) {
        const AlgebraicInteger& eps = field.fundamental_unit();
        EICHLER_CHECK(norm(eps) == -1, ErrorCode::UnsupportedField,
                      "fundamental unit of Q(sqrt " + std::to_string(field.d()) + ") does not have norm -1");
    }
    return {field.one()};
}

/// All nu in O_L with nu >> 0 and trace(nu) <= bound, preceded by 0, in canonical order.
inline std::vector<AlgebraicInteger> enumerate_totally_positive(const Field& field, std::int64_t bound)
{
    EICHLER_CHECK(bound >= 0, ErrorCode::InvalidArgument, "trace bound must be nonnegative");
    std::vector<AlgebraicInteger> out{field.zero()};
    const Integer d = field.d();
    for (std::int64_t t = 1; t <= bound; ++t) {
        if (field.degree() == 1) {
            out.push_back(field.integer(t));
            continue;
        }
        Integer tt = t;
        if (field.d() % 4 == 1) {
            // nu = a + b*omega, trace = 2a + b, 4*norm = t^2 - d b^2.
            Integer bmax = isqrt(tt * tt / d) + 1;
            for (Integer b = -bmax; b <= bmax; ++b) {
                if (mod_floor(tt - b, 2) != 0 || tt * tt - d * b * b <= 0)
                    continue;
                out.push_back(field.integer((tt - b) / 2, b));
            }
        } else {
            if (t % 2 != 0)
                continue;
            Integer a = tt / 2;
            Integer bmax = isqrt(a * a / d) + 1;
            for (Integer b = -bmax; b <= bmax; ++b)
                if (a * a - d * b * b > 0)
                    out.push_back(field.integer(a, b));
        }
    }
    return out;
}

/// Euclidean division in O_L: returns q with |N(x - q y)| < |N(y)|.  All allowlisted fields are
/// norm-Euclidean; the quotient is found by a local search around x/y.
inline AlgebraicInteger euclid_quotient(const AlgebraicInteger& x, const AlgebraicInteger& y)
{
    EICHLER_CHECK(!y.is_zero(), ErrorCode::InvalidArgument, "Euclidean division by zero");
    FieldElement xi = FieldElement(x) / FieldElement(y);
    Integer a0 = floor_of(xi.a()), b0 = floor_of(xi.b());
    if (x.shape().degree == 1)
        return {x.shape(), a0};
    Integer ny = abs(norm(y));
    for (int radius = 2; radius <= 8; radius *= 2) {
        std::optional<AlgebraicInteger> best;
        Rational best_norm;
        for (int i = -radius + 1; i <= radius; ++i) {
            for (int j = -radius + 1; j <= radius; ++j) {
                AlgebraicInteger q(x.shape(), a0 + i, b0 + j);
                Rational r = abs(norm(xi - FieldElement(q)));
                if (!best || r < best_norm) {
                    best = q;
                    best_norm = r;
                }
            }
        }
        if (best_norm < 1)
            return *best;
    }
    throw Error(ErrorCode::Internal, "Euclidean step failed; field is not norm-Euclidean");
}

inline AlgebraicInteger gcd(AlgebraicInteger x, AlgebraicInteger y)
{
    while (!y.is_zero()) {
        AlgebraicInteger r = x - euclid_quotient(x, y) * y;
        x = std::move(y);
        y = std::move(r);
    }
    return x;
}

/// Canonical totally positive generator of the (fractional) ideal (x): among the totally positive
/// associates u*x, the one of minimal trace, ties broken by the smaller first coordinate.
template <class Coeff>
QuadraticNumber<Coeff> canonical_generator(const Field& field, QuadraticNumber<Coeff> x)
{
    EICHLER_CHECK(!x.is_zero(), ErrorCode::InvalidArgument, "zero has no canonical generator");
    const FieldShape s = field.shape();
    auto lift = [&](const AlgebraicInteger& u) {
        return QuadraticNumber<Coeff>(s, Coeff(u.a()), Coeff(u.b()));
    };
    if (field.degree() == 1)
        return x.a() < 0 ? -x : x;
    if (x.norm() < 0)
        x = x * lift(field.fundamental_unit());
    if (x.trace() < 0)
        x = -x;
    const auto u = lift(field.totally_positive_unit());
    const auto u_inv = lift(field.totally_positive_unit().conjugate());
    auto better = [](const QuadraticNumber<Coeff>& p, const QuadraticNumber<Coeff>& q) {
        if (p.trace() != q.trace())
            return p.trace() < q.trace();
        return p.a() < q.a();
    };
    for (;;) {
        auto up = x * u, down = x * u_inv;
        if (better(up, x))
            x = up;
        else if (better(down, x))
            x = down;
        else
            return x;
    }
}

/// Canonical generator of the ideal generated by the given elements of O_L.
inline AlgebraicInteger ideal_generator(const Field& field, const std::vector<AlgebraicInteger>& gens)
{
    AlgebraicInteger g = field.zero();
    for (const auto& x : gens)
        g = gcd(g, x);
    EICHLER_CHECK(!g.is_zero(), ErrorCode::InvalidArgument, "zero ideal");
    return canonical_generator(field, g);
}

/// Canonical generator of the fractional ideal generated by the given elements of L.
inline FieldElement fractional_ideal_generator(const Field& field, const std::vector<FieldElement>& gens)
{
    Integer den = 1;
    for (const auto& x : gens)
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.denominator().get_mpz_t());
    std::vector<AlgebraicInteger> scaled;
    for (const auto& x : gens)
        scaled.push_back((FieldElement(field.element(Rational(den))) * x).to_integer());
    AlgebraicInteger g = ideal_generator(field, scaled);
    return canonical_generator(field, FieldElement(g) * field.element(Rational(1) / Rational(den)));
}

/// True iff x divides y in O_L.
inline bool divides(const AlgebraicInteger& x, const AlgebraicInteger& y)
{
    EICHLER_CHECK(!x.is_zero(), ErrorCode::InvalidArgument, "divisibility by zero");
    return (FieldElement(y) / FieldElement(x)).is_integral();
}

/// Primes of O_L above the rational prime ell, in canonical order of their generators.
inline std::vector<PrimeIdeal> primes_above(const Field& field, std::int64_t ell)
{
    EICHLER_CHECK(is_prime(ell), ErrorCode::InvalidArgument, std::to_string(ell) + " is not prime");
    std::vector<PrimeIdeal> out;
    if (field.degree() == 1) {
        out.push_back({ell, 1, 1, field.integer(ell), ell});
        return out;
    }
    const FieldShape s = field.shape();
    std::vector<std::int64_t> roots;
    for (std::int64_t r = 0; r < ell; ++r) {
        // r^2 - t r + n == 0 mod ell
        Integer v = Integer(r) * r - Integer(s.omega_trace) * r + s.omega_norm;
        if (mod_floor(v, ell) == 0)
            roots.push_back(r);
    }
    const AlgebraicInteger L = field.integer(ell);
    if (roots.empty()) {
        out.push_back({ell, 2, 1, L, Integer(ell) * ell});
    } else if (roots.size() == 1 || field.discriminant() % ell == 0) {
        AlgebraicInteger g = ideal_generator(field, {L, field.integer(-roots[0], 1)});
        out.push_back({ell, 1, 2, g, ell});
    } else {
        for (auto r : roots) {
            AlgebraicInteger g = ideal_generator(field, {L, field.integer(-r, 1)});
            out.push_back({ell, 1, 1, g, ell});
        }
        std::sort(out.begin(), out.end(),
                  [](const PrimeIdeal& x, const PrimeIdeal& y) { return canonical_less(x.generator, y.generator); });
    }
    for (const auto& P : out)
        EICHLER_CHECK(abs(norm(P.generator)) == P.norm, ErrorCode::Internal, "prime generator has wrong norm");
    return out;
}

/// Splitting type of an unramified rational prime: one entry per prime above p.
inline std::vector<PrimeIdeal> prime_splitting(const Field& field, std::int64_t p)
{
    EICHLER_CHECK(is_prime(p), ErrorCode::CompositeP, std::to_string(p) + " is not prime");
    EICHLER_CHECK(field.discriminant() % p != 0, ErrorCode::RamifiedPrime,
                  std::to_string(p) + " ramifies in Q(sqrt " + std::to_string(field.d()) + ")");
    return primes_above(field, p);
}

/// v_P(x) for nonzero x in O_L.
inline int valuation(const AlgebraicInteger& x, const PrimeIdeal& P)
{
    EICHLER_CHECK(!x.is_zero(), ErrorCode::InvalidArgument, "valuation of zero");
    const FieldElement pi_inv = FieldElement(P.generator).inverse();
    FieldElement y(x);
    int v = 0;
    for (;;) {
        FieldElement z = y * pi_inv;
        if (!z.is_integral())
            return v;
        y = z;
        ++v;
    }
}

/// v_P(x) for nonzero x in L, via x = alpha / m with alpha in O_L and m a positive integer.
inline int valuation(const FieldElement& x, const PrimeIdeal& P)
{
    EICHLER_CHECK(!x.is_zero(), ErrorCode::InvalidArgument, "valuation of zero");
    Integer m = x.denominator();
    int vm = 0;
    while (m % P.rational_prime == 0) {
        m /= P.rational_prime;
        ++vm;
    }
    return valuation(x.numerator(), P) - P.ramification_index * vm;
}

/// Prime ideals dividing a nonzero element of L (numerator and denominator), with valuations.
inline std::vector<std::pair<PrimeIdeal, int>> factor_element(const Field& field, const FieldElement& x)
{
    EICHLER_CHECK(!x.is_zero(), ErrorCode::InvalidArgument, "cannot factor zero");
    Rational n = abs(norm(x));
    std::vector<Integer> ells;
    if (n.get_num() != 1)
        for (auto& [q, e] : factor_integer(n.get_num()))
            ells.push_back(q);
    if (n.get_den() != 1)
        for (auto& [q, e] : factor_integer(n.get_den()))
            ells.push_back(q);
    // Denominators of x can cancel in the norm only partially; include primes of the denominator.
    for (auto& [q, e] : factor_integer(x.denominator()))
        ells.push_back(q);
    std::sort(ells.begin(), ells.end());
    ells.erase(std::unique(ells.begin(), ells.end()), ells.end());
    std::vector<std::pair<PrimeIdeal, int>> out;
    for (const auto& ell : ells)
        for (const auto& P : primes_above(field, to_int64(ell))) {
            int v = valuation(x, P);
            if (v != 0)
                out.emplace_back(P, v);
        }
    return out;
}

/// Canonical generator of prod P^e.
inline FieldElement ideal_from_factorization(const Field& field, const std::vector<std::pair<PrimeIdeal, int>>& fac)
{
    FieldElement g = field.element(1);
    for (const auto& [P, e] : fac) {
        FieldElement pi(P.generator);
        FieldElement step = e >= 0 ? pi : pi.inverse();
        for (int k = 0; k < std::abs(e); ++k)
            g = g * step;
    }
    return canonical_generator(field, g);
}

} // namespace eichler
