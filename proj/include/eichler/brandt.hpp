#pragma once

// Brandt matrices b_ij(m) = a_m(M_ij) / (2 w_j), Hecke identities, and cuspidal eigenvalues.

#include "eichler/theta.hpp"

namespace eichler {

using ThetaTable = std::vector<std::vector<ThetaSeries>>;  // [i][j] = theta of conj(I_j) I_i

struct BrandtMatrix {
    AlgebraicInteger index;  // canonical generator of m
    IntMatrix entries;
};

/// Whether the canonical generator of m lies within the theta tables.
inline bool brandt_available(const Field& field, const ThetaTable& thetas, const AlgebraicInteger& m)
{
    AlgebraicInteger nu = canonical_generator(field, m);
    std::int64_t tr = field.degree() == 1 ? to_int64(nu.a()) : to_int64(nu.trace());
    return tr <= thetas[0][0].bound;
}

inline BrandtMatrix brandt(const Field& field, const std::vector<int>& weights, const ThetaTable& thetas,
                           const AlgebraicInteger& m)
{
    const std::size_t H = weights.size();
    AlgebraicInteger nu = canonical_generator(field, m);
    EICHLER_CHECK(brandt_available(field, thetas, nu), ErrorCode::CoefficientOutOfRange,
                  "index beyond the trace bound");
    BrandtMatrix b{nu, IntMatrix(H, IntVector(H))};
    for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = 0; j < H; ++j) {
            std::int64_t a = thetas[i][j].coefficient(nu);
            EICHLER_CHECK(a % (2 * weights[j]) == 0, ErrorCode::Internal,
                          "Brandt entry is not integral: a = " + std::to_string(a) + ", w = " +
                              std::to_string(weights[j]));
            b.entries[i][j] = a / (2 * weights[j]);
        }
    return b;
}

struct HeckeCheck {
    std::string name;
    bool passed = true;
    std::string detail;
};

struct HeckeReport {
    std::vector<HeckeCheck> checks;
    std::size_t skipped = 0;  // identities whose indices exceed the trace bound

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const HeckeCheck& c) { return c.passed; });
    }
};

namespace detail {

inline std::string gen_string(const AlgebraicInteger& x)
{
    return x.shape().degree == 1 ? x.a().get_str() : "(" + x.a().get_str() + "," + x.b().get_str() + ")";
}

inline IntMatrix int_sub(IntMatrix a, const IntMatrix& b, const Integer& s = 1)
{
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a.size(); ++j)
            a[i][j] -= s * b[i][j];
    return a;
}

} // namespace detail

/// Sum of N(d) over the ideal divisors d of (m) prime to p.
inline Integer eisenstein_eigenvalue(const Field& field, const AlgebraicInteger& m, std::int64_t p)
{
    auto fac = factor_element(field, FieldElement(m));
    Integer total = 1;
    for (const auto& [P, e] : fac) {
        if (P.rational_prime == p)
            continue;
        Integer s = 0, pw = 1;
        for (int k = 0; k <= e; ++k) {
            s += pw;
            pw *= P.norm;
        }
        total *= s;
    }
    return total;
}

/* Commutation, coprime multiplicativity, the prime-power recursion, row sums
 * N(q) + 1, Eisenstein eigenvalues, self-adjointness b_ij w_j = b_ji w_i, and
 * the identity B(1) = 1, for the given primes (all prime to p).
 */
inline HeckeReport hecke_property_suite(const Field& field, const std::vector<int>& weights,
                                        const ThetaTable& thetas, const std::vector<PrimeIdeal>& primes,
                                        std::int64_t p)
{
    HeckeReport rep;
    const std::size_t H = weights.size();
    auto add = [&](std::string name, bool ok, std::string detail = "") {
        rep.checks.push_back({std::move(name), ok, std::move(detail)});
    };
    auto get = [&](const AlgebraicInteger& m) -> std::optional<IntMatrix> {
        if (!brandt_available(field, thetas, m))
            return std::nullopt;
        return brandt(field, weights, thetas, m).entries;
    };
    auto pow = [&](const AlgebraicInteger& x, int k) {
        AlgebraicInteger r = field.one();
        for (int i = 0; i < k; ++i)
            r = r * x;
        return r;
    };

    add("identity", *get(field.one()) == int_identity(H));
    std::vector<IntMatrix> bq;
    for (const auto& P : primes) {
        EICHLER_CHECK(P.rational_prime != p, ErrorCode::BadPrime, "Hecke prime divides p");
        auto b = get(P.generator);
        EICHLER_CHECK(b.has_value(), ErrorCode::CoefficientOutOfRange,
                      "prime " + detail::gen_string(P.generator) + " exceeds the trace bound");
        bq.push_back(*b);
        const std::string tag = detail::gen_string(P.generator);
        bool rows = true;
        for (std::size_t i = 0; i < H; ++i) {
            Integer s = 0;
            for (std::size_t j = 0; j < H; ++j)
                s += (*b)[i][j];
            rows = rows && s == P.norm + 1;
        }
        add("row_sums " + tag, rows);
        bool adj = true;
        for (std::size_t i = 0; i < H; ++i)
            for (std::size_t j = 0; j < H; ++j)
                adj = adj && (*b)[i][j] * weights[j] == (*b)[j][i] * weights[i];
        add("self_adjoint " + tag, adj);
        // Prime-power recursion B(q^{k+1}) = B(q^k) B(q) - N(q) B(q^{k-1}).
        IntMatrix prev = int_identity(H), cur = *b;
        for (int k = 1;; ++k) {
            AlgebraicInteger next_index = pow(P.generator, k + 1);
            auto next = get(next_index);
            if (!next) {
                ++rep.skipped;
                break;
            }
            IntMatrix rhs = detail::int_sub(mat_mul(cur, *b), prev, P.norm);
            add("power_recursion " + tag + "^" + std::to_string(k + 1), *next == rhs);
            Integer ev = eisenstein_eigenvalue(field, next_index, p);
            bool eis = true;
            for (std::size_t i = 0; i < H; ++i) {
                Integer s = 0;
                for (std::size_t j = 0; j < H; ++j)
                    s += (*next)[i][j];
                eis = eis && s == ev;
            }
            add("eisenstein " + tag + "^" + std::to_string(k + 1), eis);
            prev = cur;
            cur = *next;
        }
    }
    for (std::size_t a = 0; a < primes.size(); ++a)
        for (std::size_t b = a + 1; b < primes.size(); ++b) {
            const std::string tag = detail::gen_string(primes[a].generator) + "*" +
                                    detail::gen_string(primes[b].generator);
            add("commute " + tag, mat_mul(bq[a], bq[b]) == mat_mul(bq[b], bq[a]));
            auto prod = get(primes[a].generator * primes[b].generator);
            if (!prod) {
                ++rep.skipped;
                continue;
            }
            add("multiplicative " + tag, *prod == mat_mul(bq[a], bq[b]));
        }
    return rep;
}

struct CuspidalSpectrum {
    IntPoly charpoly;        // of B(q), low to high
    IntPoly cuspidal_poly;   // charpoly / (x - (N(q) + 1))
    std::vector<Rational> rational_eigenvalues;
    std::vector<RootInterval> irrational_eigenvalues;
    bool ramanujan = true;
};

inline IntPoly to_int_poly(const RatPoly& p)
{
    IntPoly out;
    for (const auto& c : p) {
        EICHLER_CHECK(c.get_den() == 1, ErrorCode::Internal, "characteristic polynomial is not integral");
        out.push_back(c.get_num());
    }
    return out;
}

/* Eigenvalues of B(q) on the complement of the Eisenstein vector: rational
 * roots exactly, the rest as isolating intervals of width at most 2^-30.
 */
inline CuspidalSpectrum cuspidal_eigenvalues(const BrandtMatrix& b, const Integer& norm_q)
{
    CuspidalSpectrum out;
    RatPoly cp = charpoly(to_rational(b.entries));
    out.charpoly = to_int_poly(cp);
    auto [q, r] = poly_divmod(cp, RatPoly{-Rational(norm_q + 1), 1});
    EICHLER_CHECK(r.empty(), ErrorCode::Internal, "Eisenstein eigenvalue missing from the spectrum");
    out.cuspidal_poly = to_int_poly(q);
    auto [roots, rest] = split_rational_roots(q);
    std::sort(roots.begin(), roots.end());
    out.rational_eigenvalues = roots;
    out.irrational_eigenvalues = isolate_real_roots(rest, Rational(1, 1 << 30));
    const Rational four_n = 4 * Rational(norm_q);
    for (const auto& x : roots)
        out.ramanujan = out.ramanujan && x * x <= four_n;
    for (const auto& iv : out.irrational_eigenvalues) {
        Rational m = std::max(abs(iv.lo), abs(iv.hi));
        out.ramanujan = out.ramanujan && m * m <= four_n;
    }
    return out;
}

} // namespace eichler
