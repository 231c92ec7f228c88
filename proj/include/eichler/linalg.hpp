#pragma once

// Exact linear algebra over Z and Q: Hermite normal form, triangular solves, inverses,
// fraction-free rank, LLL on Gram matrices, characteristic polynomials and real-root isolation.

#include "eichler/common.hpp"

#include <algorithm>
#include <optional>

namespace eichler {

using IntVector = std::vector<Integer>;
using IntMatrix = std::vector<IntVector>;
using RatVector = std::vector<Rational>;
using RatMatrix = std::vector<RatVector>;

inline IntMatrix int_identity(std::size_t n)
{
    IntMatrix m(n, IntVector(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        m[i][i] = 1;
    return m;
}

inline RatMatrix rat_identity(std::size_t n)
{
    RatMatrix m(n, RatVector(n, 0));
    for (std::size_t i = 0; i < n; ++i)
        m[i][i] = 1;
    return m;
}

inline RatMatrix to_rational(const IntMatrix& m)
{
    RatMatrix r(m.size());
    for (std::size_t i = 0; i < m.size(); ++i)
        r[i] = RatVector(m[i].begin(), m[i].end());
    return r;
}

template <class T>
std::vector<std::vector<T>> mat_mul(const std::vector<std::vector<T>>& a, const std::vector<std::vector<T>>& b)
{
    const std::size_t n = a.size(), m = b.empty() ? 0 : b[0].size(), k = b.size();
    std::vector<std::vector<T>> c(n, std::vector<T>(m, T(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l) {
            if (a[i][l] == 0)
                continue;
            for (std::size_t j = 0; j < m; ++j)
                c[i][j] += a[i][l] * b[l][j];
        }
    return c;
}

template <class T>
std::vector<std::vector<T>> transpose(const std::vector<std::vector<T>>& a)
{
    if (a.empty())
        return {};
    std::vector<std::vector<T>> t(a[0].size(), std::vector<T>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j)
            t[j][i] = a[i][j];
    return t;
}

/* Incremental row Hermite normal form of a full-rank integer lattice.
 *
 * Rows are stored by pivot column; the result is upper triangular with positive
 * pivots and entries above each pivot reduced into [0, pivot).  Every row that
 * changes is size-reduced against the later pivots to keep entries bounded.
 */
class HermiteBuilder {
public:
    explicit HermiteBuilder(std::size_t n) : n_(n), rows_(n) {}

    void insert(IntVector v)
    {
        EICHLER_CHECK(v.size() == n_, ErrorCode::Internal, "HNF dimension mismatch");
        for (std::size_t c = 0; c < n_; ++c) {
            if (v[c] == 0)
                continue;
            if (!rows_[c]) {
                if (v[c] < 0)
                    for (auto& x : v)
                        x = -x;
                size_reduce(v, c);
                rows_[c] = std::move(v);
                ++rank_;
                return;
            }
            IntVector& h = *rows_[c];
            Integer g, s, t;
            mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), h[c].get_mpz_t(), v[c].get_mpz_t());
            Integer hc = h[c] / g, vc = v[c] / g;
            IntVector nh(n_), nv(n_);
            for (std::size_t k = c; k < n_; ++k) {
                nh[k] = s * h[k] + t * v[k];
                nv[k] = hc * v[k] - vc * h[k];
            }
            h = std::move(nh);
            v = std::move(nv);
            if (h[c] < 0)
                for (auto& x : h)
                    x = -x;
            size_reduce(h, c);
            size_reduce(v, c);
        }
    }

    std::size_t rank() const { return rank_; }

    /// Upper-triangular HNF; requires full rank.
    IntMatrix result() const
    {
        EICHLER_CHECK(rank_ == n_, ErrorCode::Internal, "lattice is not of full rank");
        IntMatrix h(n_);
        for (std::size_t i = 0; i < n_; ++i)
            h[i] = *rows_[i];
        for (std::size_t i = 0; i < n_; ++i) {
            const Integer& p = h[i][i];
            for (std::size_t j = 0; j < i; ++j) {
                Integer q = floor_div(h[j][i], p);
                if (q != 0)
                    for (std::size_t k = i; k < n_; ++k)
                        h[j][k] -= q * h[i][k];
            }
        }
        return h;
    }

private:
    void size_reduce(IntVector& v, std::size_t c) const
    {
        for (std::size_t k = c + 1; k < n_; ++k) {
            if (!rows_[k] || v[k] == 0)
                continue;
            const IntVector& r = *rows_[k];
            Integer q = floor_div(v[k], r[k]);
            if (q != 0)
                for (std::size_t j = k; j < n_; ++j)
                    v[j] -= q * r[j];
        }
    }

    std::size_t n_;
    std::vector<std::optional<IntVector>> rows_;
    std::size_t rank_ = 0;
};

inline IntMatrix hermite_normal_form(const IntMatrix& gens, std::size_t n)
{
    HermiteBuilder b(n);
    for (const auto& g : gens)
        b.insert(g);
    return b.result();
}

/// Coordinates c with c * H = v for an upper-triangular nonsingular H.
inline RatVector solve_upper(const IntMatrix& h, RatVector v)
{
    const std::size_t n = h.size();
    RatVector c(n);
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = v[i] / Rational(h[i][i]);
        if (c[i] != 0)
            for (std::size_t k = i; k < n; ++k)
                v[k] -= c[i] * h[i][k];
    }
    return c;
}

inline std::optional<RatMatrix> rat_inverse(RatMatrix a)
{
    const std::size_t n = a.size();
    RatMatrix inv = rat_identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0)
            ++p;
        if (p == n)
            return std::nullopt;
        std::swap(a[p], a[c]);
        std::swap(inv[p], inv[c]);
        Rational piv = a[c][c];
        for (std::size_t k = 0; k < n; ++k) {
            a[c][k] /= piv;
            inv[c][k] /= piv;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0)
                continue;
            Rational f = a[r][c];
            for (std::size_t k = 0; k < n; ++k) {
                a[r][k] -= f * a[c][k];
                inv[r][k] -= f * inv[c][k];
            }
        }
    }
    return inv;
}

inline Rational rat_det(RatMatrix a)
{
    const std::size_t n = a.size();
    Rational det = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0)
            ++p;
        if (p == n)
            return 0;
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            if (a[r][c] == 0)
                continue;
            Rational f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k)
                a[r][k] -= f * a[c][k];
        }
    }
    return det;
}

struct RankResult {
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_columns;
};

/// Fraction-free (Bareiss) elimination; pivots chosen as the first nonzero entry column by column.
inline RankResult bareiss_rank(IntMatrix a)
{
    RankResult out;
    if (a.empty())
        return out;
    const std::size_t rows = a.size(), cols = a[0].size();
    Integer prev = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0)
            ++p;
        if (p == rows)
            continue;
        std::swap(a[p], a[r]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            for (std::size_t k = c + 1; k < cols; ++k) {
                a[i][k] = a[r][c] * a[i][k] - a[i][c] * a[r][k];
                mpz_divexact(a[i][k].get_mpz_t(), a[i][k].get_mpz_t(), prev.get_mpz_t());
            }
            a[i][c] = 0;
        }
        prev = a[r][c];
        out.pivot_columns.push_back(c);
        ++r;
    }
    out.rank = r;
    return out;
}

/// Rank over Q of a rational matrix (rows are scaled to integers first).
inline RankResult rational_rank(const RatMatrix& a)
{
    IntMatrix m;
    m.reserve(a.size());
    for (const auto& row : a) {
        Integer den = 1;
        for (const auto& x : row)
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
        IntVector r;
        r.reserve(row.size());
        for (const auto& x : row) {
            Rational y = x * den;
            r.push_back(y.get_num());
        }
        m.push_back(std::move(r));
    }
    return bareiss_rank(std::move(m));
}

inline Integer int_det(const IntMatrix& a)
{
    Rational d = rat_det(to_rational(a));
    return d.get_num();
}

/* LLL reduction (delta = 3/4) of a positive definite Gram matrix.
 *
 * Returns the unimodular U such that U * G * U^T is reduced.  Dimensions here
 * are at most 8, so the Gram-Schmidt data is recomputed exactly after every
 * change.
 */
inline IntMatrix lll_gram(IntMatrix g)
{
    const std::size_t n = g.size();
    IntMatrix u = int_identity(n);
    if (n <= 1)
        return u;
    RatMatrix mu(n, RatVector(n, 0));
    RatVector bstar(n, 0);
    auto gso = [&] {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                Rational s = g[i][j];
                for (std::size_t k = 0; k < j; ++k)
                    s -= mu[j][k] * mu[i][k] * bstar[k];
                mu[i][j] = s / bstar[j];
            }
            Rational s = g[i][i];
            for (std::size_t k = 0; k < i; ++k)
                s -= mu[i][k] * mu[i][k] * bstar[k];
            bstar[i] = s;
            EICHLER_CHECK(s > 0, ErrorCode::Internal, "LLL input is not positive definite");
        }
    };
    auto recompute_row = [&](std::size_t k, std::size_t j, const Integer& q) {
        // New b_k = b_k - q b_j: G'[k][c] = G[k][c] - q G[j][c], G'[k][k] = G[k][k] - 2q G[k][j] + q^2 G[j][j].
        Integer gkk = g[k][k] - 2 * q * g[k][j] + q * q * g[j][j];
        for (std::size_t c = 0; c < n; ++c)
            if (c != k)
                g[k][c] -= q * g[j][c];
        for (std::size_t c = 0; c < n; ++c)
            if (c != k)
                g[c][k] = g[k][c];
        g[k][k] = gkk;
        for (std::size_t c = 0; c < n; ++c)
            u[k][c] -= q * u[j][c];
    };
    gso();
    const Rational delta(3, 4);
    std::size_t k = 1;
    while (k < n) {
        for (std::size_t jj = k; jj-- > 0;) {
            if (abs(mu[k][jj]) > Rational(1, 2)) {
                Integer q = round_of(mu[k][jj]);
                recompute_row(k, jj, q);
                gso();
            }
        }
        if (bstar[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1]) {
            ++k;
        } else {
            std::swap(u[k], u[k - 1]);
            std::swap(g[k], g[k - 1]);
            for (auto& row : g)
                std::swap(row[k], row[k - 1]);
            gso();
            k = std::max<std::size_t>(k - 1, 1);
        }
    }
    return u;
}

// ---------------------------------------------------------------------------
// Polynomials, coefficients low to high.

using IntPoly = std::vector<Integer>;
using RatPoly = std::vector<Rational>;

inline void trim(RatPoly& p)
{
    while (!p.empty() && p.back() == 0)
        p.pop_back();
}

inline void trim(IntPoly& p)
{
    while (!p.empty() && p.back() == 0)
        p.pop_back();
}

/// Characteristic polynomial det(xI - A) by Faddeev-LeVerrier; exact over Q.
inline RatPoly charpoly(const RatMatrix& a)
{
    const std::size_t n = a.size();
    RatPoly c(n + 1, 0);
    c[n] = 1;
    RatMatrix m(n, RatVector(n, 0));
    for (std::size_t k = 1; k <= n; ++k) {
        // M_k = A M_{k-1} + c_{n-k+1} I
        RatMatrix am = mat_mul(a, m);
        for (std::size_t i = 0; i < n; ++i)
            am[i][i] += c[n - k + 1];
        m = std::move(am);
        RatMatrix prod = mat_mul(a, m);
        Rational tr = 0;
        for (std::size_t i = 0; i < n; ++i)
            tr += prod[i][i];
        c[n - k] = -tr / Rational(static_cast<long>(k));
    }
    return c;
}

inline Rational poly_eval(const RatPoly& p, const Rational& x)
{
    Rational r = 0;
    for (std::size_t i = p.size(); i-- > 0;)
        r = r * x + p[i];
    return r;
}

/// Quotient and remainder of a / b over Q.
inline std::pair<RatPoly, RatPoly> poly_divmod(RatPoly a, RatPoly b)
{
    trim(a);
    trim(b);
    EICHLER_CHECK(!b.empty(), ErrorCode::InvalidArgument, "polynomial division by zero");
    if (a.size() < b.size())
        return {RatPoly{}, a};
    RatPoly q(a.size() - b.size() + 1, 0);
    for (std::size_t i = q.size(); i-- > 0;) {
        Rational f = a[i + b.size() - 1] / b.back();
        q[i] = f;
        for (std::size_t j = 0; j < b.size(); ++j)
            a[i + j] -= f * b[j];
    }
    trim(a);
    return {q, a};
}

inline RatPoly poly_derivative(const RatPoly& p)
{
    RatPoly d;
    for (std::size_t i = 1; i < p.size(); ++i)
        d.push_back(p[i] * Rational(static_cast<long>(i)));
    trim(d);
    return d;
}

inline RatPoly poly_gcd(RatPoly a, RatPoly b)
{
    trim(a);
    trim(b);
    while (!b.empty()) {
        RatPoly r = poly_divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Rational lc = a.back();
        for (auto& x : a)
            x /= lc;
    }
    return a;
}

/// Rational roots of p (with multiplicity) and the cofactor with no rational roots.
inline std::pair<std::vector<Rational>, RatPoly> split_rational_roots(RatPoly p)
{
    trim(p);
    std::vector<Rational> roots;
    for (;;) {
        if (p.size() <= 1)
            break;
        // Clear denominators; candidates are r/s with r | a0, s | an.
        Integer den = 1;
        for (const auto& x : p)
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), x.get_den_mpz_t());
        IntPoly ip;
        for (const auto& x : p) {
            Rational y = x * den;
            ip.push_back(y.get_num());
        }
        std::optional<Rational> found;
        if (ip[0] == 0) {
            found = Rational(0);
        } else {
            auto divisors = [](Integer n) {
                std::vector<Integer> ds{1};
                for (auto& [q, e] : factor_integer(n)) {
                    std::size_t m = ds.size();
                    Integer pw = 1;
                    for (int i = 0; i < e; ++i) {
                        pw *= q;
                        for (std::size_t j = 0; j < m; ++j)
                            ds.push_back(ds[j] * pw);
                    }
                }
                std::sort(ds.begin(), ds.end());
                return ds;
            };
            for (const auto& r : divisors(ip[0])) {
                for (const auto& s : divisors(ip.back())) {
                    for (int sign : {1, -1}) {
                        Rational cand(Integer(sign) * r, s);
                        cand.canonicalize();
                        if (poly_eval(p, cand) == 0) {
                            found = cand;
                            break;
                        }
                    }
                    if (found)
                        break;
                }
                if (found)
                    break;
            }
        }
        if (!found)
            break;
        roots.push_back(*found);
        p = poly_divmod(p, RatPoly{-*found, 1}).first;
    }
    std::sort(roots.begin(), roots.end());
    return {roots, p};
}

/// Number of sign changes in the Sturm chain evaluated at x.
inline int sturm_sign_changes(const std::vector<RatPoly>& chain, const Rational& x)
{
    int changes = 0, last = 0;
    for (const auto& p : chain) {
        Rational v = poly_eval(p, x);
        int s = sgn(v);
        if (s == 0)
            continue;
        if (last != 0 && s != last)
            ++changes;
        last = s;
    }
    return changes;
}

struct RootInterval {
    Rational lo, hi;  // root lies in [lo, hi]
};

/* Isolates the distinct real roots of p into intervals of width at most eps
 * using a Sturm chain of the square-free part and exact bisection.
 */
inline std::vector<RootInterval> isolate_real_roots(RatPoly p, const Rational& eps)
{
    trim(p);
    std::vector<RootInterval> out;
    if (p.size() <= 1)
        return out;
    RatPoly g = poly_gcd(p, poly_derivative(p));
    RatPoly sf = poly_divmod(p, g).first;
    std::vector<RatPoly> chain{sf, poly_derivative(sf)};
    while (chain.back().size() > 1) {
        RatPoly r = poly_divmod(chain[chain.size() - 2], chain.back()).second;
        if (r.empty())
            break;
        for (auto& x : r)
            x = -x;
        chain.push_back(r);
    }
    // Cauchy bound.
    Rational bound = 0;
    for (std::size_t i = 0; i + 1 < sf.size(); ++i)
        bound = std::max(bound, Rational(abs(sf[i] / sf.back())));
    bound += 1;
    std::vector<RootInterval> stack{{-bound, bound}};
    while (!stack.empty()) {
        RootInterval iv = stack.back();
        stack.pop_back();
        int count = sturm_sign_changes(chain, iv.lo) - sturm_sign_changes(chain, iv.hi);
        if (count == 0)
            continue;
        if (count == 1 && iv.hi - iv.lo <= eps) {
            out.push_back(iv);
            continue;
        }
        Rational mid = (iv.lo + iv.hi) / 2;
        if (poly_eval(sf, mid) == 0) {
            out.push_back({mid, mid});
            // Exclude the exact root from both halves by shrinking slightly.
            Rational tiny = (iv.hi - iv.lo) / 1024;
            while (sturm_sign_changes(chain, mid - tiny) - sturm_sign_changes(chain, mid + tiny) != 1)
                tiny /= 2;
            stack.push_back({iv.lo, mid - tiny});
            stack.push_back({mid + tiny, iv.hi});
            continue;
        }
        stack.push_back({mid, iv.hi});
        stack.push_back({iv.lo, mid});
    }
    std::sort(out.begin(), out.end(), [](const RootInterval& a, const RootInterval& b) { return a.lo < b.lo; });
    return out;
}

} // namespace eichler
