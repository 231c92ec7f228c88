#pragma once

// Independent reference computations used by the tests.

#include "eichler/brandt.hpp"

#include <map>

namespace oracle {

using namespace eichler;

/* Theta coefficients by scanning a box of Z-coordinates.  The Gram is rebuilt from
 * reduced norms by polarization, and the box radius |x_k| <= sqrt(2 B (G^-1)_kk) is
 * certified for the trace form G.  Keys are (a, b) of Q(x) = a + b omega.
 */
inline std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t>
box_theta(const Field& field, const QuaternionLattice& lat, const FieldElement& n, std::int64_t bound)
{
    std::vector<QuaternionElement> basis = lat.z_basis();
    const std::size_t r = basis.size();
    const FieldElement ninv = n.inverse();
    std::vector<std::vector<std::int64_t>> ga, gb;
    IntMatrix tr;
    auto grams = [&] {
        ga.assign(r, std::vector<std::int64_t>(r));
        gb = ga;
        tr.assign(r, IntVector(r));
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) {
                FieldElement v = ((basis[i] + basis[j]).reduced_norm() - basis[i].reduced_norm() -
                                  basis[j].reduced_norm()) *
                                 ninv;
                ga[i][j] = to_int64(v.a().get_num());
                gb[i][j] = to_int64(v.b().get_num());
                tr[i][j] = field.degree() == 1 ? Integer(ga[i][j]) : Integer(to_int64(v.trace().get_num()));
            }
    };
    grams();
    // A reduced basis keeps the box small; the counts do not depend on the basis.
    IntMatrix u = lll_gram(tr);
    std::vector<QuaternionElement> reduced;
    for (std::size_t i = 0; i < r; ++i) {
        QuaternionElement x = basis[0].scaled(FieldElement(field.shape(), 0));
        for (std::size_t j = 0; j < r; ++j)
            x = x + basis[j].scaled(FieldElement(field.shape(), Rational(u[i][j])));
        reduced.push_back(x);
    }
    basis = reduced;
    grams();

    RatMatrix inv = *rat_inverse(to_rational(tr));
    std::vector<std::int64_t> rad(r);
    for (std::size_t k = 0; k < r; ++k)
        rad[k] = to_int64(isqrt(floor_of(Rational(2 * bound) * inv[k][k])));

    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> out;
    std::vector<std::int64_t> x(r);
    for (std::size_t k = 0; k < r; ++k)
        x[k] = -rad[k];
    for (;;) {
        std::int64_t a = 0, b = 0;
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j) {
                a += ga[i][j] * x[i] * x[j];
                b += gb[i][j] * x[i] * x[j];
            }
        a /= 2;
        b /= 2;
        std::int64_t t = field.degree() == 1 ? a : 2 * a + field.shape().omega_trace * b;
        if (t <= bound)
            ++out[{a, b}];
        std::size_t k = 0;
        while (k < r && x[k] == rad[k]) {
            x[k] = -rad[k];
            ++k;
        }
        if (k == r)
            break;
        ++x[k];
    }
    return out;
}

/// Coefficients c_1..c_n of q prod_{k>=1} (1 - q^k)^2 (1 - q^{11k})^2.
inline std::vector<std::int64_t> eta_11(std::size_t n)
{
    std::vector<std::int64_t> c(n + 1, 0);
    c[0] = 1;
    auto times = [&](std::size_t k) {
        for (std::size_t m = n; m >= k; --m)
            c[m] -= c[m - k];
    };
    for (std::size_t k = 1; k <= n; ++k) {
        times(k);
        times(k);
        if (11 * k <= n) {
            times(11 * k);
            times(11 * k);
        }
    }
    std::vector<std::int64_t> out(n + 1, 0);
    for (std::size_t m = 1; m <= n; ++m)
        out[m] = c[m - 1];
    return out;
}

/// Genus of X_0(p) from the elliptic point counts.
inline int genus_x0(std::int64_t p)
{
    if (p == 2 || p == 3)
        return 0;
    int nu2 = p % 4 == 1 ? 2 : 0;
    int nu3 = p % 3 == 1 ? 2 : 0;
    // 12 g = 12 + (p + 1) - 3 nu2 - 4 nu3 - 6 * (2 cusps)
    return static_cast<int>((p + 1 - 3 * nu2 - 4 * nu3) / 12);
}

} // namespace oracle
