#pragma once

// Orders and left ideals in B_{p,L}: the standard Eichler order of level p, reduced
// discriminants, ideal norms, neighbors, isomorphism testing, unit weights, the
// mass formula, ideal-class enumeration, and the level-one maximal order.

#include "eichler/enumeration.hpp"
#include "eichler/lattice.hpp"

#include <map>
#include <memory>
#include <set>

namespace eichler {

enum class OrderMode { LevelP, LevelOne };

inline std::string_view to_string(OrderMode m) { return m == OrderMode::LevelP ? "level_p" : "level_one"; }

/// Finite discriminant D and level N of the orders produced for a given mode.
struct LevelData {
    std::vector<PrimeIdeal> discriminant;
    std::vector<PrimeIdeal> level;
};

inline LevelData level_data(const Field& field, std::int64_t p, OrderMode mode)
{
    LevelData out;
    for (const auto& P : primes_above(field, p)) {
        if (P.residue_degree % 2 == 1)
            out.discriminant.push_back(P);
        else if (mode == OrderMode::LevelP)
            out.level.push_back(P);
    }
    if (mode == OrderMode::LevelOne)
        EICHLER_CHECK(out.discriminant.empty(), ErrorCode::LevelOneImpossible,
                      "a prime above " + std::to_string(p) + " has odd residue degree");
    return out;
}

/// The two rational quadratic forms alpha, beta with Nrd(x)/n = alpha(x) + beta(x) omega on a Z-basis.
struct NormForm {
    IntMatrix alpha;   // Gram with even diagonal: alpha(x) = x^T A x / 2
    IntMatrix beta;    // zero matrix when g = 1
    IntMatrix trace;   // Gram of Tr_{L/Q}(Nrd(x)/n): alpha for g = 1, 2 alpha + t beta for g = 2
};

inline NormForm norm_form(const QuaternionLattice& lat, const FieldElement& n)
{
    const std::size_t r = lat.rank();
    const int g = lat.shape().field.degree;
    const int t = lat.shape().field.omega_trace;
    auto basis = lat.z_basis();
    std::vector<QuaternionElement> conj;
    for (const auto& b : basis)
        conj.push_back(b.conjugate());
    const FieldElement ninv = n.inverse();
    NormForm f{IntMatrix(r, IntVector(r)), IntMatrix(r, IntVector(r)), IntMatrix(r, IntVector(r))};
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = a; b < r; ++b) {
            FieldElement v = (basis[a] * conj[b]).reduced_trace() * ninv;
            EICHLER_CHECK(v.is_integral(), ErrorCode::Internal, "norm form is not integral on the lattice");
            Integer al = v.a().get_num(), be = v.b().get_num();
            f.alpha[a][b] = f.alpha[b][a] = al;
            f.beta[a][b] = f.beta[b][a] = be;
            f.trace[a][b] = f.trace[b][a] = g == 1 ? al : Integer(2 * al + t * be);
        }
    return f;
}

inline bool is_order(const QuaternionLattice& lat)
{
    const FieldShape fs = lat.shape().field;
    if (!lat.contains(QuaternionElement::scalar(lat.shape(), FieldElement(fs, 1))) || !lat.is_ol_stable())
        return false;
    auto basis = lat.z_basis();
    for (const auto& x : basis) {
        if (!x.reduced_norm().is_integral() || !x.reduced_trace().is_integral())
            return false;
        for (const auto& y : basis)
            if (!lat.contains(x * y))
                return false;
    }
    return true;
}

/// Determinant of a square matrix over L.
inline FieldElement field_det(std::vector<std::vector<FieldElement>> a, FieldShape fs)
{
    const std::size_t n = a.size();
    FieldElement det(fs, 1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c].is_zero())
            ++p;
        if (p == n)
            return FieldElement(fs, 0);
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det = det * a[c][c];
        FieldElement inv = a[c][c].inverse();
        for (std::size_t r = c + 1; r < n; ++r) {
            if (a[r][c].is_zero())
                continue;
            FieldElement f = a[r][c] * inv;
            for (std::size_t k = c; k < n; ++k)
                a[r][k] = a[r][k] - f * a[c][k];
        }
    }
    return det;
}

/* Canonical generator of the reduced discriminant d(O), where
 * d(O)^2 = det(Trd(e_a conj(e_b))) for an O_L-basis e of O.
 */
inline FieldElement reduced_discriminant(const Field& field, const QuaternionLattice& order)
{
    EICHLER_CHECK(is_order(order), ErrorCode::NotAnOrder, "lattice is not an order");
    auto e = order.ol_basis();
    std::vector<std::vector<FieldElement>> g(4, std::vector<FieldElement>(4));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            g[a][b] = (e[a] * e[b].conjugate()).reduced_trace();
    FieldElement det = field_det(g, field.shape());
    EICHLER_CHECK(det.is_integral() && !det.is_zero(), ErrorCode::NotAnOrder, "discriminant is not integral");
    auto fac = factor_element(field, det);
    for (auto& [P, v] : fac) {
        EICHLER_CHECK(v % 2 == 0, ErrorCode::NotAnOrder, "discriminant is not a square ideal");
        v /= 2;
    }
    return ideal_from_factorization(field, fac);
}

/// Canonical generator of the O_L-ideal generated by {Nrd(x) : x in lat}.
inline FieldElement ideal_norm(const Field& field, const QuaternionLattice& lat)
{
    auto basis = lat.z_basis();
    std::vector<FieldElement> gens;
    for (std::size_t a = 0; a < basis.size(); ++a) {
        gens.push_back(basis[a].reduced_norm());
        for (std::size_t b = a + 1; b < basis.size(); ++b)
            gens.push_back((basis[a] * basis[b].conjugate()).reduced_trace());
    }
    return fractional_ideal_generator(field, gens);
}

inline QuaternionLattice left_order(const QuaternionLattice& I)
{
    std::vector<QuaternionLattice> parts;
    for (const auto& b : I.z_basis())
        parts.push_back(I.right_multiply(b.inverse()));
    return intersect(parts);
}

inline QuaternionLattice right_order(const QuaternionLattice& I)
{
    std::vector<QuaternionLattice> parts;
    for (const auto& b : I.z_basis())
        parts.push_back(I.left_multiply(b.inverse()));
    return intersect(parts);
}

/// Rational basis of the classical maximal order of B_{p,oo} for the presentation table.
inline std::vector<QuaternionElement> classical_order_basis(const QuaternionAlgebra& B)
{
    const std::int64_t p = B.p();
    auto r = [&](Rational t, Rational x, Rational y, Rational z) { return B.rational(t, x, y, z); };
    const Rational h(1, 2), q4(1, 4);
    if (p == 2)
        return {r(1, 0, 0, 0), r(0, 1, 0, 0), r(0, 0, 1, 0), r(h, h, h, h)};
    if (p % 4 == 3)
        return {r(1, 0, 0, 0), r(0, 1, 0, 0), r(h, 0, h, 0), r(0, h, 0, h)};
    if (p % 8 == 5)
        return {r(h, 0, h, h), r(0, q4, h, q4), r(0, 0, 1, 0), r(0, 0, 0, 1)};
    const std::int64_t q = B.auxiliary_prime();
    std::int64_t c = 0;
    while ((c * c * p + 1) % q != 0)
        ++c;
    return {r(h, 0, h, 0), r(0, h, 0, h), r(0, 0, Rational(1, q), Rational(c, q)), r(0, 0, 0, 1)};
}

/// O_B (x) O_L for the classical maximal order O_B, certified to have reduced discriminant (p).
inline QuaternionLattice standard_order(const QuaternionAlgebra& B)
{
    auto O = QuaternionLattice::from_ol_generators(B.shape(), classical_order_basis(B));
    EICHLER_CHECK(is_order(O), ErrorCode::NotAnOrder, "classical basis does not span an order");
    FieldElement d = reduced_discriminant(B.field(), O);
    EICHLER_CHECK(d == B.field().element(B.p()), ErrorCode::NotAnOrder,
                  "standard order has reduced discriminant " + to_string(d.a()) + "," + to_string(d.b()));
    return O;
}

/// Number of Nrd-one elements up to sign, #(O^x / O_L^x); valid because O_L^{x,+} = (O_L^x)^2.
inline int unit_weight(const Field& field, const QuaternionLattice& order)
{
    NormForm f = norm_form(order, field.element(1));
    ShortVectorEnumerator en(f.trace);
    std::vector<Vec64> alpha = en.reduce_form(f.alpha), beta = en.reduce_form(f.beta);
    auto form = [](const std::vector<Vec64>& g, const Vec64& y) {
        __int128 s = 0;
        for (std::size_t i = 0; i < y.size(); ++i)
            for (std::size_t j = 0; j < y.size(); ++j)
                s += static_cast<__int128>(g[i][j]) * y[i] * y[j];
        return static_cast<std::int64_t>(s / 2);
    };
    int count = 0;
    en.for_each(field.degree(), [&](const Vec64& y, std::int64_t) {
        if (form(alpha, y) == 1 && form(beta, y) == 0)
            ++count;
    });
    return count;
}

/// 2^{1-g} |zeta_L(-1)| prod_{P | D} (NP - 1) prod_{P | N} (NP + 1).
inline Rational mass_formula(const Field& field, std::int64_t p, OrderMode mode)
{
    LevelData ld = level_data(field, p, mode);
    Rational m = field.zeta_minus_one();
    if (field.degree() == 2)
        m /= 2;
    for (const auto& P : ld.discriminant)
        m *= Rational(P.norm - 1);
    for (const auto& P : ld.level)
        m *= Rational(P.norm + 1);
    m.canonicalize();
    return m;
}

struct LeftIdeal {
    QuaternionLattice lattice;
    FieldElement norm;
};

inline LeftIdeal unit_ideal(const Field& field, const QuaternionLattice& order)
{
    return {order, field.element(1)};
}

/* The N(q) + 1 left ideals J with q I subset J subset I and n(J) = q n(I), as
 * J = O x + pi I for x in I with Nrd(x)/n(I) in q, sorted by lattice.
 */
inline std::vector<LeftIdeal> neighbors(const Field& field, const QuaternionLattice& order, const LeftIdeal& I,
                                        const PrimeIdeal& P, std::int64_t p)
{
    EICHLER_CHECK(P.rational_prime != p, ErrorCode::BadPrime, "neighbor prime divides p");
    const FieldElement pi(P.generator);
    const QuaternionLattice piI = I.lattice.scaled(pi);
    const std::size_t r = I.lattice.rank();
    IntMatrix coords;
    for (const auto& b : piI.z_basis()) {
        RatVector c = I.lattice.coordinates(b);
        IntVector row;
        for (const auto& x : c)
            row.push_back(x.get_num());
        coords.push_back(row);
    }
    IntMatrix h = hermite_normal_form(coords, r);
    std::vector<std::int64_t> radix(r);
    for (std::size_t k = 0; k < r; ++k)
        radix[k] = to_int64(h[k][k]);
    auto basis = I.lattice.z_basis();
    auto order_basis = order.z_basis();
    const FieldElement ninv = I.norm.inverse();
    const FieldElement target = canonical_generator(field, I.norm * pi);

    std::vector<LeftIdeal> out;
    std::vector<std::int64_t> c(r, 0);
    for (;;) {
        std::size_t k = 0;
        while (k < r && ++c[k] == radix[k])
            c[k++] = 0;
        if (k == r)
            break;
        QuaternionElement x = QuaternionElement::zero(I.lattice.shape());
        for (std::size_t m = 0; m < r; ++m)
            if (c[m] != 0)
                x = x + basis[m].scaled(field.element(c[m]));
        FieldElement v = x.reduced_norm() * ninv;
        if (!(v * pi.inverse()).is_integral())
            continue;
        bool seen = false;
        for (const auto& J : out)
            if (J.lattice.contains(x)) {
                seen = true;
                break;
            }
        if (seen)
            continue;
        std::vector<QuaternionElement> gens = piI.z_basis();
        for (const auto& o : order_basis)
            gens.push_back(o * x);
        auto J = QuaternionLattice::from_z_generators(I.lattice.shape(), gens);
        if (J == I.lattice)
            continue;
        out.push_back({J, target});
    }
    EICHLER_CHECK(static_cast<Integer>(out.size()) == P.norm + 1, ErrorCode::Internal,
                  "found " + std::to_string(out.size()) + " neighbors, expected N(q) + 1");
    for (const auto& J : out)
        EICHLER_CHECK(ideal_norm(field, J.lattice) == target, ErrorCode::Internal, "neighbor has wrong norm");
    std::sort(out.begin(), out.end(), [](const LeftIdeal& a, const LeftIdeal& b) { return a.lattice < b.lattice; });
    return out;
}

/* Searches conj(J) I for x with Nrd(x) = n(conj(J) I); then w = x / n(J)
 * satisfies J w = I.  Returns the witness w.
 */
inline std::optional<QuaternionElement> isomorphism_witness(const Field& field, const LeftIdeal& I, const LeftIdeal& J)
{
    QuaternionLattice M = J.lattice.conjugate() * I.lattice;
    FieldElement n = ideal_norm(field, M);
    NormForm f = norm_form(M, n);
    ShortVectorEnumerator en(f.trace);
    auto basis = M.z_basis();
    std::optional<QuaternionElement> found;
    const FieldElement jinv = J.norm.inverse();
    en.for_each(field.degree(), [&](const Vec64& y, std::int64_t) {
        if (found)
            return;
        Vec64 xv = en.to_original(y);
        QuaternionElement x = QuaternionElement::zero(M.shape());
        for (std::size_t k = 0; k < xv.size(); ++k)
            if (xv[k] != 0)
                x = x + basis[k].scaled(field.element(xv[k]));
        if (x.reduced_norm() != n)
            return;
        QuaternionElement w = x.scaled(jinv);
        if (J.lattice.right_multiply(w) == I.lattice)
            found = w;
    });
    return found;
}

inline bool is_isomorphic(const Field& field, const LeftIdeal& I, const LeftIdeal& J)
{
    return isomorphism_witness(field, I, J).has_value();
}

struct IdealClass {
    LeftIdeal ideal;
    QuaternionLattice right_order;
    int weight = 0;
};

/* Breadth-first search over the P-neighbor graph from the order itself,
 * deduplicated up to isomorphism, until the accumulated mass sum 1/w_i reaches
 * the mass formula.
 */
inline std::vector<IdealClass> ideal_classes(const Field& field, const QuaternionLattice& order,
                                             const PrimeIdeal& aux, std::int64_t p, const Rational& mass)
{
    std::vector<IdealClass> classes;
    Rational acc = 0;
    auto add = [&](const LeftIdeal& I) {
        QuaternionLattice R = right_order(I.lattice);
        int w = unit_weight(field, R);
        for (const auto& c : classes)
            if (c.weight == w && is_isomorphic(field, I, c.ideal))
                return false;
        classes.push_back({I, R, w});
        acc += Rational(1, w);
        acc.canonicalize();
        return true;
    };
    add(unit_ideal(field, order));
    std::size_t head = 0;
    while (acc < mass && head < classes.size()) {
        LeftIdeal I = classes[head++].ideal;
        for (const auto& J : neighbors(field, order, I, aux, p)) {
            add(J);
            if (acc >= mass)
                break;
        }
    }
    EICHLER_CHECK(acc == mass, ErrorCode::MassMismatch,
                  "class enumeration reached mass " + acc.get_str() + ", expected " + mass.get_str());
    return classes;
}

namespace detail {

/// Kernel mod p of the Z-linear map given by the rows of m: {c : c m = 0 mod p}, with p Z^n.
inline IntMatrix kernel_mod_p(const IntMatrix& m, std::int64_t p)
{
    const std::size_t n = m.size(), cols = m.empty() ? 0 : m[0].size();
    // Work on [m^T] columns: solve sum_i c_i m[i] = 0 over F_p by elimination on the transpose.
    std::vector<Vec64> a(cols, Vec64(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            a[j][i] = to_int64(mod_floor(m[i][j], p));
    auto inv = [&](std::int64_t x) {
        std::int64_t r = 1, e = p - 2;
        while (e > 0) {
            if (e & 1)
                r = r * x % p;
            x = x * x % p;
            e >>= 1;
        }
        return r;
    };
    std::vector<std::size_t> pivcol;
    std::size_t row = 0;
    for (std::size_t c = 0; c < n && row < cols; ++c) {
        std::size_t piv = row;
        while (piv < cols && a[piv][c] == 0)
            ++piv;
        if (piv == cols)
            continue;
        std::swap(a[piv], a[row]);
        std::int64_t s = inv(a[row][c]);
        for (auto& x : a[row])
            x = x * s % p;
        for (std::size_t r2 = 0; r2 < cols; ++r2) {
            if (r2 == row || a[r2][c] == 0)
                continue;
            std::int64_t f = a[r2][c];
            for (std::size_t k = 0; k < n; ++k)
                a[r2][k] = ((a[r2][k] - f * a[row][k]) % p + p) % p;
        }
        pivcol.push_back(c);
        ++row;
    }
    IntMatrix gens;
    std::vector<char> is_piv(n, 0);
    for (auto c : pivcol)
        is_piv[c] = 1;
    for (std::size_t f = 0; f < n; ++f) {
        if (is_piv[f])
            continue;
        IntVector v(n, 0);
        v[f] = 1;
        for (std::size_t r = 0; r < pivcol.size(); ++r)
            v[pivcol[r]] = mod_floor(Integer(-a[r][f]), p);
        gens.push_back(v);
    }
    for (std::size_t i = 0; i < n; ++i) {
        IntVector v(n, 0);
        v[i] = p;
        gens.push_back(v);
    }
    return hermite_normal_form(gens, n);
}

/// Smallest ring containing L, or nothing once a non-integral element appears.
inline std::optional<QuaternionLattice> ring_closure(QuaternionLattice L)
{
    for (;;) {
        for (const auto& b : L.z_basis())
            if (!b.reduced_norm().is_integral() || !b.reduced_trace().is_integral())
                return std::nullopt;
        QuaternionLattice next = L + L * L;
        if (next == L)
            return L;
        L = next;
    }
}

} // namespace detail

/* A maximal order of reduced discriminant (1) containing the standard order,
 * for p with every residue degree even (p inert in a real quadratic L).  The
 * order is saturated at (p): elements y = x/p with x in the radical of O/pO
 * are adjoined when the resulting ring is still an order.
 */
inline QuaternionLattice level_one_order(const QuaternionAlgebra& B)
{
    const Field& field = B.field();
    const std::int64_t p = B.p();
    level_data(field, p, OrderMode::LevelOne);
    QuaternionLattice O = standard_order(B);
    FieldElement one = field.element(1);
    while (reduced_discriminant(field, O) != one) {
        auto basis = O.z_basis();
        const std::size_t r = basis.size();
        // Radical of the trace form modulo p: x with Trd(x b) = 0 mod p for every basis element b.
        IntMatrix m(r, IntVector(2 * r));
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = 0; b < r; ++b) {
                FieldElement t = (basis[a] * basis[b]).reduced_trace();
                m[a][2 * b] = t.a().get_num();
                m[a][2 * b + 1] = t.b().get_num();
            }
        IntMatrix K = detail::kernel_mod_p(m, p);
        std::vector<std::int64_t> radix(r);
        for (std::size_t k = 0; k < r; ++k)
            radix[k] = p / to_int64(K[k][k]);
        std::vector<std::int64_t> c(r, 0);
        std::optional<QuaternionLattice> next;
        const FieldElement pinv = field.element(Rational(1, p));
        for (;;) {
            std::size_t k = 0;
            while (k < r && ++c[k] == radix[k])
                c[k++] = 0;
            if (k == r)
                break;
            // x = sum_k c_k K_k in O-coordinates.
            QuaternionElement x = QuaternionElement::zero(B.shape());
            for (std::size_t a = 0; a < r; ++a) {
                if (c[a] == 0)
                    continue;
                for (std::size_t b = 0; b < r; ++b)
                    if (K[a][b] != 0)
                        x = x + basis[b].scaled(field.element(Rational(K[a][b] * c[a])));
            }
            QuaternionElement y = x.scaled(pinv);
            if (O.contains(y) || !y.reduced_norm().is_integral() || !y.reduced_trace().is_integral())
                continue;
            auto gens = O.z_basis();
            gens.push_back(y);
            auto cand = detail::ring_closure(QuaternionLattice::from_ol_generators(B.shape(), gens));
            if (cand && is_order(*cand)) {
                next = cand;
                break;
            }
        }
        EICHLER_CHECK(next.has_value(), ErrorCode::Internal, "saturation found no larger order");
        O = *next;
    }
    return O;
}

} // namespace eichler
