#pragma once

// Hom-modules M_ij = conj(I_j) I_i with the O_L-valued degree form Q(x) = Nrd(x)/n(M).

#include "eichler/orders.hpp"

namespace eichler {

struct QuadraticModule {
    std::size_t i = 0, j = 0;
    QuaternionLattice lattice;
    FieldElement normalizer;                          // canonical generator of Nrd(M)
    std::vector<QuaternionElement> ol_basis;
    std::vector<std::vector<AlgebraicInteger>> gram;  // B(e_a, e_b) = Trd(e_a conj(e_b)) / n
};

inline QuadraticModule hom_module(const Field& field, const LeftIdeal& Ii, const LeftIdeal& Ij, std::size_t i,
                                  std::size_t j)
{
    QuadraticModule m;
    m.i = i;
    m.j = j;
    m.lattice = Ij.lattice.conjugate() * Ii.lattice;
    m.normalizer = ideal_norm(field, m.lattice);
    m.ol_basis = m.lattice.ol_basis();
    const FieldElement ninv = m.normalizer.inverse();
    m.gram.assign(4, std::vector<AlgebraicInteger>(4));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            FieldElement v = (m.ol_basis[a] * m.ol_basis[b].conjugate()).reduced_trace() * ninv;
            EICHLER_CHECK(v.is_integral(), ErrorCode::Internal, "degree form is not integral");
            m.gram[a][b] = v.to_integer();
        }
    return m;
}

/// Q(x) = Nrd(x) / n as an element of O_L.
inline AlgebraicInteger degree_form(const QuadraticModule& m, const QuaternionElement& x)
{
    FieldElement v = x.reduced_norm() * m.normalizer.inverse();
    EICHLER_CHECK(v.is_integral(), ErrorCode::Internal, "element is not in the module");
    return v.to_integer();
}

struct GramLevel {
    FieldElement determinant;  // canonical generator of (det Gram)
    FieldElement level;        // canonical generator of the lattice level
};

/* Determinant of the O_L-Gram and the level: the smallest ideal N with N Q(x)
 * integral on the dual lattice, i.e. N^{-1} is generated by the entries of
 * Gram^{-1} off the diagonal and half its diagonal entries.
 */
inline GramLevel gram_and_level(const Field& field, const QuadraticModule& m)
{
    const FieldShape fs = field.shape();
    std::vector<std::vector<FieldElement>> g(4, std::vector<FieldElement>(4));
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            g[a][b] = FieldElement(m.gram[a][b]);
    FieldElement det = field_det(g, fs);
    // Invert by Gauss-Jordan over L.
    std::vector<std::vector<FieldElement>> inv(4, std::vector<FieldElement>(4, FieldElement(fs, 0)));
    for (int a = 0; a < 4; ++a)
        inv[a][a] = FieldElement(fs, 1);
    for (int c = 0; c < 4; ++c) {
        int p = c;
        while (g[p][c].is_zero())
            ++p;
        std::swap(g[p], g[c]);
        std::swap(inv[p], inv[c]);
        FieldElement s = g[c][c].inverse();
        for (int k = 0; k < 4; ++k) {
            g[c][k] = g[c][k] * s;
            inv[c][k] = inv[c][k] * s;
        }
        for (int r = 0; r < 4; ++r) {
            if (r == c || g[r][c].is_zero())
                continue;
            FieldElement f = g[r][c];
            for (int k = 0; k < 4; ++k) {
                g[r][k] = g[r][k] - f * g[c][k];
                inv[r][k] = inv[r][k] - f * inv[c][k];
            }
        }
    }
    std::vector<FieldElement> gens;
    const FieldElement half(fs, Rational(1, 2));
    for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b)
            gens.push_back(a == b ? inv[a][a] * half : inv[a][b]);
    FieldElement dual_content = fractional_ideal_generator(field, gens);
    return {canonical_generator(field, det), canonical_generator(field, dual_content.inverse())};
}

/// Asserts the level expected for the mode: (p) at level p, (1) at level one.
inline void check_level(const Field& field, const QuadraticModule& m, std::int64_t p, OrderMode mode)
{
    GramLevel gl = gram_and_level(field, m);
    FieldElement expected = field.element(mode == OrderMode::LevelP ? p : 1);
    EICHLER_CHECK(gl.level == expected, ErrorCode::LevelMismatch,
                  "module (" + std::to_string(m.i) + "," + std::to_string(m.j) + ") has level " +
                      to_string(gl.level.a()) + "," + to_string(gl.level.b()));
}

} // namespace eichler
