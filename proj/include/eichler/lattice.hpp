#pragma once

// Full-rank Z-lattices in B_{p,L}, stored as (1/denominator) * HNF over the rank-4g
// Z-structure.  Sums, products, intersections and O_L-bases.

#include "eichler/quaternion.hpp"

namespace eichler {

class QuaternionLattice {
public:
    QuaternionLattice() = default;

    /// Z-span of the given elements, which must have full rank.
    static QuaternionLattice from_z_generators(QuaternionShape shape, const std::vector<QuaternionElement>& gens)
    {
        const std::size_t n = 4 * static_cast<std::size_t>(shape.field.degree);
        Integer den = 1;
        std::vector<RatVector> vecs;
        vecs.reserve(gens.size());
        for (const auto& x : gens) {
            vecs.push_back(x.to_rational_vector());
            for (const auto& c : vecs.back())
                mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
        }
        HermiteBuilder hb(n);
        for (const auto& v : vecs) {
            IntVector row(n);
            for (std::size_t k = 0; k < n; ++k) {
                Rational s = v[k] * den;
                row[k] = s.get_num();
            }
            hb.insert(std::move(row));
        }
        EICHLER_CHECK(hb.rank() == n, ErrorCode::InvalidArgument, "generators do not span a full lattice");
        return QuaternionLattice(shape, hb.result(), den);
    }

    /// O_L-span of the given elements.
    static QuaternionLattice from_ol_generators(QuaternionShape shape, const std::vector<QuaternionElement>& gens)
    {
        if (shape.field.degree == 1)
            return from_z_generators(shape, gens);
        std::vector<QuaternionElement> all = gens;
        FieldElement w(shape.field, 0, 1);
        for (const auto& x : gens)
            all.push_back(x.scaled(w));
        return from_z_generators(shape, all);
    }

    QuaternionShape shape() const { return shape_; }
    std::size_t rank() const { return hnf_.size(); }
    const IntMatrix& hnf() const { return hnf_; }
    const Integer& denominator() const { return den_; }

    QuaternionElement basis(std::size_t k) const
    {
        RatVector v(rank());
        for (std::size_t c = 0; c < rank(); ++c)
            v[c] = Rational(hnf_[k][c], den_);
        for (auto& c : v)
            c.canonicalize();
        return QuaternionElement::from_rational_vector(shape_, v);
    }

    std::vector<QuaternionElement> z_basis() const
    {
        std::vector<QuaternionElement> out;
        out.reserve(rank());
        for (std::size_t k = 0; k < rank(); ++k)
            out.push_back(basis(k));
        return out;
    }

    /// Rational coordinates of x in the Z-basis.
    RatVector coordinates(const QuaternionElement& x) const
    {
        RatVector v = x.to_rational_vector();
        for (auto& c : v)
            c *= den_;
        return solve_upper(hnf_, std::move(v));
    }

    bool contains(const QuaternionElement& x) const
    {
        for (const auto& c : coordinates(x))
            if (c.get_den() != 1)
                return false;
        return true;
    }

    bool contains(const QuaternionLattice& other) const
    {
        for (std::size_t k = 0; k < other.rank(); ++k)
            if (!contains(other.basis(k)))
                return false;
        return true;
    }

    /// |det| of the basis in the coordinates of the (1, i, j, k) x (1, omega) frame.
    Rational covolume() const
    {
        Rational v = 1;
        for (std::size_t k = 0; k < rank(); ++k)
            v *= Rational(hnf_[k][k], den_);
        v.canonicalize();
        return v;
    }

    /// Index [other : this] for this a sublattice of other.
    Integer index_in(const QuaternionLattice& other) const
    {
        Rational r = covolume() / other.covolume();
        EICHLER_CHECK(r.get_den() == 1, ErrorCode::Internal, "not a sublattice");
        return r.get_num();
    }

    QuaternionLattice scaled(const FieldElement& s) const
    {
        std::vector<QuaternionElement> g;
        for (const auto& b : z_basis())
            g.push_back(b.scaled(s));
        return from_z_generators(shape_, g);
    }

    QuaternionLattice conjugate() const
    {
        std::vector<QuaternionElement> g;
        for (const auto& b : z_basis())
            g.push_back(b.conjugate());
        return from_z_generators(shape_, g);
    }

    QuaternionLattice left_multiply(const QuaternionElement& x) const
    {
        std::vector<QuaternionElement> g;
        for (const auto& b : z_basis())
            g.push_back(x * b);
        return from_z_generators(shape_, g);
    }

    QuaternionLattice right_multiply(const QuaternionElement& x) const
    {
        std::vector<QuaternionElement> g;
        for (const auto& b : z_basis())
            g.push_back(b * x);
        return from_z_generators(shape_, g);
    }

    friend QuaternionLattice operator+(const QuaternionLattice& a, const QuaternionLattice& b)
    {
        std::vector<QuaternionElement> g = a.z_basis();
        for (const auto& x : b.z_basis())
            g.push_back(x);
        return from_z_generators(a.shape_, g);
    }

    /// Z-span of all products a_k * b_m.
    friend QuaternionLattice operator*(const QuaternionLattice& a, const QuaternionLattice& b)
    {
        std::vector<QuaternionElement> g;
        auto ab = a.z_basis(), bb = b.z_basis();
        g.reserve(ab.size() * bb.size());
        for (const auto& x : ab)
            for (const auto& y : bb)
                g.push_back(x * y);
        return from_z_generators(a.shape_, g);
    }

    /// Dual lattice with respect to the coordinate dot product.
    QuaternionLattice coordinate_dual() const
    {
        RatMatrix m(rank(), RatVector(rank()));
        for (std::size_t i = 0; i < rank(); ++i)
            for (std::size_t j = 0; j < rank(); ++j)
                m[i][j] = Rational(hnf_[i][j], den_);
        auto inv = rat_inverse(m);
        EICHLER_CHECK(inv.has_value(), ErrorCode::Internal, "singular lattice basis");
        RatMatrix t = transpose(*inv);
        std::vector<QuaternionElement> g;
        for (const auto& row : t)
            g.push_back(QuaternionElement::from_rational_vector(shape_, row));
        return from_z_generators(shape_, g);
    }

    friend QuaternionLattice intersect(const std::vector<QuaternionLattice>& lats)
    {
        EICHLER_CHECK(!lats.empty(), ErrorCode::Internal, "empty intersection");
        std::vector<QuaternionElement> g;
        for (const auto& l : lats)
            for (const auto& x : l.coordinate_dual().z_basis())
                g.push_back(x);
        return from_z_generators(lats[0].shape_, g).coordinate_dual();
    }

    /* A basis of the lattice as a free O_L-module of rank 4 (g = 2 needs h(L) = 1),
     * computed by Euclidean row echelon over O_L.  Degree one returns the Z-basis.
     */
    std::vector<QuaternionElement> ol_basis() const
    {
        if (shape_.field.degree == 1)
            return z_basis();
        const FieldShape fs = shape_.field;
        // Rows of O_L-coordinates (t, x, y, z) scaled by the denominator.
        std::vector<std::array<AlgebraicInteger, 4>> rows;
        for (std::size_t k = 0; k < rank(); ++k) {
            std::array<AlgebraicInteger, 4> r;
            for (int t = 0; t < 4; ++t)
                r[t] = AlgebraicInteger(fs, hnf_[k][2 * t], hnf_[k][2 * t + 1]);
            rows.push_back(r);
        }
        std::vector<std::array<AlgebraicInteger, 4>> echelon;
        for (int col = 0; col < 4; ++col) {
            std::size_t piv = rows.size();
            while (true) {
                piv = rows.size();
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    if (rows[r][col].is_zero())
                        continue;
                    if (piv == rows.size() || abs(rows[r][col].norm()) < abs(rows[piv][col].norm()))
                        piv = r;
                }
                if (piv == rows.size())
                    break;
                bool done = true;
                for (std::size_t r = 0; r < rows.size(); ++r) {
                    if (r == piv || rows[r][col].is_zero())
                        continue;
                    AlgebraicInteger q = euclid_quotient(rows[r][col], rows[piv][col]);
                    for (int t = 0; t < 4; ++t)
                        rows[r][t] = rows[r][t] - q * rows[piv][t];
                    if (!rows[r][col].is_zero())
                        done = false;
                }
                if (done)
                    break;
            }
            EICHLER_CHECK(piv != rows.size(), ErrorCode::Internal, "lattice is not of full O_L-rank");
            echelon.push_back(rows[piv]);
            rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(piv));
        }
        std::vector<QuaternionElement> out;
        FieldElement inv_den(fs, Rational(1) / Rational(den_));
        for (const auto& r : echelon)
            out.push_back(QuaternionElement(shape_, {FieldElement(r[0]) * inv_den, FieldElement(r[1]) * inv_den,
                                                     FieldElement(r[2]) * inv_den, FieldElement(r[3]) * inv_den}));
        return out;
    }

    bool is_ol_stable() const
    {
        if (shape_.field.degree == 1)
            return true;
        FieldElement w(shape_.field, 0, 1);
        for (const auto& b : z_basis())
            if (!contains(b.scaled(w)))
                return false;
        return true;
    }

    friend bool operator==(const QuaternionLattice& a, const QuaternionLattice& b)
    {
        return a.den_ == b.den_ && a.hnf_ == b.hnf_;
    }

    friend bool operator<(const QuaternionLattice& a, const QuaternionLattice& b)
    {
        if (a.den_ != b.den_)
            return a.den_ < b.den_;
        return a.hnf_ < b.hnf_;
    }

    /// Integer matrix rows of the HNF together with the denominator, for serialization.
    static QuaternionLattice from_hnf(QuaternionShape shape, IntMatrix hnf, Integer den)
    {
        QuaternionLattice l(shape, std::move(hnf), std::move(den));
        EICHLER_CHECK(hermite_normal_form(l.hnf_, l.rank()) == l.hnf_, ErrorCode::InvalidArgument,
                      "matrix is not in Hermite normal form");
        return l;
    }

private:
    QuaternionLattice(QuaternionShape shape, IntMatrix hnf, Integer den)
        : shape_(shape), hnf_(std::move(hnf)), den_(std::move(den))
    {
        Integer g = den_;
        for (const auto& row : hnf_)
            for (const auto& c : row)
                mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
        if (g != 1) {
            for (auto& row : hnf_)
                for (auto& c : row)
                    mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
            mpz_divexact(den_.get_mpz_t(), den_.get_mpz_t(), g.get_mpz_t());
        }
    }

    QuaternionShape shape_{};
    IntMatrix hnf_;
    Integer den_ = 1;
};

} // namespace eichler
