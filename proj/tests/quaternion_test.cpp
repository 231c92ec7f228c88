#include "eichler/quaternion.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace eichler;

namespace {

// Classical closed formula for the Hilbert symbol over Q_ell.
int hilbert_q(std::int64_t a, std::int64_t b, std::int64_t ell)
{
    auto split = [&](std::int64_t x) {
        int v = 0;
        while (x % ell == 0) {
            x /= ell;
            ++v;
        }
        return std::pair{v, x};
    };
    auto [alpha, u] = split(a);
    auto [beta, v] = split(b);
    auto m8 = [](std::int64_t x) { return ((x % 8) + 8) % 8; };
    if (ell == 2) {
        int eps_u = ((m8(u) - 1) / 2) % 2, eps_v = ((m8(v) - 1) / 2) % 2;
        int om_u = ((m8(u) * m8(u) - 1) / 8) % 2, om_v = ((m8(v) * m8(v) - 1) / 8) % 2;
        int e = (eps_u * eps_v + alpha * om_v + beta * om_u) % 2;
        return e ? -1 : 1;
    }
    int sign = ((alpha * beta) % 2 == 1 && ell % 4 == 3) ? -1 : 1;
    if (beta % 2)
        sign *= legendre(u, ell);
    if (alpha % 2)
        sign *= legendre(v, ell);
    return sign;
}

QuaternionElement random_element(const QuaternionAlgebra& B, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> d(-6, 6);
    const bool g2 = B.degree() == 2;
    auto f = [&] { return B.field().element(Rational(d(rng), 1 + (d(rng) & 3)), g2 ? Rational(d(rng), 2) : Rational(0)); };
    return B.element(f(), f(), f(), f());
}

} // namespace

TEST(HilbertSymbol, MatchesClosedFormulaOverQ)
{
    Field q = Field::make(1);
    for (std::int64_t ell : {2, 3, 5, 7, 11}) {
        PrimeIdeal P = primes_above(q, ell).at(0);
        for (std::int64_t a = -30; a <= 30; ++a)
            for (std::int64_t b = -30; b <= 30; ++b) {
                if (a == 0 || b == 0)
                    continue;
                ASSERT_EQ(hilbert_symbol(q, q.integer(a), q.integer(b), P), hilbert_q(a, b, ell))
                    << a << " " << b << " at " << ell;
            }
    }
}

TEST(HilbertSymbol, ResidueFieldSearchMatchesFullSearch)
{
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<int> d(-12, 12);
    for (int df : {1, 2, 5, 13, 17}) {
        Field L = Field::make(df);
        for (std::int64_t ell : {3, 5, 7}) {
            for (const auto& P : primes_above(L, ell)) {
                if (P.norm > 50)
                    continue;
                for (int trial = 0; trial < 25; ++trial) {
                    AlgebraicInteger a = L.integer(d(rng), df == 1 ? 0 : d(rng));
                    AlgebraicInteger b = L.integer(d(rng), df == 1 ? 0 : d(rng));
                    if (trial % 3 == 0)
                        a = a * P.generator;
                    if (trial % 4 == 0)
                        b = b * P.generator;
                    if (a.is_zero() || b.is_zero())
                        continue;
                    ASSERT_EQ(hilbert_symbol(L, a, b, P), detail::hilbert_symbol_full(L, a, b, P))
                        << "d=" << df << " P=" << P.generator << " a=" << a << " b=" << b;
                }
            }
        }
    }
}

TEST(HilbertSymbol, ReciprocityOverRealQuadraticFields)
{
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> d(-9, 9);
    for (int df : {2, 5, 13, 17}) {
        Field L = Field::make(df);
        for (int trial = 0; trial < 12; ++trial) {
            AlgebraicInteger a = L.integer(d(rng), d(rng)), b = L.integer(d(rng), d(rng));
            if (a.norm() == 0 || b.norm() == 0)
                continue;
            std::vector<std::int64_t> ells{2};
            for (const auto& x : {a, b})
                for (auto& [ell, e] : factor_integer(x.norm()))
                    ells.push_back(to_int64(ell));
            std::sort(ells.begin(), ells.end());
            ells.erase(std::unique(ells.begin(), ells.end()), ells.end());
            int minus = 0;
            for (auto ell : ells)
                for (const auto& P : primes_above(L, ell))
                    minus += hilbert_symbol(L, a, b, P) == -1;
            auto ea = L.embed(a), eb = L.embed(b);
            for (int s = 0; s < 2; ++s)
                minus += ea[s] < 0 && eb[s] < 0;
            ASSERT_EQ(minus % 2, 0) << "d=" << df << " a=" << a << " b=" << b;
        }
    }
}

TEST(Algebra, PresentationTable)
{
    Field q = Field::make(1);
    EXPECT_EQ(construct_algebra(q, 2).a(), -1);
    EXPECT_EQ(construct_algebra(q, 2).b(), -1);
    EXPECT_EQ(construct_algebra(q, 11).b(), -11);
    EXPECT_EQ(construct_algebra(q, 13).a(), -2);
    auto B17 = construct_algebra(q, 17);
    EXPECT_EQ(B17.a(), -17);
    EXPECT_EQ(B17.b(), -3);
    EXPECT_EQ(B17.auxiliary_prime(), 3);
    auto B41 = construct_algebra(q, 41);
    EXPECT_EQ(B41.b(), -3);
    auto B73 = construct_algebra(q, 73);
    EXPECT_EQ(B73.b(), -7);
}

TEST(Algebra, RamificationAllFieldsSmallPrimes)
{
    for (int d : Field::allowlist) {
        Field L = Field::make(d);
        for (std::int64_t p = 2; p < 60; ++p) {
            if (!is_prime(p) || L.discriminant() % p == 0)
                continue;
            auto B = construct_algebra(L, p);
            auto ram = verify_ramification(B);
            std::size_t expected = 0;
            for (const auto& P : primes_above(L, p))
                expected += P.residue_degree % 2;
            EXPECT_EQ(ram.size(), expected) << "d=" << d << " p=" << p;
        }
    }
}

TEST(Algebra, ErrorsCarryCodes)
{
    Field L = Field::make(5);
    try {
        construct_algebra(L, 15);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::CompositeP);
    }
    try {
        construct_algebra(L, 5);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RamifiedPrime);
    }
    // (-1, -1) over Q ramifies at 2, not at 3.
    QuaternionAlgebra wrong(Field::make(1), 3, -1, -1);
    try {
        verify_ramification(wrong);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::RamificationMismatch);
    }
}

TEST(Algebra, ArithmeticIdentities)
{
    std::mt19937_64 rng(23);
    for (int d : {1, 5, 13}) {
        Field L = Field::make(d);
        for (std::int64_t p : {2, 3, 7, 11}) {
            if (L.discriminant() % p == 0)
                continue;
            auto B = construct_algebra(L, p);
            for (int trial = 0; trial < 20; ++trial) {
                auto x = random_element(B, rng), y = random_element(B, rng), z = random_element(B, rng);
                ASSERT_EQ((x * y) * z, x * (y * z));
                ASSERT_EQ(x * (y + z), x * y + x * z);
                ASSERT_EQ((x * y).reduced_norm(), x.reduced_norm() * y.reduced_norm());
                ASSERT_EQ(x * x.conjugate(), B.scalar(x.reduced_norm()));
                ASSERT_EQ((x * y).conjugate(), y.conjugate() * x.conjugate());
                ASSERT_EQ(x.reduced_trace(), (x + x.conjugate())[0]);
                if (!x.is_zero()) {
                    ASSERT_EQ(x * x.inverse(), B.one());
                    ASSERT_TRUE(is_totally_positive(x.reduced_norm()));
                }
                ASSERT_EQ(x.reduced_trace(), (x + B.one()).reduced_norm() - x.reduced_norm() - L.element(1));
                ASSERT_EQ(QuaternionElement::from_rational_vector(B.shape(), x.to_rational_vector()), x);
            }
            auto i = B.rational(0, 1, 0, 0), j = B.rational(0, 0, 1, 0), k = B.rational(0, 0, 0, 1);
            EXPECT_EQ(i * i, B.scalar(L.element(B.a())));
            EXPECT_EQ(j * j, B.scalar(L.element(B.b())));
            EXPECT_EQ(i * j, k);
            EXPECT_EQ(j * i, -k);
        }
    }
}
