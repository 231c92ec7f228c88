#include "eichler/enumeration.hpp"

#include <gtest/gtest.h>

#include <map>
#include <random>

using namespace eichler;

namespace {

// Exact value of x^T G x / 2.
std::int64_t form_value(const IntMatrix& g, const Vec64& x)
{
    Integer s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j)
            s += g[i][j] * x[i] * x[j];
    return to_int64(s / 2);
}

/* All nonzero x with Q(x) <= bound, up to sign, by scanning the box
 * |x_i| <= sqrt(2 bound (G^{-1})_ii), which contains the ellipsoid.
 */
std::map<Vec64, std::int64_t> box_scan(const IntMatrix& g, std::int64_t bound)
{
    const std::size_t n = g.size();
    RatMatrix inv = *rat_inverse(to_rational(g));
    Vec64 r(n);
    for (std::size_t i = 0; i < n; ++i)
        r[i] = to_int64(isqrt(floor_of(2 * bound * inv[i][i]))) + 1;
    std::map<Vec64, std::int64_t> out;
    Vec64 x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = -r[i];
    for (;;) {
        std::int64_t q = form_value(g, x);
        Vec64 neg(n);
        for (std::size_t i = 0; i < n; ++i)
            neg[i] = -x[i];
        if (q > 0 && q <= bound && out.find(neg) == out.end())
            out[x] = q;
        std::size_t k = 0;
        while (k < n && ++x[k] > r[k]) {
            x[k] = -r[k];
            ++k;
        }
        if (k == n)
            break;
    }
    return out;
}

IntMatrix random_even_gram(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_int_distribution<int> d(-3, 3);
    IntMatrix b(n, IntVector(n));
    do {
        for (auto& row : b)
            for (auto& x : row)
                x = d(rng);
    } while (int_det(b) == 0);
    IntMatrix g = mat_mul(b, transpose(b));
    for (auto& row : g)
        for (auto& x : row)
            x *= 2;
    return g;
}

} // namespace

TEST(Enumeration, MatchesBoxScan)
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + trial % 3;
        IntMatrix g = random_even_gram(rng, n);
        const std::int64_t bound = 6 + trial % 5;
        ShortVectorEnumerator en(g);
        std::map<Vec64, std::int64_t> found;
        en.for_each(bound, [&](const Vec64& y, std::int64_t q) {
            Vec64 x = en.to_original(y);
            ASSERT_EQ(form_value(g, x), q);
            found[x] = q;
        });
        auto oracle = box_scan(g, bound);
        ASSERT_EQ(found.size(), oracle.size()) << "trial " << trial;
        // Compare up to sign.
        for (const auto& [x, q] : found) {
            Vec64 neg(x.size());
            for (std::size_t i = 0; i < x.size(); ++i)
                neg[i] = -x[i];
            auto it = oracle.find(x);
            if (it == oracle.end())
                it = oracle.find(neg);
            ASSERT_NE(it, oracle.end());
            ASSERT_EQ(it->second, q);
        }
    }
}

TEST(Enumeration, ParallelMergeIsDeterministic)
{
    std::mt19937_64 rng(43);
    IntMatrix g = random_even_gram(rng, 8);
    ShortVectorEnumerator en(g);
    auto collect = [&](unsigned workers) {
        return en.enumerate(
            40, workers, std::vector<Vec64>{},
            [](std::vector<Vec64>& acc, const Vec64& y, std::int64_t) { acc.push_back(y); },
            [](std::vector<Vec64>& out, std::vector<Vec64>&& part) {
                out.insert(out.end(), part.begin(), part.end());
            });
    };
    auto one = collect(1), eight = collect(8);
    EXPECT_GT(one.size(), 0u);
    EXPECT_EQ(one, eight);
}

TEST(Enumeration, LatticeE8RootCount)
{
    // Gram of E8 (Cartan matrix): 240 roots, 120 up to sign, 2160 vectors of norm 4.
    IntMatrix g(8, IntVector(8, 0));
    for (int i = 0; i < 8; ++i)
        g[i][i] = 2;
    auto link = [&](int a, int b) { g[a][b] = g[b][a] = -1; };
    for (int i = 0; i < 6; ++i)
        link(i, i + 1);
    link(2, 7);
    ShortVectorEnumerator en(g);
    std::map<std::int64_t, int> counts;
    en.for_each(2, [&](const Vec64&, std::int64_t q) { ++counts[q]; });
    EXPECT_EQ(counts[1], 120);
    EXPECT_EQ(counts[2], 1080);
}
