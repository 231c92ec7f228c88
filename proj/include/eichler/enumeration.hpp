#pragma once

// Short vectors of a positive definite integral quadratic form Q(x) = x^T G x / 2 with
// G even-diagonal.  LLL first, then Fincke-Pohst with floating-point search intervals
// widened by a fixed slack and every candidate confirmed exactly.

#include "eichler/linalg.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <thread>

namespace eichler {

using Vec64 = std::vector<std::int64_t>;

class ShortVectorEnumerator {
public:
    explicit ShortVectorEnumerator(const IntMatrix& gram) : n_(gram.size())
    {
        for (std::size_t i = 0; i < n_; ++i) {
            EICHLER_CHECK(gram[i].size() == n_, ErrorCode::Internal, "Gram matrix is not square");
            EICHLER_CHECK(gram[i][i] % 2 == 0, ErrorCode::Internal, "Gram matrix diagonal must be even");
            for (std::size_t j = 0; j < i; ++j)
                EICHLER_CHECK(gram[i][j] == gram[j][i], ErrorCode::Internal, "Gram matrix is not symmetric");
        }
        u_ = lll_gram(gram);
        IntMatrix r = mat_mul(mat_mul(u_, gram), transpose(u_));
        reduced_.assign(n_, Vec64(n_));
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                reduced_[i][j] = to_int64(r[i][j]);
        // Cholesky-style decomposition of A = G/2: Q(y) = sum_i q_ii (y_i + sum_{j>i} q_ij y_j)^2.
        std::vector<std::vector<double>> q(n_, std::vector<double>(n_, 0.0));
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                q[i][j] = static_cast<double>(reduced_[i][j]) / 2.0;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i + 1; j < n_; ++j) {
                q[j][i] = q[i][j];
                q[i][j] /= q[i][i];
            }
            for (std::size_t k = i + 1; k < n_; ++k)
                for (std::size_t l = k; l < n_; ++l)
                    q[k][l] -= q[k][i] * q[i][l];
        }
        chol_ = std::move(q);
        for (std::size_t i = 0; i < n_; ++i)
            EICHLER_CHECK(chol_[i][i] > 0, ErrorCode::Internal, "quadratic form is not positive definite");
    }

    std::size_t dimension() const { return n_; }
    /// Rows express the reduced basis in the original one: reduced = U * original.
    const IntMatrix& transform() const { return u_; }
    const std::vector<Vec64>& reduced_gram() const { return reduced_; }

    /// Exact Q(y) for y in reduced coordinates.
    std::int64_t value(const Vec64& y) const
    {
        __int128 s = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            if (y[i] == 0)
                continue;
            __int128 row = 0;
            for (std::size_t j = 0; j < n_; ++j)
                row += static_cast<__int128>(reduced_[i][j]) * y[j];
            s += row * y[i];
        }
        return static_cast<std::int64_t>(s / 2);
    }

    /// Original coordinates y * U of a vector given in reduced coordinates.
    Vec64 to_original(const Vec64& y) const
    {
        Vec64 x(n_, 0);
        for (std::size_t i = 0; i < n_; ++i) {
            if (y[i] == 0)
                continue;
            for (std::size_t j = 0; j < n_; ++j)
                x[j] += y[i] * u_[i][j].get_si();
        }
        return x;
    }

    /// Transforms another Gram matrix on the original basis into reduced coordinates.
    std::vector<Vec64> reduce_form(const IntMatrix& g) const
    {
        IntMatrix r = mat_mul(mat_mul(u_, g), transpose(u_));
        std::vector<Vec64> out(n_, Vec64(n_));
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                out[i][j] = to_int64(r[i][j]);
        return out;
    }

    /// Heuristic count of lattice points with Q <= bound (volume of the ellipsoid).
    double estimated_count(std::int64_t bound) const
    {
        // vol{Q <= B} = pi^{n/2} B^{n/2} / Gamma(n/2 + 1) / sqrt(det(G/2)).
        double logdet = 0;
        for (std::size_t i = 0; i < n_; ++i)
            logdet += std::log(chol_[i][i]);
        double h = static_cast<double>(n_) / 2.0;
        return std::exp(h * std::log(M_PI * static_cast<double>(std::max<std::int64_t>(bound, 1))) -
                        std::lgamma(h + 1.0) - logdet / 2.0);
    }

    /* Calls visit(y, Q(y)) for exactly one vector of every pair +-y with
     * 0 < Q(y) <= bound, y in reduced coordinates, its last nonzero coordinate
     * positive.  The search tree is split by the values of the two outermost
     * coordinates; each task accumulates into its own Acc, and the accumulators
     * are merged in task order.
     */
    template <class Acc, class Visit, class Merge>
    Acc enumerate(std::int64_t bound, unsigned workers, Acc init, Visit visit, Merge merge) const
    {
        std::vector<Vec64> prefixes = task_prefixes(bound);
        std::vector<Acc> results(prefixes.size(), init);
        std::atomic<std::size_t> next{0};
        auto run = [&] {
            Vec64 y(n_, 0);
            for (std::size_t t = next++; t < prefixes.size(); t = next++) {
                const Vec64& pre = prefixes[t];
                std::fill(y.begin(), y.end(), 0);
                double partial = 0;
                bool higher_zero = true;
                for (std::size_t k = 0; k < pre.size(); ++k) {
                    std::size_t i = n_ - 1 - k;
                    y[i] = pre[k];
                    partial += chol_[i][i] * sq(y[i] - center(y, i));
                    higher_zero = higher_zero && y[i] == 0;
                }
                Acc& acc = results[t];
                if (pre.size() == n_) {
                    leaf(y, bound, acc, visit);
                    continue;
                }
                descend(n_ - 1 - pre.size(), y, partial, higher_zero, bound, acc, visit);
            }
        };
        workers = std::max(1u, workers);
        if (workers == 1 || prefixes.size() < 2) {
            run();
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back(run);
            for (auto& th : pool)
                th.join();
        }
        Acc out = std::move(init);
        for (auto& r : results)
            merge(out, std::move(r));
        return out;
    }

    /// Single-threaded convenience wrapper.
    void for_each(std::int64_t bound, const std::function<void(const Vec64&, std::int64_t)>& f) const
    {
        enumerate(
            bound, 1, 0, [&](int&, const Vec64& y, std::int64_t q) { f(y, q); }, [](int&, int&&) {});
    }

private:
    static double sq(double x) { return x * x; }
    static constexpr double slack = 1.0;

    double center(const Vec64& y, std::size_t i) const
    {
        double c = 0;
        for (std::size_t j = i + 1; j < n_; ++j)
            c -= chol_[i][j] * static_cast<double>(y[j]);
        return c;
    }

    std::pair<std::int64_t, std::int64_t> range(const Vec64& y, std::size_t i, double partial,
                                                std::int64_t bound) const
    {
        double rem = static_cast<double>(bound) - partial;
        double c = center(y, i);
        double r = std::sqrt(std::max(0.0, rem + slack) / chol_[i][i]);
        return {static_cast<std::int64_t>(std::ceil(c - r - slack)),
                static_cast<std::int64_t>(std::floor(c + r + slack))};
    }

    std::vector<Vec64> task_prefixes(std::int64_t bound) const
    {
        std::vector<Vec64> out;
        const std::size_t depth = std::min<std::size_t>(2, n_);
        Vec64 y(n_, 0);
        std::function<void(std::size_t, double, bool, Vec64&)> rec = [&](std::size_t k, double partial,
                                                                        bool higher_zero, Vec64& pre) {
            if (k == depth) {
                out.push_back(pre);
                return;
            }
            std::size_t i = n_ - 1 - k;
            auto [lo, hi] = range(y, i, partial, bound);
            if (higher_zero)
                lo = std::max<std::int64_t>(lo, 0);
            double c = center(y, i);
            for (std::int64_t v = lo; v <= hi; ++v) {
                double p = partial + chol_[i][i] * sq(static_cast<double>(v) - c);
                if (p > static_cast<double>(bound) + slack)
                    continue;
                y[i] = v;
                pre.push_back(v);
                rec(k + 1, p, higher_zero && v == 0, pre);
                pre.pop_back();
                y[i] = 0;
            }
        };
        Vec64 pre;
        rec(0, 0.0, true, pre);
        return out;
    }

    template <class Acc, class Visit>
    void leaf(const Vec64& y, std::int64_t bound, Acc& acc, Visit& visit) const
    {
        bool zero = std::all_of(y.begin(), y.end(), [](std::int64_t v) { return v == 0; });
        if (zero)
            return;
        std::int64_t q = value(y);
        if (q <= bound)
            visit(acc, y, q);
    }

    template <class Acc, class Visit>
    void descend(std::size_t i, Vec64& y, double partial, bool higher_zero, std::int64_t bound, Acc& acc,
                 Visit& visit) const
    {
        auto [lo, hi] = range(y, i, partial, bound);
        if (higher_zero)
            lo = std::max<std::int64_t>(lo, 0);
        double c = center(y, i);
        for (std::int64_t v = lo; v <= hi; ++v) {
            double p = partial + chol_[i][i] * sq(static_cast<double>(v) - c);
            if (p > static_cast<double>(bound) + slack)
                continue;
            y[i] = v;
            if (i == 0)
                leaf(y, bound, acc, visit);
            else
                descend(i - 1, y, p, higher_zero && v == 0, bound, acc, visit);
        }
        y[i] = 0;
    }

    std::size_t n_;
    IntMatrix u_;
    std::vector<Vec64> reduced_;
    std::vector<std::vector<double>> chol_;
};

} // namespace eichler
