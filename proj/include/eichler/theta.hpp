#pragma once

// Theta series sum_nu a_nu q^nu of a Hom-module: a_nu = #{x in M : Q(x) = nu} for totally
// positive nu with Tr(nu) <= B, by enumeration on the trace form Tr_{L/Q}(Q(x)).

#include "eichler/quadratic_module.hpp"

#include <unordered_map>

namespace eichler {

struct ThetaSeries {
    int d = 1;
    std::size_t i = 0, j = 0;
    std::int64_t bound = 0;
    std::vector<AlgebraicInteger> nus;  // canonical order, starting with 0
    std::vector<std::int64_t> counts;

    std::int64_t coefficient(const AlgebraicInteger& nu) const
    {
        for (std::size_t k = 0; k < nus.size(); ++k)
            if (nus[k] == nu)
                return counts[k];
        throw Error(ErrorCode::CoefficientOutOfRange, "nu = " + nu.a().get_str() + "," + nu.b().get_str() +
                                                          " is not in the theta table");
    }
};

struct ThetaOptions {
    unsigned workers = 1;
    /// Largest admissible estimated number of enumerated vectors.
    double max_vectors = 2e8;
};

/// Gram of (x, y) -> Tr_{L/Q} B(x, y) on the Z-basis of the module.
inline IntMatrix trace_form(const QuadraticModule& m)
{
    return norm_form(m.lattice, m.normalizer).trace;
}

/// Index set: 0 followed by the totally positive nu with trace at most B, in canonical order.
inline std::vector<AlgebraicInteger> theta_index(const Field& field, std::int64_t bound)
{
    return enumerate_totally_positive(field, bound);
}

inline ThetaSeries theta(const Field& field, const QuadraticModule& m, std::int64_t bound,
                         const ThetaOptions& opt = {})
{
    EICHLER_CHECK(bound >= 0, ErrorCode::InvalidArgument, "negative trace bound");
    ThetaSeries th;
    th.d = field.d();
    th.i = m.i;
    th.j = m.j;
    th.bound = bound;
    th.nus = theta_index(field, bound);
    th.counts.assign(th.nus.size(), 0);
    th.counts[0] = 1;

    NormForm f = norm_form(m.lattice, m.normalizer);
    ShortVectorEnumerator en(f.trace);
    EICHLER_CHECK(en.estimated_count(bound) <= opt.max_vectors, ErrorCode::BoundTooLarge,
                  "trace bound " + std::to_string(bound) + " needs about " +
                      std::to_string(static_cast<long long>(en.estimated_count(bound))) + " vectors");
    const std::vector<Vec64> alpha = en.reduce_form(f.alpha);
    const std::vector<Vec64> beta = en.reduce_form(f.beta);
    const bool g2 = field.degree() == 2;

    std::unordered_map<std::int64_t, std::size_t> index;
    auto key = [](std::int64_t a, std::int64_t b) { return a * 1000003 + b; };
    for (std::size_t k = 0; k < th.nus.size(); ++k)
        index[key(to_int64(th.nus[k].a()), to_int64(th.nus[k].b()))] = k;

    const std::size_t n = en.dimension();
    auto eval = [n](const std::vector<Vec64>& g, const Vec64& y) {
        __int128 s = 0;
        for (std::size_t a = 0; a < n; ++a) {
            if (y[a] == 0)
                continue;
            __int128 row = static_cast<__int128>(g[a][a]) * y[a];
            for (std::size_t b = a + 1; b < n; ++b)
                row += 2 * static_cast<__int128>(g[a][b]) * y[b];
            s += row * y[a];
        }
        return static_cast<std::int64_t>(s / 2);
    };
    // The extra last slot counts values missing from the index; it must stay zero.
    const std::size_t slots = th.nus.size() + 1;
    std::vector<std::int64_t> found = en.enumerate(
        bound, opt.workers, std::vector<std::int64_t>(),
        [&](std::vector<std::int64_t>& acc, const Vec64& y, std::int64_t) {
            if (acc.empty())
                acc.assign(slots, 0);
            std::int64_t a = g2 ? eval(alpha, y) : en.value(y);
            std::int64_t b = g2 ? eval(beta, y) : 0;
            auto it = index.find(key(a, b));
            acc[it == index.end() ? slots - 1 : it->second] += 2;
        },
        [slots](std::vector<std::int64_t>& out, std::vector<std::int64_t>&& part) {
            if (part.empty())
                return;
            if (out.empty())
                out.assign(slots, 0);
            for (std::size_t k = 0; k < slots; ++k)
                out[k] += part[k];
        });
    if (!found.empty()) {
        EICHLER_CHECK(found.back() == 0, ErrorCode::Internal, "degree form value outside the theta index");
        for (std::size_t k = 0; k + 1 < slots; ++k)
            th.counts[k] += found[k];
    }
    return th;
}

/// Coefficient-wise difference in canonical nu order.
inline std::vector<std::int64_t> theta_difference(const ThetaSeries& a, const ThetaSeries& b)
{
    EICHLER_CHECK(a.d == b.d && a.bound == b.bound && a.nus == b.nus, ErrorCode::IncompatibleBounds,
                  "theta series have different fields or bounds");
    std::vector<std::int64_t> out(a.counts.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = a.counts[k] - b.counts[k];
    return out;
}

} // namespace eichler
