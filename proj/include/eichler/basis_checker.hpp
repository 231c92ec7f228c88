#pragma once

// Rank of the span of theta differences and its consistency checks.

#include "eichler/brandt.hpp"

#include <map>

namespace eichler {

struct SpanReport {
    std::size_t H = 0;
    std::int64_t bound = 0;
    std::size_t rank = 0;
    std::optional<int> expected;  // classical dimension, L = Q only
    bool verdict = true;
    std::vector<AlgebraicInteger> pivots;
    /// Smallest trace at which the final rank is already reached.
    std::int64_t stabilized_at = 0;
    /// True when the rank did not grow over the upper half of the trace range.
    bool stabilized = true;
};

/// dim S_2(Gamma_0(p)) for p prime.
inline int classical_dimension(std::int64_t p)
{
    EICHLER_CHECK(is_prime(p), ErrorCode::CompositeP, std::to_string(p) + " is not prime");
    if (p < 5)
        return 0;
    int g = static_cast<int>((p + 1) / 12);
    return p % 12 == 1 ? g - 1 : g;
}

inline std::int64_t trace_of(const AlgebraicInteger& nu)
{
    return nu.shape().degree == 1 ? to_int64(nu.a()) : to_int64(nu.trace());
}

namespace detail {

/// Rows theta_ij - theta_1j for i >= 2, all j.
inline IntMatrix difference_rows(const ThetaTable& thetas)
{
    IntMatrix rows;
    const std::size_t H = thetas.size();
    for (std::size_t i = 1; i < H; ++i)
        for (std::size_t j = 0; j < H; ++j) {
            auto diff = theta_difference(thetas[i][j], thetas[0][j]);
            rows.emplace_back(diff.begin(), diff.end());
        }
    return rows;
}

} // namespace detail

inline SpanReport span_rank(const Field& field, const ThetaTable& thetas, std::int64_t p)
{
    SpanReport rep;
    rep.H = thetas.size();
    rep.bound = thetas.at(0).at(0).bound;
    const auto& nus = thetas[0][0].nus;
    RankResult rr = bareiss_rank(detail::difference_rows(thetas));
    rep.rank = rr.rank;
    for (auto c : rr.pivot_columns)
        rep.pivots.push_back(nus[c]);
    rep.stabilized_at = rep.pivots.empty() ? 0 : trace_of(rep.pivots.back());
    rep.stabilized = 2 * rep.stabilized_at <= rep.bound;
    if (field.degree() == 1) {
        rep.expected = classical_dimension(p);
        rep.verdict = static_cast<int>(rep.rank) == *rep.expected;
    } else {
        rep.verdict = rep.rank + 1 <= rep.H;
    }
    return rep;
}

struct ConsistencyReport {
    std::size_t rank = 0;
    std::size_t distinct_rows = 0;  // classes with distinct theta rows
    bool rank_matches_rows = true;  // rank == distinct_rows - 1, reported only
    std::vector<HeckeCheck> checks;
    std::size_t skipped = 0;

    bool passed() const
    {
        return std::all_of(checks.begin(), checks.end(), [](const HeckeCheck& c) { return c.passed; });
    }
};

/* (a) rank against the number of distinct theta rows, (b) stability of the
 * difference span under the Brandt action on the first index, together with
 * T_q theta_ij = sum_k b_ik(q) theta_kj on the q-expansions, and (c) the
 * weighted sum sum_j theta_ij / w_j being independent of i.
 */
inline ConsistencyReport hilbert_consistency(const Field& field, const std::vector<int>& weights,
                                             const ThetaTable& thetas, const std::vector<PrimeIdeal>& primes)
{
    ConsistencyReport rep;
    const std::size_t H = weights.size();
    const auto& nus = thetas[0][0].nus;
    const std::size_t n = nus.size();
    IntMatrix diffs = detail::difference_rows(thetas);
    rep.rank = bareiss_rank(diffs).rank;

    std::vector<std::vector<std::int64_t>> class_rows;
    for (std::size_t i = 0; i < H; ++i) {
        std::vector<std::int64_t> row;
        for (std::size_t j = 0; j < H; ++j)
            row.insert(row.end(), thetas[i][j].counts.begin(), thetas[i][j].counts.end());
        if (std::find(class_rows.begin(), class_rows.end(), row) == class_rows.end())
            class_rows.push_back(std::move(row));
    }
    rep.distinct_rows = class_rows.size();
    rep.rank_matches_rows = rep.rank + 1 == rep.distinct_rows;

    std::map<std::pair<std::int64_t, std::int64_t>, std::size_t> pos;
    for (std::size_t k = 0; k < n; ++k)
        pos[{to_int64(nus[k].a()), to_int64(nus[k].b())}] = k;
    auto position = [&](const AlgebraicInteger& x) -> std::optional<std::size_t> {
        auto it = pos.find({to_int64(x.a()), to_int64(x.b())});
        if (it == pos.end())
            return std::nullopt;
        return it->second;
    };

    for (const auto& P : primes) {
        const std::string tag = detail::gen_string(P.generator);
        if (!brandt_available(field, thetas, P.generator)) {
            ++rep.skipped;
            continue;
        }
        const IntMatrix b = brandt(field, weights, thetas, P.generator).entries;
        // (b) Brandt images of the differences stay in their span.
        IntMatrix extended = diffs;
        for (std::size_t i = 1; i < H; ++i)
            for (std::size_t j = 0; j < H; ++j) {
                IntVector row(n, 0);
                for (std::size_t k = 0; k < H; ++k) {
                    Integer c = b[i][k] - b[0][k];
                    if (c == 0)
                        continue;
                    for (std::size_t m = 0; m < n; ++m)
                        row[m] += c * thetas[k][j].counts[m];
                }
                extended.push_back(std::move(row));
            }
        rep.checks.push_back({"span_stable " + tag, bareiss_rank(extended).rank == rep.rank, ""});

        // T_q on q-expansions, for every nu with q nu inside the table.
        const FieldElement pinv = FieldElement(P.generator).inverse();
        bool equivariant = true;
        std::size_t tested = 0;
        for (std::size_t m = 1; m < n; ++m) {
            auto up = position(canonical_generator(field, nus[m] * P.generator));
            if (!up)
                continue;
            std::optional<std::size_t> down;
            FieldElement q = FieldElement(nus[m]) * pinv;
            if (q.is_integral()) {
                down = position(canonical_generator(field, q.to_integer()));
                EICHLER_CHECK(down.has_value(), ErrorCode::Internal, "divisor outside the theta table");
            }
            ++tested;
            for (std::size_t i = 0; i < H; ++i)
                for (std::size_t j = 0; j < H; ++j) {
                    Integer lhs = thetas[i][j].counts[*up];
                    if (down)
                        lhs += P.norm * thetas[i][j].counts[*down];
                    Integer rhs = 0;
                    for (std::size_t k = 0; k < H; ++k)
                        rhs += b[i][k] * thetas[k][j].counts[m];
                    equivariant = equivariant && lhs == rhs;
                }
        }
        rep.checks.push_back({"hecke_equivariant " + tag, equivariant, std::to_string(tested) + " coefficients"});
    }

    // (c) Eisenstein exclusion.
    bool eis = true;
    for (std::size_t m = 0; m < n; ++m) {
        Rational ref;
        for (std::size_t i = 0; i < H; ++i) {
            Rational s = 0;
            for (std::size_t j = 0; j < H; ++j)
                s += Rational(thetas[i][j].counts[m], weights[j]);
            s.canonicalize();
            if (i == 0)
                ref = s;
            eis = eis && s == ref;
        }
    }
    rep.checks.push_back({"eisenstein_weighted_sum", eis, ""});
    return rep;
}

} // namespace eichler
