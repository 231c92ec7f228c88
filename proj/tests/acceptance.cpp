#include "eichler/report.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>

using namespace eichler;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Outcome()> body;
};

RunConfig config(int d, std::int64_t p, std::int64_t bound, OrderMode mode = OrderMode::LevelP,
                 std::vector<std::int64_t> hecke = {}, unsigned workers = 8)
{
    RunConfig cfg;
    cfg.d = d;
    cfg.p = p;
    cfg.bound = bound;
    cfg.mode = mode;
    cfg.hecke_primes = std::move(hecke);
    cfg.workers = workers;
    cfg.use_cache = false;
    return cfg;
}

std::vector<PrimeIdeal> primes_over(const Field& L, const std::vector<std::int64_t>& ells)
{
    std::vector<PrimeIdeal> out;
    for (auto ell : ells)
        for (const auto& P : primes_above(L, ell))
            out.push_back(P);
    return out;
}

/// Rational primes with a prime of norm at most 25 above them, other than p.
std::vector<std::int64_t> small_norm_primes(const Field& L, std::int64_t p)
{
    std::vector<std::int64_t> out;
    for (std::int64_t ell = 2; ell <= 25; ++ell) {
        if (!is_prime(ell) || ell == p)
            continue;
        for (const auto& P : primes_above(L, ell))
            if (P.norm <= 25) {
                out.push_back(ell);
                break;
            }
    }
    return out;
}

std::string join(const std::vector<std::string>& parts)
{
    std::string s;
    for (const auto& x : parts)
        s += (s.empty() ? "" : ", ") + x;
    return s;
}

bool mass_holds(const std::vector<int>& weights, const Rational& mass)
{
    Rational s = 0;
    for (int w : weights)
        s += Rational(1, w);
    s.canonicalize();
    return s == mass;
}

Outcome classical_span()
{
    std::vector<std::string> parts;
    bool ok = true;
    for (std::int64_t p : {11, 23, 37, 67}) {
        RunResult r = run(config(1, p, 50));
        int rank = r.report["span"]["rank"].get<int>();
        int genus = oracle::genus_x0(p);
        ok = ok && rank == genus && r.exit_code == 0;
        parts.push_back("p=" + std::to_string(p) + " rank " + std::to_string(rank) + "/genus " +
                        std::to_string(genus));
    }
    return {ok, join(parts)};
}

Outcome mass_identities()
{
    struct Case {
        RunConfig cfg;
        Rational mass;
        std::vector<int> weights;
    };
    std::vector<Case> cases{
        {config(1, 11, 2), Rational(5, 6), {2, 3}},
        {config(5, 2, 2, OrderMode::LevelOne), Rational(1, 60), {60}},
        {config(5, 2, 2), Rational(1, 12), {12}},
    };
    // Every other configuration exercised here must satisfy the identity too.
    for (auto [d, p, mode] : {std::tuple{1, 23, OrderMode::LevelP}, std::tuple{1, 37, OrderMode::LevelP},
                              std::tuple{1, 67, OrderMode::LevelP}, std::tuple{5, 3, OrderMode::LevelP},
                              std::tuple{5, 3, OrderMode::LevelOne}, std::tuple{5, 11, OrderMode::LevelP}})
        cases.push_back({config(d, p, 2, mode), Rational(-1), {}});
    bool ok = true;
    std::vector<std::string> parts;
    for (const auto& c : cases) {
        auto t0 = std::chrono::steady_clock::now();
        Computation comp = compute(c.cfg);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool good = mass_holds(comp.weights, comp.mass) && secs < 30;
        if (c.mass >= 0) {
            std::vector<int> w = comp.weights;
            std::sort(w.begin(), w.end());
            good = good && comp.mass == c.mass && w == c.weights;
        }
        ok = ok && good;
        parts.push_back("(" + std::to_string(c.cfg.d) + "," + std::to_string(c.cfg.p) + "," +
                        std::string(to_string(c.cfg.mode)) + ") " + to_string(comp.mass) +
                        (good ? "" : " MISMATCH"));
    }
    return {ok, join(parts)};
}

Outcome eigenvalues_at_eleven()
{
    Computation c = compute(config(1, 11, 7));
    auto f = oracle::eta_11(7);
    bool ok = true;
    std::vector<std::string> parts;
    for (std::int64_t q : {2, 3, 5, 7}) {
        auto sp = cuspidal_eigenvalues(brandt(c.field, c.weights, c.thetas, c.field.element(q).to_integer()), q);
        bool good = sp.rational_eigenvalues == std::vector<Rational>{Rational(f[q])};
        ok = ok && good;
        parts.push_back("a_" + std::to_string(q) + " = " +
                        (sp.rational_eigenvalues.empty() ? "?" : to_string(sp.rational_eigenvalues[0])) +
                        " (eta " + std::to_string(f[q]) + ")");
    }
    return {ok, join(parts)};
}

Outcome theta_vs_box()
{
    bool ok = true;
    std::vector<std::string> parts;
    for (auto [d, p] : {std::pair{1, 11}, std::pair{5, 2}, std::pair{5, 3}}) {
        const std::int64_t B = 10;
        Computation c = compute(config(d, p, B));
        std::size_t modules = 0, mismatches = 0;
        for (const auto& row : c.modules)
            for (const auto& m : row) {
                ++modules;
                auto ref = oracle::box_theta(c.field, m.lattice, m.normalizer, B);
                const auto& th = c.thetas[m.i][m.j];
                std::int64_t total = 0, ref_total = 0;
                for (std::size_t k = 0; k < th.nus.size(); ++k) {
                    auto key = std::make_pair(to_int64(th.nus[k].a()), to_int64(th.nus[k].b()));
                    auto it = ref.find(key);
                    mismatches += th.counts[k] != (it == ref.end() ? 0 : it->second);
                    total += th.counts[k];
                }
                for (const auto& [k, v] : ref)
                    ref_total += v;
                mismatches += total != ref_total;
            }
        ok = ok && mismatches == 0;
        parts.push_back("(" + std::to_string(d) + "," + std::to_string(p) + ") " + std::to_string(modules) +
                        " modules, " + std::to_string(mismatches) + " mismatches");
    }
    return {ok, join(parts)};
}

Outcome level_invariant()
{
    bool ok = true;
    std::size_t checked = 0;
    std::vector<std::string> parts;
    for (auto [d, p, mode] : {std::tuple{1, 11, OrderMode::LevelP}, std::tuple{1, 23, OrderMode::LevelP},
                              std::tuple{1, 67, OrderMode::LevelP}, std::tuple{5, 2, OrderMode::LevelP},
                              std::tuple{5, 2, OrderMode::LevelOne}, std::tuple{5, 3, OrderMode::LevelOne},
                              std::tuple{5, 11, OrderMode::LevelP}, std::tuple{2, 3, OrderMode::LevelP},
                              std::tuple{13, 2, OrderMode::LevelOne}}) {
        Computation c = compute(config(d, p, 0, mode));
        const FieldElement expected = c.field.element(mode == OrderMode::LevelP ? p : 1);
        bool good = true;
        for (const auto& row : c.modules)
            for (const auto& m : row) {
                good = good && gram_and_level(c.field, m).level == expected;
                ++checked;
            }
        ok = ok && good;
        if (!good)
            parts.push_back("(" + std::to_string(d) + "," + std::to_string(p) + ") wrong level");
    }
    parts.insert(parts.begin(), std::to_string(checked) + " modules over 9 configurations");
    return {ok, join(parts)};
}

struct HeckeRun {
    Computation comp;
    std::vector<PrimeIdeal> primes;
};

HeckeRun hecke_run(int d, std::int64_t p, std::int64_t bound)
{
    Computation c = compute(config(d, p, bound));
    auto primes = primes_over(c.field, small_norm_primes(c.field, p));
    return {std::move(c), primes};
}

Outcome hecke_suite(std::vector<HeckeRun>& runs)
{
    bool ok = true;
    std::vector<std::string> parts;
    for (auto [d, p, bound] : {std::tuple{1, 11, 529}, std::tuple{1, 23, 361}, std::tuple{5, 2, 45},
                               std::tuple{5, 11, 45}}) {
        runs.push_back(hecke_run(d, p, bound));
        const auto& r = runs.back();
        HeckeReport rep = hecke_property_suite(r.comp.field, r.comp.weights, r.comp.thetas, r.primes, p);
        // Every prime of norm at most 25 reaches at least its square.
        bool squares = true;
        for (const auto& P : r.primes) {
            if (P.norm > 25)
                continue;
            const std::string name = "power_recursion " + detail::gen_string(P.generator) + "^2";
            squares = squares && std::any_of(rep.checks.begin(), rep.checks.end(),
                                             [&](const HeckeCheck& c) { return c.name == name; });
        }
        std::size_t failed = std::count_if(rep.checks.begin(), rep.checks.end(),
                                           [](const HeckeCheck& c) { return !c.passed; });
        ok = ok && rep.passed() && squares;
        parts.push_back("(" + std::to_string(d) + "," + std::to_string(p) + ") " +
                        std::to_string(rep.checks.size()) + " identities, " + std::to_string(failed) +
                        " failed" + (squares ? "" : ", squares missing"));
    }
    return {ok, join(parts)};
}

Outcome hilbert_stability(std::vector<HeckeRun>& runs)
{
    const HeckeRun* r = nullptr;
    for (const auto& x : runs)
        if (x.comp.field.d() == 5 && x.comp.algebra.p() == 11)
            r = &x;
    if (!r)
        return {false, "no (Q(sqrt 5), 11) run"};
    ConsistencyReport rep = hilbert_consistency(r->comp.field, r->comp.weights, r->comp.thetas, r->primes);
    std::size_t stable = 0;
    for (const auto& c : rep.checks)
        stable += c.name.rfind("span_stable", 0) == 0 && c.passed;
    return {rep.passed() && rep.skipped == 0 && stable == r->primes.size(),
            "rank " + std::to_string(rep.rank) + ", H " + std::to_string(r->comp.weights.size()) + ", " +
                std::to_string(stable) + "/" + std::to_string(r->primes.size()) + " Brandt actions stable, " +
                std::to_string(rep.checks.size()) + " checks"};
}

Outcome determinism()
{
    bool ok = true;
    std::vector<std::string> parts;
    for (std::int64_t p : {11, 23, 37, 67}) {
        std::string a = report_body(run(config(1, p, 50, OrderMode::LevelP, {}, 1)).report).dump();
        std::string b = report_body(run(config(1, p, 50, OrderMode::LevelP, {}, 8)).report).dump();
        ok = ok && a == b;
        parts.push_back("p=" + std::to_string(p) + (a == b ? " identical" : " DIFFERENT"));
    }
    return {ok, join(parts)};
}

} // namespace

int main()
{
    std::vector<HeckeRun> hecke_runs;
    std::vector<Criterion> criteria{
        {1, "classical Eichler span", 60, classical_span},
        {2, "mass identities", 30 * 9, mass_identities},
        {3, "Brandt eigenvalues at p = 11", 10, eigenvalues_at_eleven},
        {4, "theta against box scan", 120, theta_vs_box},
        {5, "Hom-module level", 120, level_invariant},
        {6, "Hecke property suite", 300, [&] { return hecke_suite(hecke_runs); }},
        {7, "Hilbert Hecke stability", 60, [&] { return hilbert_stability(hecke_runs); }},
        {8, "determinism across worker counts", 120, determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = o.passed && secs <= c.limit_seconds;
        failures += !pass;
        std::printf("%s  criterion %d: %s (%.2fs, limit %.0fs) %s\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    secs, c.limit_seconds, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
