#pragma once

// Run configuration, the full pipeline, the JSON report, and the ideal class cache.

#include "eichler/basis_checker.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace eichler {

using Json = nlohmann::ordered_json;

inline constexpr int schema_version = 1;

struct RunConfig {
    int d = 1;
    std::int64_t p = 0;
    OrderMode mode = OrderMode::LevelP;
    std::int64_t bound = 0;
    std::optional<std::int64_t> aux_prime;
    std::vector<std::int64_t> hecke_primes;
    std::string out;
    std::string cache_dir;
    unsigned workers = 1;
    bool use_cache = true;
};

inline OrderMode parse_mode(const std::string& s)
{
    if (s == "level_p")
        return OrderMode::LevelP;
    if (s == "level_one")
        return OrderMode::LevelOne;
    throw Error(ErrorCode::InvalidArgument, "unknown mode " + s);
}

/// The smallest rational prime other than p, or the given one after validation.
inline std::int64_t resolve_aux_prime(const RunConfig& cfg)
{
    if (cfg.aux_prime) {
        EICHLER_CHECK(is_prime(*cfg.aux_prime), ErrorCode::BadPrime,
                      std::to_string(*cfg.aux_prime) + " is not prime");
        EICHLER_CHECK(*cfg.aux_prime != cfg.p, ErrorCode::BadPrime, "auxiliary prime equals p");
        return *cfg.aux_prime;
    }
    std::int64_t ell = 2;
    while (ell == cfg.p)
        ell = ell == 2 ? 3 : ell + 2;
    return ell;
}

inline std::vector<std::int64_t> resolve_hecke_primes(const RunConfig& cfg)
{
    if (!cfg.hecke_primes.empty()) {
        for (auto q : cfg.hecke_primes) {
            EICHLER_CHECK(is_prime(q), ErrorCode::BadPrime, std::to_string(q) + " is not prime");
            EICHLER_CHECK(q != cfg.p, ErrorCode::BadPrime, "Hecke prime equals p");
        }
        return cfg.hecke_primes;
    }
    std::vector<std::int64_t> out;
    for (std::int64_t q = 2; out.size() < 2; ++q)
        if (is_prime(q) && q != cfg.p)
            out.push_back(q);
    return out;
}

/// Feasibility checks shared by the CLI and the pipeline.
inline void validate(const RunConfig& cfg)
{
    Field field = Field::make(cfg.d);
    EICHLER_CHECK(cfg.bound >= 0, ErrorCode::InvalidArgument, "trace bound must be nonnegative");
    EICHLER_CHECK(cfg.workers >= 1, ErrorCode::InvalidArgument, "worker count must be positive");
    EICHLER_CHECK(is_prime(cfg.p), ErrorCode::CompositeP, std::to_string(cfg.p) + " is not prime");
    EICHLER_CHECK(field.discriminant() % cfg.p != 0, ErrorCode::RamifiedPrime,
                  std::to_string(cfg.p) + " ramifies in L");
    level_data(field, cfg.p, cfg.mode);
    resolve_aux_prime(cfg);
    resolve_hecke_primes(cfg);
}

struct ClassSet {
    QuaternionLattice order;
    std::vector<IdealClass> classes;
    bool from_cache = false;
};

namespace detail {

inline Json integer_json(const Integer& x)
{
    if (x.fits_slong_p())
        return x.get_si();
    return x.get_str();
}

inline Json lattice_json(const QuaternionLattice& lat)
{
    Json rows = Json::array();
    for (const auto& r : lat.hnf()) {
        Json row = Json::array();
        for (const auto& c : r)
            row.push_back(c.get_str());
        rows.push_back(row);
    }
    return Json{{"den", lat.denominator().get_str()}, {"hnf", rows}};
}

inline QuaternionLattice lattice_from_json(QuaternionShape shape, const Json& j)
{
    IntMatrix hnf;
    for (const auto& r : j.at("hnf")) {
        IntVector row;
        for (const auto& c : r)
            row.emplace_back(c.get<std::string>());
        hnf.push_back(std::move(row));
    }
    return QuaternionLattice::from_hnf(shape, hnf, Integer(j.at("den").get<std::string>()));
}

inline Json element_json(const AlgebraicInteger& x)
{
    return Json::array({integer_json(x.a()), integer_json(x.b())});
}

inline Json field_element_json(const FieldElement& x)
{
    return Json::array({to_string(x.a()), to_string(x.b())});
}

inline std::string cache_path(const RunConfig& cfg, std::int64_t ell)
{
    std::ostringstream s;
    s << "v" << schema_version << "_d" << cfg.d << "_p" << cfg.p << "_" << to_string(cfg.mode) << "_l" << ell
      << ".json";
    return (std::filesystem::path(cfg.cache_dir) / s.str()).string();
}

inline Json class_set_json(const RunConfig& cfg, std::int64_t ell, const ClassSet& cs)
{
    Json classes = Json::array();
    for (const auto& c : cs.classes)
        classes.push_back(Json{{"lattice", lattice_json(c.ideal.lattice)},
                               {"norm", field_element_json(c.ideal.norm)},
                               {"weight", c.weight}});
    return Json{{"schema_version", schema_version},
                {"d", cfg.d},
                {"p", cfg.p},
                {"mode", to_string(cfg.mode)},
                {"aux_prime", ell},
                {"order", lattice_json(cs.order)},
                {"classes", classes}};
}

/* Rebuilds a cached class set, accepting it only when it matches the order,
 * every ideal is a left ideal of it with the recorded norm and weight, and the
 * weights sum to the mass.
 */
inline std::optional<ClassSet> class_set_from_json(const Field& field, const QuaternionAlgebra& B,
                                                   const QuaternionLattice& order, const Rational& mass,
                                                   const Json& j)
{
    if (j.at("schema_version").get<int>() != schema_version)
        return std::nullopt;
    if (!(lattice_from_json(B.shape(), j.at("order")) == order))
        return std::nullopt;
    ClassSet cs{order, {}, true};
    Rational total = 0;
    for (const auto& c : j.at("classes")) {
        QuaternionLattice lat = lattice_from_json(B.shape(), c.at("lattice"));
        const auto& n = c.at("norm");
        FieldElement norm(field.shape(), Rational(n.at(0).get<std::string>()),
                          Rational(n.at(1).get<std::string>()));
        if (!(left_order(lat) == order) || !(ideal_norm(field, lat) == norm))
            return std::nullopt;
        QuaternionLattice R = right_order(lat);
        int w = unit_weight(field, R);
        if (w != c.at("weight").get<int>())
            return std::nullopt;
        cs.classes.push_back({LeftIdeal{lat, norm}, R, w});
        total += Rational(1, w);
        total.canonicalize();
    }
    if (total != mass)
        return std::nullopt;
    return cs;
}

} // namespace detail

/// The ideal classes of the order for the configured mode, through the cache when enabled.
inline ClassSet class_set(const RunConfig& cfg, const QuaternionAlgebra& B, const Rational& mass)
{
    const Field& field = B.field();
    const std::int64_t ell = resolve_aux_prime(cfg);
    QuaternionLattice order = cfg.mode == OrderMode::LevelP ? standard_order(B) : level_one_order(B);
    const bool cached = cfg.use_cache && !cfg.cache_dir.empty();
    const std::string path = cached ? detail::cache_path(cfg, ell) : "";
    if (cached && std::filesystem::exists(path)) {
        std::optional<ClassSet> cs;
        try {
            std::ifstream in(path);
            cs = detail::class_set_from_json(field, B, order, mass, Json::parse(in));
        } catch (const std::exception&) {
            cs.reset();
        }
        if (cs)
            return *cs;
        std::cerr << "warning: ignoring corrupted cache entry " << path << "\n";
    }
    ClassSet cs{order, ideal_classes(field, order, primes_above(field, ell).at(0), cfg.p, mass), false};
    if (cached) {
        std::filesystem::create_directories(cfg.cache_dir);
        const std::string tmp = path + ".tmp";
        {
            std::ofstream out(tmp);
            out << detail::class_set_json(cfg, ell, cs).dump() << "\n";
        }
        std::filesystem::rename(tmp, path);
    }
    return cs;
}

/// Everything the report is built from.
struct Computation {
    Field field;
    QuaternionAlgebra algebra;
    std::vector<PrimeIdeal> ramified;
    Rational mass;
    ClassSet classes;
    std::vector<int> weights;
    std::vector<std::vector<QuadraticModule>> modules;
    ThetaTable thetas;
    std::vector<std::pair<std::string, double>> timings;
};

inline Computation compute(const RunConfig& cfg)
{
    validate(cfg);
    using clock = std::chrono::steady_clock;
    std::vector<std::pair<std::string, double>> timings;
    auto t0 = clock::now();
    auto lap = [&](const std::string& name) {
        auto t1 = clock::now();
        timings.emplace_back(name, std::chrono::duration<double>(t1 - t0).count());
        t0 = t1;
    };
    Field field = Field::make(cfg.d);
    QuaternionAlgebra B = construct_algebra(field, cfg.p);
    std::vector<PrimeIdeal> ramified = verify_ramification(B);
    Rational mass = mass_formula(field, cfg.p, cfg.mode);
    lap("algebra");
    ClassSet cs = class_set(cfg, B, mass);
    lap("classes");
    const std::size_t H = cs.classes.size();
    std::vector<int> weights;
    for (const auto& c : cs.classes)
        weights.push_back(c.weight);
    std::vector<std::vector<QuadraticModule>> modules(H);
    for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = 0; j < H; ++j) {
            modules[i].push_back(hom_module(field, cs.classes[i].ideal, cs.classes[j].ideal, i, j));
            check_level(field, modules[i][j], cfg.p, cfg.mode);
        }
    lap("modules");
    ThetaTable thetas(H);
    for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = 0; j < H; ++j)
            thetas[i].push_back(theta(field, modules[i][j], cfg.bound, {cfg.workers, 2e8}));
    lap("theta");
    return {field, B, ramified, mass, std::move(cs), weights, std::move(modules), std::move(thetas), timings};
}

struct RunResult {
    Json report;
    int exit_code = 0;  // 0 all checks pass, 2 a property check failed
};

inline RunResult run(const RunConfig& cfg)
{
    Computation c = compute(cfg);
    auto t0 = std::chrono::steady_clock::now();
    const Field& field = c.field;
    const std::size_t H = c.weights.size();
    bool ok = true;

    std::vector<PrimeIdeal> hecke;
    for (auto q : resolve_hecke_primes(cfg))
        for (const auto& P : primes_above(field, q))
            hecke.push_back(P);

    Json report;
    report["schema_version"] = schema_version;
    Json hecke_cfg = Json::array();
    for (auto q : resolve_hecke_primes(cfg))
        hecke_cfg.push_back(q);
    report["config"] = Json{{"field", cfg.d},
                            {"prime", cfg.p},
                            {"mode", to_string(cfg.mode)},
                            {"bound", cfg.bound},
                            {"aux_prime", resolve_aux_prime(cfg)},
                            {"hecke_primes", hecke_cfg}};
    Json ram = Json::array();
    for (const auto& P : c.ramified)
        ram.push_back(detail::element_json(P.generator));
    report["field"] = Json{{"d", cfg.d}, {"discriminant", detail::integer_json(field.discriminant())}};
    report["algebra"] = Json{{"a", c.algebra.a()}, {"b", c.algebra.b()}, {"ramified_primes", ram}};

    Json basis = Json::array();
    for (const auto& x : c.classes.order.z_basis()) {
        Json v = Json::array();
        for (const auto& q : x.to_rational_vector())
            v.push_back(to_string(q));
        basis.push_back(v);
    }
    report["order"] = Json{{"basis", basis},
                           {"discriminant", detail::field_element_json(reduced_discriminant(field, c.classes.order))}};
    report["mass"] = to_string(c.mass);
    report["class_count"] = H;
    Json classes = Json::array();
    for (std::size_t i = 0; i < H; ++i)
        classes.push_back(Json{{"index", i},
                               {"norm", detail::field_element_json(c.classes.classes[i].ideal.norm)},
                               {"weight", c.weights[i]}});
    report["classes"] = classes;
    report["unit_weights"] = c.weights;

    Json levels = Json::array();
    for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = 0; j < H; ++j) {
            GramLevel gl = gram_and_level(field, c.modules[i][j]);
            levels.push_back(Json{{"i", i},
                                  {"j", j},
                                  {"determinant", detail::field_element_json(gl.determinant)},
                                  {"level", detail::field_element_json(gl.level)}});
        }
    report["modules"] = levels;

    Json thetas = Json::array();
    for (std::size_t i = 0; i < H; ++i)
        for (std::size_t j = 0; j < H; ++j) {
            const auto& th = c.thetas[i][j];
            Json coeffs = Json::array();
            for (std::size_t k = 0; k < th.nus.size(); ++k)
                coeffs.push_back(Json{{"nu", detail::element_json(th.nus[k])}, {"count", th.counts[k]}});
            thetas.push_back(Json{{"i", i}, {"j", j}, {"coefficients", coeffs}});
        }
    report["theta"] = Json{{"bound", cfg.bound}, {"series", thetas}};

    Json brandt_json = Json::array();
    for (const auto& P : hecke) {
        EICHLER_CHECK(brandt_available(field, c.thetas, P.generator), ErrorCode::CoefficientOutOfRange,
                      "Hecke prime " + detail::gen_string(P.generator) + " needs a trace bound of at least " +
                          std::to_string(trace_of(P.generator)));
        BrandtMatrix b = brandt(field, c.weights, c.thetas, P.generator);
        CuspidalSpectrum sp = cuspidal_eigenvalues(b, P.norm);
        Json m = Json::array();
        for (const auto& row : b.entries) {
            Json r = Json::array();
            for (const auto& x : row)
                r.push_back(detail::integer_json(x));
            m.push_back(r);
        }
        auto poly = [](const IntPoly& p) {
            Json out = Json::array();
            for (const auto& x : p)
                out.push_back(detail::integer_json(x));
            return out;
        };
        Json rat = Json::array();
        for (const auto& x : sp.rational_eigenvalues)
            rat.push_back(to_string(x));
        Json irr = Json::array();
        for (const auto& iv : sp.irrational_eigenvalues)
            irr.push_back(Json::array({to_string(iv.lo), to_string(iv.hi)}));
        ok = ok && sp.ramanujan;
        brandt_json.push_back(Json{{"prime", detail::element_json(P.generator)},
                                   {"norm", detail::integer_json(P.norm)},
                                   {"matrix", m},
                                   {"charpoly", poly(sp.charpoly)},
                                   {"cuspidal_charpoly", poly(sp.cuspidal_poly)},
                                   {"rational_eigenvalues", rat},
                                   {"irrational_eigenvalues", irr},
                                   {"ramanujan", sp.ramanujan}});
    }
    report["brandt"] = brandt_json;

    auto checks_json = [](const std::vector<HeckeCheck>& checks) {
        Json out = Json::array();
        for (const auto& ch : checks)
            out.push_back(Json{{"name", ch.name}, {"passed", ch.passed}});
        return out;
    };
    HeckeReport hr = hecke_property_suite(field, c.weights, c.thetas, hecke, cfg.p);
    ok = ok && hr.passed();
    report["hecke_checks"] = Json{{"passed", hr.passed()}, {"skipped", hr.skipped}, {"checks", checks_json(hr.checks)}};

    SpanReport sr = span_rank(field, c.thetas, cfg.p);
    ok = ok && sr.verdict;
    Json pivots = Json::array();
    for (const auto& nu : sr.pivots)
        pivots.push_back(detail::element_json(nu));
    report["span"] = Json{{"H", sr.H},
                          {"bound", sr.bound},
                          {"rank", sr.rank},
                          {"expected", sr.expected ? Json(*sr.expected) : Json(nullptr)},
                          {"verdict", sr.verdict},
                          {"pivots", pivots},
                          {"stabilized_at", sr.stabilized_at},
                          {"stabilized", sr.stabilized}};

    ConsistencyReport cr = hilbert_consistency(field, c.weights, c.thetas, hecke);
    ok = ok && cr.passed();
    report["consistency"] = Json{{"rank", cr.rank},
                                 {"distinct_rows", cr.distinct_rows},
                                 {"rank_matches_rows", cr.rank_matches_rows},
                                 {"skipped", cr.skipped},
                                 {"checks", checks_json(cr.checks)}};
    report["status"] = ok ? "pass" : "fail";

    c.timings.emplace_back("hecke_and_span",
                           std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    Json timings;
    for (const auto& [name, secs] : c.timings)
        timings[name] = secs;
    timings["cache_hit"] = c.classes.from_cache;
    report["timings"] = timings;
    return {report, ok ? 0 : 2};
}

/// The report without its timings, the part that must be reproducible.
inline Json report_body(Json report)
{
    report.erase("timings");
    return report;
}

} // namespace eichler
