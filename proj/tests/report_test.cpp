#include "eichler/report.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

using namespace eichler;
namespace fs = std::filesystem;

namespace {

RunConfig config(int d, std::int64_t p, std::int64_t bound, OrderMode mode = OrderMode::LevelP,
                 std::vector<std::int64_t> hecke = {})
{
    RunConfig cfg;
    cfg.d = d;
    cfg.p = p;
    cfg.bound = bound;
    cfg.mode = mode;
    cfg.hecke_primes = std::move(hecke);
    cfg.workers = 2;
    cfg.use_cache = false;
    return cfg;
}

Json load(const fs::path& path)
{
    std::ifstream in(path);
    return Json::parse(in);
}

fs::path scratch(const std::string& name)
{
    fs::path dir = fs::temp_directory_path() / ("eichler_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args)
{
    std::string cmd = std::string(EICHLER_CLI) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST(Report, GoldenFiles)
{
    const fs::path dir = EICHLER_GOLDEN_DIR;
    struct Case {
        std::string file;
        RunConfig cfg;
    };
    std::vector<Case> cases{
        {"q_p11_b30.json", config(1, 11, 30)},
        {"q_p23_b30.json", config(1, 23, 30)},
        {"k5_p2_b10.json", config(5, 2, 10, OrderMode::LevelP, {3, 5})},
        {"k5_p2_one_b10.json", config(5, 2, 10, OrderMode::LevelOne, {3, 5})},
        {"k5_p11_b8.json", config(5, 11, 8)},
    };
    for (const auto& c : cases) {
        RunResult r = run(c.cfg);
        EXPECT_EQ(r.exit_code, 0) << c.file;
        EXPECT_EQ(report_body(r.report).dump(2), load(dir / c.file).dump(2)) << c.file;
    }
}

TEST(Report, KeysInFixedOrder)
{
    RunResult r = run(config(1, 11, 10));
    std::vector<std::string> keys;
    for (const auto& [k, v] : r.report.items())
        keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"schema_version", "config", "field", "algebra", "order", "mass",
                                              "class_count", "classes", "unit_weights", "modules", "theta",
                                              "brandt", "hecke_checks", "span", "consistency", "status",
                                              "timings"}));
    EXPECT_EQ(r.report["mass"], "5/6");
    EXPECT_EQ(r.report["class_count"], 2);
}

TEST(Report, WorkerCountDoesNotChangeTheBody)
{
    for (std::int64_t p : {11, 37}) {
        RunConfig a = config(1, p, 50), b = a;
        a.workers = 1;
        b.workers = 8;
        EXPECT_EQ(report_body(run(a).report).dump(), report_body(run(b).report).dump());
    }
    RunConfig a = config(5, 11, 12), b = a;
    a.workers = 1;
    b.workers = 8;
    EXPECT_EQ(report_body(run(a).report).dump(), report_body(run(b).report).dump());
}

TEST(Cache, ColdAndWarmRunsAgree)
{
    fs::path dir = scratch("cache");
    RunConfig cfg = config(5, 11, 6);
    cfg.use_cache = true;
    cfg.cache_dir = dir.string();
    RunResult cold = run(cfg);
    EXPECT_FALSE(cold.report["timings"]["cache_hit"].get<bool>());
    const fs::path entry = dir / "v1_d5_p11_level_p_l2.json";
    ASSERT_TRUE(fs::exists(entry));
    RunResult warm = run(cfg);
    EXPECT_TRUE(warm.report["timings"]["cache_hit"].get<bool>());
    EXPECT_EQ(report_body(cold.report).dump(), report_body(warm.report).dump());

    cfg.use_cache = false;
    RunResult bypass = run(cfg);
    EXPECT_FALSE(bypass.report["timings"]["cache_hit"].get<bool>());
}

TEST(Cache, CorruptedEntriesAreRecomputed)
{
    fs::path dir = scratch("corrupt");
    RunConfig cfg = config(1, 37, 10);
    cfg.use_cache = true;
    cfg.cache_dir = dir.string();
    const std::string body = report_body(run(cfg).report).dump();
    const fs::path entry = dir / "v1_d1_p37_level_p_l2.json";
    ASSERT_TRUE(fs::exists(entry));

    {
        std::ofstream(entry) << "{ not json";
    }
    RunResult r = run(cfg);
    EXPECT_FALSE(r.report["timings"]["cache_hit"].get<bool>());
    EXPECT_EQ(report_body(r.report).dump(), body);

    // A well-formed entry with a wrong weight is rejected as well.
    Json j = load(entry);
    j["classes"][0]["weight"] = 7;
    {
        std::ofstream(entry) << j.dump();
    }
    r = run(cfg);
    EXPECT_FALSE(r.report["timings"]["cache_hit"].get<bool>());
    EXPECT_EQ(report_body(r.report).dump(), body);

    // Entries written under another schema version are ignored.
    j = load(entry);
    j["schema_version"] = schema_version + 1;
    {
        std::ofstream(entry) << j.dump();
    }
    r = run(cfg);
    EXPECT_FALSE(r.report["timings"]["cache_hit"].get<bool>());
}

TEST(Cache, KeyIncludesAuxiliaryPrime)
{
    fs::path dir = scratch("aux");
    RunConfig cfg = config(1, 11, 4);
    cfg.use_cache = true;
    cfg.cache_dir = dir.string();
    cfg.aux_prime = 3;
    std::string b3 = report_body(run(cfg).report).dump();
    EXPECT_TRUE(fs::exists(dir / "v1_d1_p11_level_p_l3.json"));
    cfg.aux_prime = 2;
    Json r2 = report_body(run(cfg).report);
    EXPECT_TRUE(fs::exists(dir / "v1_d1_p11_level_p_l2.json"));
    EXPECT_EQ(r2["class_count"], 2);
}

TEST(Validation, ErrorCodes)
{
    auto code = [](RunConfig cfg) {
        try {
            run(cfg);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Internal;
    };
    EXPECT_EQ(code(config(5, 5, 10)), ErrorCode::RamifiedPrime);
    EXPECT_EQ(code(config(5, 11, 10, OrderMode::LevelOne)), ErrorCode::LevelOneImpossible);
    EXPECT_EQ(code(config(1, 11, 10, OrderMode::LevelOne)), ErrorCode::LevelOneImpossible);
    EXPECT_EQ(code(config(3, 11, 10)), ErrorCode::UnsupportedField);
    EXPECT_EQ(code(config(1, 15, 10)), ErrorCode::CompositeP);
    EXPECT_EQ(code(config(1, 11, 10, OrderMode::LevelP, {11})), ErrorCode::BadPrime);
    EXPECT_EQ(code(config(1, 11, 2, OrderMode::LevelP, {3})), ErrorCode::CoefficientOutOfRange);
    RunConfig aux = config(1, 11, 10);
    aux.aux_prime = 11;
    EXPECT_EQ(code(aux), ErrorCode::BadPrime);
    EXPECT_EQ(code(config(1, 11, -1)), ErrorCode::InvalidArgument);
}

TEST(Cli, ExitCodesAndOutput)
{
    fs::path dir = scratch("cli");
    const std::string out = (dir / "r.json").string();
    EXPECT_EQ(run_cli("--field 1 --prime 11 --bound 30 --no-cache --out " + out), 0);
    Json r = load(out);
    EXPECT_EQ(r["class_count"], 2);
    EXPECT_EQ(r["span"]["rank"], 1);
    EXPECT_EQ(run_cli("--field 1 --prime 11 --mode level_p --bound 20 --aux-prime 3 --hecke 2,3,5 --workers 3 "
                      "--cache " +
                      (dir / "c").string() + " --out " + out),
              0);
    EXPECT_TRUE(fs::exists(dir / "c" / "v1_d1_p11_level_p_l3.json"));
    EXPECT_EQ(load(out)["brandt"].size(), 3u);
    EXPECT_EQ(run_cli("--field 5 --prime 5 --bound 10 --no-cache"), 1);
    EXPECT_EQ(run_cli("--field 5 --prime 11 --mode level_one --bound 10 --no-cache"), 1);
    EXPECT_EQ(run_cli("--field 1 --prime 11 --mode level_two --bound 10"), 1);
    EXPECT_EQ(run_cli("--field 1 --prime 11"), 1);
    // Too small a bound for the span at p = 67 is a property failure, not an error.
    EXPECT_EQ(run_cli("--field 1 --prime 67 --bound 4 --no-cache --out " + out), 2);
    EXPECT_EQ(load(out)["status"], "fail");
}
