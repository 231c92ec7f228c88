#include "eichler/eichler.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char** argv)
{
    using namespace eichler;
    CLI::App app{"Theta series, Brandt matrices and the Eichler basis check for definite quaternion algebras"};
    RunConfig cfg;
    std::string mode = "level_p";
    std::int64_t aux = 0;
    bool no_cache = false;
    app.add_option("--field", cfg.d, "d with L = Q(sqrt d), 1 for Q")->required();
    app.add_option("--prime", cfg.p, "the prime p")->required();
    app.add_option("--mode", mode, "level_p or level_one")->check(CLI::IsMember({"level_p", "level_one"}));
    app.add_option("--bound", cfg.bound, "trace bound B")->required();
    app.add_option("--aux-prime", aux, "rational prime for the neighbor search");
    app.add_option("--hecke", cfg.hecke_primes, "rational Hecke primes")->delimiter(',');
    app.add_option("--out", cfg.out, "output path, stdout when absent");
    app.add_option("--cache", cfg.cache_dir, "cache directory");
    app.add_option("--workers", cfg.workers, "enumeration threads");
    app.add_flag("--no-cache", no_cache, "neither read nor write the cache");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    cfg.use_cache = !no_cache;
    if (app.count("--aux-prime"))
        cfg.aux_prime = aux;

    try {
        cfg.mode = parse_mode(mode);
        RunResult r = run(cfg);
        const std::string text = r.report.dump(2) + "\n";
        if (cfg.out.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(cfg.out);
            out << text;
            if (!out)
                throw Error(ErrorCode::InvalidArgument, "cannot write " + cfg.out);
        }
        if (r.exit_code != 0)
            std::cerr << "property check failed, see the report\n";
        return r.exit_code;
    } catch (const Error& e) {
        Json err{{"schema_version", schema_version},
                 {"error", Json{{"code", to_string(e.code())}, {"message", e.what()}}}};
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
