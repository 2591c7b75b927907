#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fvbs/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"fvbs - TPFA B-scheme solver with uniform-bound verification"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool quiet = false;

    std::string verb;
    const std::pair<const char*, const char*> verbs[] = {
        {"solve", "assemble and solve the configured problem"},
        {"verify", "run the seeded bound-audit suite"},
        {"calibrate", "calibrate cascade constants across refinements"},
        {"mesh-check", "report mesh admissibility"},
    };
    for (auto [name, desc] : verbs) {
        auto* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "config file path")->required();
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
            seed_set = true;
        });
        sub->add_flag("--quiet", quiet, "suppress progress output");
        sub->callback([&verb, name] { verb = name; });
    }

    CLI11_PARSE(app, argc, argv);

    fvbs::RunConfig config;
    try {
        config = fvbs::parse_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return fvbs::kExitConfig;
    }
    if (!out_dir.empty()) config.output.dir = out_dir;
    if (seed_set) config.degiorgi.seed = seed;
    if (quiet) config.quiet = true;

    return fvbs::dispatch(verb, config, quiet ? std::cerr : std::cout);
}
