// adsholo command-line runner.
//
//   adsholo <command> [--config FILE] [--out DIR] [--seed N]
//   adsholo --print-defaults
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error.

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "adsholo/config.hpp"

int main(int argc, char** argv) {
    using namespace adsholo;

    CLI::App app{"AdS2 strip holography laboratory"};
    std::string command;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool print_defaults = false;

    std::string names;
    for (const auto& n : command_names()) names += (names.empty() ? "" : ", ") + n;
    app.add_option("command", command, "one of: " + names);
    app.add_option("--config", config_path, "run configuration (INI-style key = value)");
    auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides [output] dir)");
    auto* seed_opt = app.add_option("--seed", seed, "seed (overrides [experiment] seed)");
    app.add_flag("--print-defaults", print_defaults, "print the documented default configuration and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (print_defaults) {
        std::cout << defaults_text();
        return kExitPass;
    }
    if (command.empty()) {
        std::cerr << app.help();
        return kExitUsage;
    }

    RunConfig cfg;
    try {
        cfg = config_path.empty() ? parse_config_text("") : parse_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    }
    if (*out_opt) cfg.out_dir = out_dir;
    if (*seed_opt) cfg.plan.seed = seed;

    return run_command(command, cfg, std::cout);
}
