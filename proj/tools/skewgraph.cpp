#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skewgraph/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"skew products over expanding bases: invariant graphs, bones, SRB measures, "
                 "Lyapunov exponents and topological pressure"};
    std::string command, config_path, out_dir;
    std::vector<std::string> overrides;
    std::string seed_flag;
    int threads = 0;

    app.add_option("command", command,
                   "one of: validate graph bones lyapunov srb pressure equilibrium sweep")
        ->required();
    app.add_option("--config", config_path, "configuration file")->required();
    app.add_option("--set", overrides, "override section.key=value (repeatable)");
    app.add_option("--seed", seed_flag, "seed override (wins over the SEED env variable)");
    app.add_option("--out", out_dir, "output directory override");
    app.add_option("--threads", threads, "worker thread override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? skewgraph::kParseError : 0;
    }

    if (!skewgraph::is_known_command(command)) {
        std::cerr << "unknown command: " << command << "\n";
        return skewgraph::kParseError;
    }

    skewgraph::RunConfig cfg;
    try {
        cfg = skewgraph::RunConfig::parse_file(config_path);
        for (const auto& ov : overrides) cfg.apply_override(ov);
        if (const char* env = std::getenv("SEED"); env && seed_flag.empty())
            cfg.apply_override(std::string("run.seed=") + env);
        if (!seed_flag.empty()) cfg.apply_override("run.seed=" + seed_flag);
        if (threads > 0) cfg.apply_override("run.threads=" + std::to_string(threads));
        if (!out_dir.empty()) cfg.out = out_dir;
        cfg.validate();
    } catch (const skewgraph::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return skewgraph::kParseError;
    }

    auto res = skewgraph::run_command(command, cfg);
    if (!res.summary.empty()) std::cout << res.summary;
    if (res.status != skewgraph::kOk) std::cerr << "exit status " << res.status << "\n";
    return res.status;
}
