#ifndef SKEWGRAPH_CONFIG_HPP
#define SKEWGRAPH_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "skewgraph/skew_system.hpp"

namespace skewgraph {

struct ConfigError : std::runtime_error {
    int line, column;
    ConfigError(int line_, int col_, const std::string& msg)
        : std::runtime_error("config error at " + std::to_string(line_) + ":" +
                             std::to_string(col_) + ": " + msg),
          line(line_), column(col_) {}
};

// Line-oriented `[section]` / `key = value` configuration.  Parsing is strict
// (unknown keys are errors) and serialization is canonical, so parse-serialize
// -parse is a fixed point.
struct RunConfig {
    // [system]
    std::string base = "baker";
    std::vector<BandSpec> bands{{0.08, 0.42, 0.18, 0.32, 2.0}, {0.58, 0.92, 0.68, 0.82, 2.0}};
    Interval arc0{0.0, 0.25};
    Interval arc1{0.5, 0.75};
    double delta = 0.02;
    double eta = 0.0;
    std::vector<double> etas;  // optional per-band override of eta
    double w = 0.04;

    // [budgets]
    int depth = 400;
    int count = 1000;
    int n = 10000;
    int burn_in = 1000;
    int bins_t = 128;
    int bins_x = 256;
    int resolution = 1024;
    std::vector<double> epsilons{0.25, 0.125, 0.0625, 0.015625};
    int n_max = 8;
    int baker_n_max = 6;
    int kingman_m_max = 128;
    int kingman_samples = 300;
    int srb_points = 500;
    double bone_tol = 1e-4;
    int max_period = 6;

    // [run]
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out = "out";
    int threads = 1;

    // [sweep]
    std::vector<double> sweep_etas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5};
    std::string sweep_command = "graph";

    static RunConfig parse_text(const std::string& text);
    static RunConfig parse_file(const std::string& path);
    std::string serialize() const;
    std::string hash() const;  // FNV-1a over the canonical serialization

    // `section.key=value` override, same validation as the parser
    void apply_override(const std::string& assignment);

    void validate() const;  // budgets positive, seed present, bands sane
    BaseKind base_kind() const;
    SkewSystem build_system() const;
};

} // namespace skewgraph

#endif
