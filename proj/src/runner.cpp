#include "skewgraph/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "skewgraph/ergodic.hpp"
#include "skewgraph/invariant_graph.hpp"
#include "skewgraph/thermodynamics.hpp"

namespace skewgraph {

namespace {

namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

struct Emitter {
    fs::path dir;
    std::string config_hash;
    std::uint64_t seed;
    std::vector<std::string> outputs;
    std::ostringstream summary;

    std::ofstream open_csv(const std::string& name, const std::string& header) {
        fs::create_directories(dir);
        std::ofstream f(dir / name, std::ios::binary);  // LF endings everywhere
        f << "# config=" << config_hash << " seed=" << seed << "\n";
        f << header << "\n";
        outputs.push_back(name);
        return f;
    }

    void write_text(const std::string& name, const std::string& text) {
        fs::create_directories(dir);
        std::ofstream f(dir / name, std::ios::binary);
        f << text;
        outputs.push_back(name);
    }

    void kv(const std::string& key, const std::string& value) {
        summary << key << " = " << value << "\n";
    }
    void kv(const std::string& key, double value) { kv(key, fmt_g17(value)); }
    void kv(const std::string& key, std::size_t value) { kv(key, std::to_string(value)); }
};

std::vector<Potential> shipped_potentials() {
    return {Potential::constant(0.0), Potential::neg_log_deriv(), Potential::cosine(0.5)};
}

std::vector<int> kingman_ladder(int m_max) {
    std::vector<int> full{1, 2, 4, 5, 8, 10, 16, 20, 32, 40, 64, 96, 128, 192, 256};
    std::vector<int> out;
    for (int m : full)
        if (m <= m_max) out.push_back(m);
    if (out.empty() || out.back() != m_max) out.push_back(m_max);
    return out;
}

std::vector<int> resolution_ladder(int resolution) {
    std::vector<int> ladder;
    for (int r = std::max(resolution / 4, 16); r < resolution; r *= 2) ladder.push_back(r);
    ladder.push_back(resolution);
    return ladder;
}

// ---- command bodies -------------------------------------------------------

void cmd_validate(const RunConfig& cfg, const SkewSystem& sys, Emitter& em, RunResult& res) {
    auto rep = validate_system(sys);
    em.write_text("validate.txt", rep.to_text());
    em.kv("validate.all_passed", std::string(rep.all_passed() ? "true" : "false"));
    for (std::size_t i = 0; i < rep.weak_pairs.size(); ++i)
        em.kv("validate.band" + std::to_string(i + 1) + ".caverage_min_margin",
              rep.weak_pairs[i].caverage_min_margin);
    if (!rep.all_passed()) res.status = kValidationError;
    (void)cfg;
}

void cmd_graph(const RunConfig& cfg, const SkewSystem& sys, Emitter& em, RunResult&) {
    BaseMeasureSampler sampler{cfg.seed, 0};
    auto mg = sample_multigraph(sys, sampler, static_cast<std::size_t>(cfg.count), cfg.depth,
                                cfg.bone_tol, cfg.threads);
    auto f = em.open_csv("graph.csv", "t,s,band,lo,hi,depth,is_bone,residual");
    for (const auto& rec : mg.records)
        for (const auto& a : rec.fibers)
            f << fmt_g17(rec.point.t) << "," << fmt_g17(rec.point.s) << "," << a.band + 1 << ","
              << fmt_g17(a.lo) << "," << fmt_g17(a.hi) << "," << a.depth << ","
              << (a.is_bone ? 1 : 0) << "," << fmt_g17(rec.residual) << "\n";
    em.kv("graph.count", static_cast<std::size_t>(cfg.count));
    em.kv("graph.depth", static_cast<std::size_t>(cfg.depth));
    em.kv("graph.bone_fraction", mg.bone_fraction);
    em.kv("graph.max_residual", mg.max_residual);
    em.kv("graph.interval_fibers", mg.interval_fibers);
    for (std::size_t k = 0; k < mg.cardinality_histogram.size(); ++k)
        em.kv("graph.cardinality[" + std::to_string(k) + "]", mg.cardinality_histogram[k]);
}

void cmd_bones(const RunConfig& cfg, const SkewSystem& sys, Emitter& em, RunResult&) {
    auto f = em.open_csv("bones.csv",
                         "eta,oracle_width,special_count,special_bone_fraction,"
                         "special_max_oracle_error,random_count,random_bone_fraction,"
                         "random_max_width");
    for (double eta : cfg.sweep_etas) {
        SkewSystem pert = perturb(sys, eta);
        // oracle: distance between the outer fixed points of the perturbed f0
        auto roots = find_fixed_points(pert.band(0).f0_eff);
        double oracle = roots.size() >= 2 ? roots.back().location - roots.front().location : 0.0;

        BaseMeasureSampler sampler{cfg.seed, 1};
        std::size_t n_special = static_cast<std::size_t>(cfg.count) / 4 + 1;
        auto special = sample_multigraph(pert, sampler, n_special, cfg.depth, cfg.bone_tol,
                                         cfg.threads, true);
        double max_err = 0.0;
        std::size_t special_bones = 0;
        for (const auto& rec : special.records) {
            const auto& a = rec.fibers[0];  // the perturbed band
            if (a.is_bone) ++special_bones;
            if (eta > 0.0) max_err = std::max(max_err, std::abs(a.width() - oracle));
        }
        BaseMeasureSampler rnd{cfg.seed, 2};
        auto random = sample_multigraph(pert, rnd, static_cast<std::size_t>(cfg.count), cfg.depth,
                                        cfg.bone_tol, cfg.threads);
        double rnd_max_w = 0.0;
        std::size_t rnd_bones = 0, rnd_total = 0;
        for (const auto& rec : random.records) {
            const auto& a = rec.fibers[0];
            ++rnd_total;
            if (a.is_bone) ++rnd_bones;
            rnd_max_w = std::max(rnd_max_w, a.width());
        }
        f << fmt_g17(eta) << "," << fmt_g17(oracle) << "," << n_special << ","
          << fmt_g17(static_cast<double>(special_bones) / static_cast<double>(n_special)) << ","
          << fmt_g17(max_err) << "," << rnd_total << ","
          << fmt_g17(static_cast<double>(rnd_bones) / static_cast<double>(rnd_total)) << ","
          << fmt_g17(rnd_max_w) << "\n";
    }
    em.kv("bones.etas", static_cast<std::size_t>(cfg.sweep_etas.size()));
}

void cmd_lyapunov(const RunConfig& cfg, const SkewSystem& sys, Emitter& em, RunResult&) {
    auto ladder = kingman_ladder(cfg.kingman_m_max);
    auto fk = em.open_csv("kingman.csv", "band,m,mean_rate,se,samples");
    auto fl = em.open_csv("lyapunov.csv", "band,graph_exponent,se,samples,orbit_length,"
                                          "kingman_running_inf,kingman_running_inf_se");
    for (int b = 0; b < sys.band_count(); ++b) {
        std::size_t ns = static_cast<std::size_t>(cfg.kingman_samples);
        std::vector<std::vector<double>> per_m(ladder.size());
        std::vector<double> run_inf(ns);
        BaseMeasureSampler sampler{cfg.seed, 3};
        std::vector<KingmanEstimate> ests(ns);
        parallel_for(ns, cfg.threads, [&](std::size_t i) {
            BasePoint p = sampler.sample(BaseKind::Baker, i);
            ests[i] = kingman_rate(sys, b, p, ladder);
        });
        for (std::size_t i = 0; i < ns; ++i) {
            for (std::size_t j = 0; j < ladder.size(); ++j) per_m[j].push_back(ests[i].rate[j]);
            run_inf[i] = ests[i].running_inf;
        }
        for (std::size_t j = 0; j < ladder.size(); ++j) {
            auto ms = mean_se(per_m[j]);
            fk << b + 1 << "," << ladder[j] << "," << fmt_g17(ms.mean) << "," << fmt_g17(ms.se)
               << "," << ns << "\n";
        }
        auto ri = mean_se(run_inf);
        auto gl = graph_lyapunov(sys, b, BaseMeasureSampler{cfg.seed, 4},
                                 static_cast<std::size_t>(cfg.count) / 10 + 1, cfg.n, cfg.depth,
                                 cfg.threads);
        fl << b + 1 << "," << fmt_g17(gl.mean) << "," << fmt_g17(gl.se) << "," << gl.count << ","
           << cfg.n << "," << fmt_g17(ri.mean) << "," << fmt_g17(ri.se) << "\n";
        em.kv("lyapunov.band" + std::to_string(b + 1) + ".kingman_running_inf", ri.mean);
        em.kv("lyapunov.band" + std::to_string(b + 1) + ".kingman_running_inf_se", ri.se);
        em.kv("lyapunov.band" + std::to_string(b + 1) + ".graph_exponent", gl.mean);
        em.kv("lyapunov.band" + std::to_string(b + 1) + ".graph_exponent_se", gl.se);
    }
}

void cmd_srb(const RunConfig& cfg, const SkewSystem& sys, Emitter& em, RunResult&) {
    for (int b = 0; b < sys.band_count(); ++b) {
        auto ea = srb_estimate(sys, b, BaseMeasureSampler{cfg.seed, 10},
                               static_cast<std::size_t>(cfg.srb_points), cfg.n, cfg.burn_in,
                               cfg.bins_t, cfg.bins_x, cfg.threads);
        auto eb = srb_estimate(sys, b, BaseMeasureSampler{cfg.seed, 11},
                               static_cast<std::size_t>(cfg.srb_points), cfg.n, cfg.burn_in,
                               cfg.bins_t, cfg.bins_x, cfg.threads);
        std::string tagA = "srb_band" + std::to_string(b + 1) + "_a.csv";
        std::string tagB = "srb_band" + std::to_string(b + 1) + "_b.csv";
        for (auto* pr : {&ea, &eb}) {
            auto f = em.open_csv(pr == &ea ? tagA : tagB, "t_center,x_center,mass");
            for (const auto& a : pr->measure.atoms)
                f << fmt_g17(a.t) << "," << fmt_g17(a.x) << "," << fmt_g17(a.weight) << "\n";
        }
        auto disc = measure_discrepancy(ea.measure, eb.measure);
        auto gm = graph_measure(sys, b, BaseMeasureSampler{cfg.seed, 12},
                                static_cast<std::size_t>(cfg.count), cfg.depth, cfg.threads);
        std::string pre = "srb.band" + std::to_string(b + 1);
        em.kv(pre + ".ensemble_discrepancy", disc.max_abs);
        em.kv(pre + ".mean_x_a", ea.orbit_mean_x.mean);
        em.kv(pre + ".mean_x_b", eb.orbit_mean_x.mean);
        em.kv(pre + ".mean_x_graph", gm.mean_x.mean);
        double sigma = std::sqrt(ea.orbit_mean_x.se * ea.orbit_mean_x.se +
                                 gm.mean_x.se * gm.mean_x.se);
        em.kv(pre + ".graph_vs_srb_diff", std::abs(ea.orbit_mean_x.mean - gm.mean_x.mean));
        em.kv(pre + ".graph_vs_srb_3sigma", 3.0 * sigma);
        em.kv(pre + ".ks_t_marginal", ea.ks_t_marginal);
    }
}

void cmd_pressure(const RunConfig& cfg, const SkewSystem&, Emitter& em, RunResult&) {
    auto f = em.open_csv("pressure.csv", "method,potential,epsilon,n_or_resolution,count,value");
    for (const auto& phi : shipped_potentials()) {
        auto tr = transfer_pressure(phi, resolution_ladder(cfg.resolution));
        for (const auto& row : tr.diagnostics)
            f << "transfer," << phi.name() << ",," << row.n << "," << row.count << ","
              << fmt_g17(row.value) << "\n";
        auto sep = pressure_separated(phi, cfg.epsilons, cfg.n_max);
        for (const auto& row : sep.diagnostics)
            f << "separated," << phi.name() << "," << fmt_g17(row.epsilon) << "," << row.n << ","
              << row.count << "," << fmt_g17(row.value) << "\n";
        std::string pre = "pressure." + phi.tag();
        em.kv(pre + ".transfer", tr.value);
        em.kv(pre + ".separated", sep.value);
        em.kv(pre + ".difference", std::abs(tr.value - sep.value));
        em.kv(pre + ".spectral_gap_ratio", tr.spectral_gap_ratio);
        if (!tr.cauchy_ladder.empty())
            em.kv(pre + ".cauchy", tr.cauchy_ladder.back());
        auto var = variational_check(phi, tr.value, cfg.max_period);
        em.kv(pre + ".max_cycle_average", var.max_cycle_average);
        em.kv(pre + ".variational_ok", std::string(var.satisfied ? "true" : "false"));
    }
}

// worst per-observable |∫f dA - ∫f dB| over three Monte-Carlo standard
// deviations, with the sigma of each observable taken from the atom variances
double worst_3sigma_ratio(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    double worst = 0.0;
    for (const auto& [name, f] : default_observables()) {
        auto var_of = [&](const EmpiricalMeasure& m) {
            double mean = m.integrate(f), v = 0.0;
            for (const auto& at : m.atoms)
                v += at.weight * (f(at.t, at.x) - mean) * (f(at.t, at.x) - mean);
            return v / static_cast<double>(m.atoms.size());
        };
        double sigma = std::sqrt(var_of(a) + var_of(b));
        if (sigma <= 0.0) continue;
        worst = std::max(worst, std::abs(a.integrate(f) - b.integrate(f)) / (3.0 * sigma));
    }
    return worst;
}

void cmd_equilibrium(const RunConfig& cfg, const SkewSystem& sys, Emitter& em, RunResult&) {
    for (const auto& phi : shipped_potentials()) {
        auto tr = transfer_pressure(phi, resolution_ladder(cfg.resolution));
        std::string name = "equilibrium_density_" + phi.tag() + ".csv";
        auto f = em.open_csv(name, "cell,t_lo,t_hi,mass");
        int N = static_cast<int>(tr.density.size());
        for (int j = 0; j < N; ++j)
            f << j << "," << fmt_g17(static_cast<double>(j) / N) << ","
              << fmt_g17(static_cast<double>(j + 1) / N) << "," << fmt_g17(tr.density[j]) << "\n";
    }
    // pushforward onto the band-1 graph for the potential whose equilibrium is
    // the reference measure
    auto tr = transfer_pressure(Potential::neg_log_deriv(), resolution_ladder(cfg.resolution));
    auto push = pushforward_equilibrium(sys, 0, tr.density, BaseMeasureSampler{cfg.seed, 20},
                                        static_cast<std::size_t>(cfg.count), cfg.depth,
                                        cfg.threads);
    auto f = em.open_csv("pushforward_band1.csv", "t,x,weight");
    for (const auto& a : push.measure.atoms)
        f << fmt_g17(a.t) << "," << fmt_g17(a.x) << "," << fmt_g17(a.weight) << "\n";
    auto gm = graph_measure(sys, 0, BaseMeasureSampler{cfg.seed, 21},
                            static_cast<std::size_t>(cfg.count), cfg.depth, cfg.threads);
    auto disc = measure_discrepancy(push.measure, gm.measure);
    em.kv("equilibrium.pushforward_vs_graph", disc.max_abs);
    em.kv("equilibrium.pushforward_vs_graph_3sigma_ratio",
          worst_3sigma_ratio(push.measure, gm.measure));
    auto advanced = advance_measure(sys, 0, push.measure);
    auto inv = measure_discrepancy(advanced, push.measure);
    em.kv("equilibrium.one_step_invariance", inv.max_abs);
    em.kv("equilibrium.one_step_invariance_3sigma_ratio",
          worst_3sigma_ratio(advanced, push.measure));
    for (const auto& phi : shipped_potentials()) {
        auto lp = lifted_pressure_check(phi, cfg.resolution, cfg.epsilons, cfg.baker_n_max);
        std::string pre = "equilibrium.lift." + phi.tag();
        em.kv(pre + ".transfer_circle", lp.transfer_circle);
        em.kv(pre + ".separated_baker", lp.separated_baker);
        em.kv(pre + ".difference", lp.difference);
    }
}

void cmd_sweep(const RunConfig& cfg, const SkewSystem&, Emitter& em, RunResult& res) {
    if (cfg.sweep_command == "sweep" || !is_known_command(cfg.sweep_command))
        throw ConfigError(0, 0, "sweep.command must name a non-sweep command");
    for (double eta : cfg.sweep_etas) {
        RunConfig sub = cfg;
        sub.eta = eta;
        char short_eta[24];
        std::snprintf(short_eta, sizeof(short_eta), "%.12g", eta);
        std::ostringstream tag;
        tag << "eta_" << short_eta;
        auto sub_res = run_command(cfg.sweep_command, sub,
                                   (fs::path(em.dir) / tag.str()).string());
        em.kv("sweep." + tag.str() + ".status", static_cast<std::size_t>(sub_res.status));
        if (sub_res.status != kOk) res.status = sub_res.status;
    }
}

} // namespace

bool is_known_command(const std::string& command) {
    for (const char* c : {"validate", "graph", "bones", "lyapunov", "srb", "pressure",
                          "equilibrium", "sweep"})
        if (command == c) return true;
    return false;
}

RunResult run_command(const std::string& command, const RunConfig& cfg,
                      const std::string& out_override) {
    RunResult res;
    auto t0 = std::chrono::steady_clock::now();
    Emitter em;
    em.dir = out_override.empty() ? fs::path(cfg.out) : fs::path(out_override);
    em.config_hash = cfg.hash();
    em.seed = cfg.seed;
    try {
        cfg.validate();
        SkewSystem sys = cfg.build_system();
        if (command != "validate") {
            auto rep = validate_system(sys);
            if (!rep.all_passed()) {
                em.write_text("validate.txt", rep.to_text());
                res.status = kValidationError;
                res.summary = "validation failed; see validate.txt\n";
                return res;
            }
        }
        if (command == "validate") cmd_validate(cfg, sys, em, res);
        else if (command == "graph") cmd_graph(cfg, sys, em, res);
        else if (command == "bones") cmd_bones(cfg, sys, em, res);
        else if (command == "lyapunov") cmd_lyapunov(cfg, sys, em, res);
        else if (command == "srb") cmd_srb(cfg, sys, em, res);
        else if (command == "pressure") cmd_pressure(cfg, sys, em, res);
        else if (command == "equilibrium") cmd_equilibrium(cfg, sys, em, res);
        else if (command == "sweep") cmd_sweep(cfg, sys, em, res);
        else throw ConfigError(0, 0, "unknown command " + command);
    } catch (const ConfigError& e) {
        res.status = kParseError;
        res.summary = std::string(e.what()) + "\n";
        return res;
    } catch (const std::domain_error& e) {
        res.status = kValidationError;
        res.summary = std::string(e.what()) + "\n";
        return res;
    } catch (const std::exception& e) {
        res.status = kNumericalError;
        res.summary = std::string(e.what()) + "\n";
        return res;
    }

    auto wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    em.write_text("summary.txt", em.summary.str());
    std::ostringstream man;
    man << "version = " << kVersion << "\n";
    man << "command = " << command << "\n";
    man << "config_hash = " << em.config_hash << "\n";
    man << "seed = " << cfg.seed << "\n";
    man << "wall_ms = " << wall_ms << "\n";
    for (const auto& o : em.outputs)
        if (o != "summary.txt") man << "output = " << o << "\n";
    man << "output = summary.txt\n";
    em.write_text("manifest.txt", man.str());
    res.outputs = em.outputs;
    res.summary = em.summary.str();
    return res;
}

} // namespace skewgraph
