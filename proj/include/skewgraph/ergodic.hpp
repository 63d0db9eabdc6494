#ifndef SKEWGRAPH_ERGODIC_HPP
#define SKEWGRAPH_ERGODIC_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "skewgraph/invariant_graph.hpp"
#include "skewgraph/skew_system.hpp"

namespace skewgraph {

using Observable = std::function<double(double t, double x)>;

struct WeightedAtom {
    double t, x, weight;
};

struct EmpiricalMeasure {
    std::vector<WeightedAtom> atoms;  // weights >= 0, summing to 1

    double total_weight() const;
    double integrate(const Observable& f) const;
    void normalize();
};

// time average of the observable along the forward orbit of (p, x0), after the
// burn-in prefix
double birkhoff_average(const SkewSystem& sys, const Observable& obs, const BasePoint& p,
                        double x0, int n, int burn_in);

// sup-slope of the m-step fibre composition over a band: the running maximum of
// the derivative product over a joint x-grid evolved along the forward orbit.
// Snapshots of the per-grid-point log products are kept at every ladder value so
// that offset slopes log sigma_k(S^m .) come from the same composition, which
// makes the subadditivity inequality exact.
struct KingmanEstimate {
    int band = 0;
    std::vector<int> ladder;
    std::vector<double> rate;  // (1/m) log sigma_m per ladder entry
    double running_inf = 0.0;
    int grid = 512;

    // log sigma over the evolved grid between two orbit times (both in the
    // ladder, from < to); offset 0 gives the per-m values above
    double log_sigma_between(int from, int to) const;
    std::map<int, std::vector<double>> log_products;  // orbit time -> per-grid log Df^m
};

KingmanEstimate kingman_rate(const SkewSystem& sys, int band, const BasePoint& p,
                             const std::vector<int>& ladder, int grid = 512);

// mean and standard error over samples of (1/n) sum log Df along forward orbits
// started on the pullback graph
MeanSE graph_lyapunov(const SkewSystem& sys, int band, const BaseMeasureSampler& sampler,
                      std::size_t count, int n, int depth, int threads = 1);

struct SrbEstimate {
    EmpiricalMeasure measure;   // histogram masses at bin centres
    int bins_t = 0, bins_x = 0;
    Interval band;
    MeanSE orbit_mean_x;        // per-orbit means of x, for Monte-Carlo bands
    double ks_t_marginal = 0.0; // KS statistic of the t marginal against uniform
};

SrbEstimate srb_estimate(const SkewSystem& sys, int band, const BaseMeasureSampler& sampler,
                         std::size_t n_points, int n_iter, int burn_in, int bins_t, int bins_x,
                         int threads = 1);

struct GraphMeasure {
    EmpiricalMeasure measure;  // atoms at (t0(p), gamma(p))
    MeanSE mean_x;
};

GraphMeasure graph_measure(const SkewSystem& sys, int band, const BaseMeasureSampler& sampler,
                           std::size_t count, int depth, int threads = 1);

struct DiscrepancyReport {
    double max_abs = 0.0;
    std::vector<std::string> names;
    std::vector<double> values;  // per-observable integral differences
};

std::vector<std::pair<std::string, Observable>> default_observables();

DiscrepancyReport measure_discrepancy(const EmpiricalMeasure& a, const EmpiricalMeasure& b);
DiscrepancyReport measure_discrepancy(
    const EmpiricalMeasure& a, const EmpiricalMeasure& b,
    const std::vector<std::pair<std::string, Observable>>& observables);

// KS statistic of weighted t-samples against the uniform law on [0,1)
double ks_uniform_t(const EmpiricalMeasure& m);

} // namespace skewgraph

#endif
