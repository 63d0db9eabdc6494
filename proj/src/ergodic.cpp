#include "skewgraph/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace skewgraph {

double EmpiricalMeasure::total_weight() const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight;
    return s;
}

double EmpiricalMeasure::integrate(const Observable& f) const {
    double s = 0.0;
    for (const auto& a : atoms) s += a.weight * f(a.t, a.x);
    return s;
}

void EmpiricalMeasure::normalize() {
    double s = total_weight();
    if (s <= 0.0) throw std::invalid_argument("measure has no mass");
    for (auto& a : atoms) a.weight /= s;
}

double birkhoff_average(const SkewSystem& sys, const Observable& obs, const BasePoint& p,
                        double x0, int n, int burn_in) {
    int band = sys.band_of(x0);
    if (band < 0) throw std::domain_error("fibre start outside every band");
    ForwardWalker w(p);
    double x = x0, acc = 0.0;
    for (int k = 0; k < burn_in; ++k) {
        x = sys.fiber_unchecked(band, w.t(), x, 0);
        w.step();
    }
    for (int k = 0; k < n; ++k) {
        acc += obs(w.t(), x);
        x = sys.fiber_unchecked(band, w.t(), x, 0);
        w.step();
    }
    return acc / n;
}

double KingmanEstimate::log_sigma_between(int from, int to) const {
    const auto& a = log_products.at(from);
    const auto& b = log_products.at(to);
    double best = -1e300;
    for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, b[i] - a[i]);
    return best;
}

KingmanEstimate kingman_rate(const SkewSystem& sys, int band, const BasePoint& p,
                             const std::vector<int>& ladder, int grid) {
    KingmanEstimate est;
    est.band = band;
    est.ladder = ladder;
    const Interval iv = sys.band(band).iv;
    int mmax = 0;
    for (int m : ladder) mmax = std::max(mmax, m);

    for (;; grid *= 2) {
        est.grid = grid;
        est.log_products.clear();
        est.rate.clear();
        std::vector<double> xs(static_cast<std::size_t>(grid));
        std::vector<double> lp(static_cast<std::size_t>(grid), 0.0);
        for (int i = 0; i < grid; ++i)
            xs[static_cast<std::size_t>(i)] = iv.lo + iv.width() * i / (grid - 1);
        est.log_products[0] = lp;
        ForwardWalker w(p);
        bool boundary_max = false;
        for (int m = 1; m <= mmax; ++m) {
            double t = w.t();
            for (int i = 0; i < grid; ++i) {
                auto ui = static_cast<std::size_t>(i);
                lp[ui] += std::log(sys.fiber_unchecked(band, t, xs[ui], 1));
                xs[ui] = sys.fiber_unchecked(band, t, xs[ui], 0);
            }
            w.step();
            if (std::find(ladder.begin(), ladder.end(), m) != ladder.end()) {
                est.log_products[m] = lp;
                auto it = std::max_element(lp.begin(), lp.end());
                if (it == lp.begin() || it == lp.end() - 1) boundary_max = true;
                est.rate.push_back(*it / m);
            }
        }
        if (!boundary_max || grid >= 2048) break;  // refine x2 when the max sits on the edge
    }
    est.running_inf = 1e300;
    for (double r : est.rate) est.running_inf = std::min(est.running_inf, r);
    return est;
}

MeanSE graph_lyapunov(const SkewSystem& sys, int band, const BaseMeasureSampler& sampler,
                      std::size_t count, int n, int depth, int threads) {
    std::vector<double> rates(count);
    parallel_for(count, threads, [&](std::size_t i) {
        BasePoint p = sampler.sample(sys.base_kind() == BaseKind::Circle ? BaseKind::Baker
                                                                         : sys.base_kind(),
                                     i, depth);
        double x = graph_value(sys, band, p, depth);
        ForwardWalker w(p);
        double acc = 0.0;
        for (int k = 0; k < n; ++k) {
            acc += std::log(sys.fiber_unchecked(band, w.t(), x, 1));
            x = sys.fiber_unchecked(band, w.t(), x, 0);
            w.step();
        }
        rates[i] = acc / n;
    });
    return mean_se(rates);
}

SrbEstimate srb_estimate(const SkewSystem& sys, int band, const BaseMeasureSampler& sampler,
                         std::size_t n_points, int n_iter, int burn_in, int bins_t, int bins_x,
                         int threads) {
    SrbEstimate out;
    out.bins_t = bins_t;
    out.bins_x = bins_x;
    out.band = sys.band(band).iv;
    const Interval iv = out.band;

    // integer bin counts reduce exactly, independent of thread interleaving
    std::vector<std::vector<std::int64_t>> counts(n_points);
    std::vector<double> orbit_means(n_points);
    parallel_for(n_points, threads, [&](std::size_t i) {
        std::vector<std::int64_t> local(static_cast<std::size_t>(bins_t) * bins_x, 0);
        BasePoint p = sampler.sample(BaseKind::Baker, i);
        double x = iv.lo + iv.width() * sampler.uniform(i, 100);
        ForwardWalker w(p);
        double sum_x = 0.0;
        for (int k = 0; k < burn_in + n_iter; ++k) {
            if (k >= burn_in) {
                int bt = std::min(static_cast<int>(w.t() * bins_t), bins_t - 1);
                int bx = std::min(static_cast<int>((x - iv.lo) / iv.width() * bins_x), bins_x - 1);
                bx = std::max(bx, 0);
                local[static_cast<std::size_t>(bt) * bins_x + bx] += 1;
                sum_x += x;
            }
            x = sys.fiber_unchecked(band, w.t(), x, 0);
            w.step();
        }
        counts[i] = std::move(local);
        orbit_means[i] = sum_x / n_iter;
    });

    std::vector<std::int64_t> total(static_cast<std::size_t>(bins_t) * bins_x, 0);
    for (const auto& local : counts)
        for (std::size_t j = 0; j < total.size(); ++j) total[j] += local[j];
    std::int64_t grand = 0;
    for (auto c : total) grand += c;

    out.measure.atoms.reserve(total.size());
    for (int bt = 0; bt < bins_t; ++bt)
        for (int bx = 0; bx < bins_x; ++bx) {
            std::int64_t c = total[static_cast<std::size_t>(bt) * bins_x + bx];
            if (c == 0) continue;
            WeightedAtom a;
            a.t = (bt + 0.5) / bins_t;
            a.x = iv.lo + iv.width() * (bx + 0.5) / bins_x;
            a.weight = static_cast<double>(c) / static_cast<double>(grand);
            out.measure.atoms.push_back(a);
        }
    out.orbit_mean_x = mean_se(orbit_means);
    out.ks_t_marginal = ks_uniform_t(out.measure);
    return out;
}

GraphMeasure graph_measure(const SkewSystem& sys, int band, const BaseMeasureSampler& sampler,
                           std::size_t count, int depth, int threads) {
    GraphMeasure gm;
    gm.measure.atoms.resize(count);
    parallel_for(count, threads, [&](std::size_t i) {
        BasePoint p = sampler.sample(sys.base_kind() == BaseKind::Circle ? BaseKind::Baker
                                                                         : sys.base_kind(),
                                     i, depth);
        double g = graph_value(sys, band, p, depth);
        gm.measure.atoms[i] = {p.t, g, 1.0 / static_cast<double>(count)};
    });
    std::vector<double> xs(count);
    for (std::size_t i = 0; i < count; ++i) xs[i] = gm.measure.atoms[i].x;
    gm.mean_x = mean_se(xs);
    return gm;
}

std::vector<std::pair<std::string, Observable>> default_observables() {
    std::vector<std::pair<std::string, Observable>> obs;
    obs.emplace_back("x", [](double, double x) { return x; });
    obs.emplace_back("x^2", [](double, double x) { return x * x; });
    obs.emplace_back("cos(2 pi t)", [](double t, double) { return std::cos(2.0 * M_PI * t); });
    obs.emplace_back("sin(2 pi t) x", [](double t, double x) { return std::sin(2.0 * M_PI * t) * x; });
    // smoothed quarter-circle indicators: trapezoids with 0.05 shoulders
    for (int q = 0; q < 4; ++q) {
        double a = 0.25 * q, b = 0.25 * (q + 1);
        obs.emplace_back("bin_t[" + std::to_string(q) + "]", [a, b](double t, double) {
            double up = std::clamp((t - a) / 0.05, 0.0, 1.0);
            double dn = std::clamp((b - t) / 0.05, 0.0, 1.0);
            return up * dn;
        });
    }
    return obs;
}

DiscrepancyReport measure_discrepancy(const EmpiricalMeasure& a, const EmpiricalMeasure& b) {
    return measure_discrepancy(a, b, default_observables());
}

DiscrepancyReport measure_discrepancy(
    const EmpiricalMeasure& a, const EmpiricalMeasure& b,
    const std::vector<std::pair<std::string, Observable>>& observables) {
    DiscrepancyReport rep;
    for (const auto& [name, f] : observables) {
        double d = a.integrate(f) - b.integrate(f);
        rep.names.push_back(name);
        rep.values.push_back(d);
        rep.max_abs = std::max(rep.max_abs, std::abs(d));
    }
    return rep;
}

double ks_uniform_t(const EmpiricalMeasure& m) {
    std::vector<std::pair<double, double>> tw;
    tw.reserve(m.atoms.size());
    for (const auto& a : m.atoms) tw.emplace_back(a.t, a.weight);
    std::sort(tw.begin(), tw.end());
    double cdf = 0.0, ks = 0.0, tot = 0.0;
    for (const auto& [t, w] : tw) tot += w;
    for (const auto& [t, w] : tw) {
        ks = std::max(ks, std::abs(cdf - t));
        cdf += w / tot;
        ks = std::max(ks, std::abs(cdf - t));
    }
    return ks;
}

} // namespace skewgraph
