#include "skewgraph/thermodynamics.hpp"

#include <algorithm>
#include <cctype>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace skewgraph {

double Potential::eval(double t, double x) const {
    switch (form) {
        case Form::Constant: return value;
        case Form::Cosine: return value * std::cos(2.0 * M_PI * t);
        case Form::NegLogDeriv: return -std::log(4.0);
        case Form::FiberDependent: return fn(t, x);
    }
    return 0.0;
}

std::string Potential::name() const {
    switch (form) {
        case Form::Constant: return value == 0.0 ? "zero" : "const(" + fmt_g17(value) + ")";
        case Form::Cosine: return "cos(" + fmt_g17(value) + ")";
        case Form::NegLogDeriv: return "-log4";
        case Form::FiberDependent: return "fiber";
    }
    return "?";
}

std::string Potential::tag() const {
    std::string out;
    for (char c : name())
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') out += c;
    return out;
}

Potential Potential::constant(double c) { return Potential{Form::Constant, c, {}, true}; }
Potential Potential::cosine(double a) { return Potential{Form::Cosine, a, {}, true}; }
Potential Potential::neg_log_deriv() { return Potential{Form::NegLogDeriv, 0.0, {}, true}; }
Potential Potential::fiber_dependent(Observable f) {
    return Potential{Form::FiberDependent, 0.0, std::move(f), false};
}

TransferDiscretization TransferDiscretization::build(const Potential& phi, int resolution) {
    TransferDiscretization d;
    d.resolution = resolution;
    d.source_cell.resize(static_cast<std::size_t>(resolution));
    d.weight.resize(static_cast<std::size_t>(resolution));
    for (int j = 0; j < resolution; ++j) {
        double tj = (j + 0.5) / resolution;
        for (int k = 0; k < 4; ++k) {
            double y = (tj + k) / 4.0;
            int cell = std::min(static_cast<int>(y * resolution), resolution - 1);
            d.source_cell[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = cell;
            d.weight[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
                std::exp(phi.eval(y));
        }
    }
    return d;
}

void TransferDiscretization::apply(const std::vector<double>& in, std::vector<double>& out) const {
    out.assign(in.size(), 0.0);
    for (std::size_t j = 0; j < in.size(); ++j)
        for (int k = 0; k < 4; ++k)
            out[j] += weight[j][static_cast<std::size_t>(k)] *
                      in[static_cast<std::size_t>(source_cell[j][static_cast<std::size_t>(k)])];
}

void TransferDiscretization::apply_transpose(const std::vector<double>& in,
                                             std::vector<double>& out) const {
    out.assign(in.size(), 0.0);
    for (std::size_t j = 0; j < in.size(); ++j)
        for (int k = 0; k < 4; ++k)
            out[static_cast<std::size_t>(source_cell[j][static_cast<std::size_t>(k)])] +=
                weight[j][static_cast<std::size_t>(k)] * in[j];
}

double TransferDiscretization::column_weight_sum(int k) const {
    double s = 0.0;
    for (std::size_t j = 0; j < source_cell.size(); ++j)
        for (int b = 0; b < 4; ++b)
            if (source_cell[j][static_cast<std::size_t>(b)] == k)
                s += weight[j][static_cast<std::size_t>(b)];
    return s;
}

namespace {

struct EigenData {
    double lambda;
    std::vector<double> right, left;
    double gap_ratio;
};

EigenData power_iterate(const TransferDiscretization& L) {
    const std::size_t n = L.source_cell.size();
    EigenData e;
    e.right.assign(n, 1.0);
    std::vector<double> next(n);
    double lambda = 0.0;
    bool converged = false;
    for (int it = 0; it < 100000; ++it) {
        L.apply(e.right, next);
        double norm = 0.0;
        for (double v : next) norm = std::max(norm, std::abs(v));
        for (auto& v : next) v /= norm;
        std::swap(e.right, next);
        if (it > 3 && std::abs(norm - lambda) < 1e-12 * std::max(1.0, std::abs(norm))) {
            lambda = norm;
            converged = true;
            break;
        }
        lambda = norm;
    }
    if (!converged) throw std::runtime_error("transfer power iteration did not converge");
    e.lambda = lambda;

    e.left.assign(n, 1.0);
    for (int it = 0; it < 100000; ++it) {
        L.apply_transpose(e.left, next);
        double norm = 0.0;
        for (double v : next) norm = std::max(norm, std::abs(v));
        for (auto& v : next) v /= norm;
        double delta = 0.0;
        for (std::size_t i = 0; i < n; ++i) delta = std::max(delta, std::abs(next[i] - e.left[i]));
        std::swap(e.left, next);
        if (it > 3 && delta < 1e-13) break;
    }

    // second modulus by power iteration on the deflated operator
    double uv = 0.0;
    for (std::size_t i = 0; i < n; ++i) uv += e.left[i] * e.right[i];
    std::vector<double> w(n), wn(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = ((mix64(0xC0FFEE, i) >> 11) * 0x1.0p-53) - 0.5;
    double l2 = 0.0;
    for (int it = 0; it < 300; ++it) {
        double uw = 0.0;
        for (std::size_t i = 0; i < n; ++i) uw += e.left[i] * w[i];
        for (std::size_t i = 0; i < n; ++i) w[i] -= (uw / uv) * e.right[i];
        L.apply(w, wn);
        double norm = 0.0;
        for (double v : wn) norm = std::max(norm, std::abs(v));
        if (norm == 0.0) break;  // deflated component underflowed; keep the last ratio
        for (auto& v : wn) v /= norm;
        std::swap(w, wn);
        l2 = norm;
    }
    e.gap_ratio = l2 / e.lambda;
    return e;
}

} // namespace

PressureResult transfer_pressure(const Potential& phi, const std::vector<int>& resolutions) {
    if (!phi.fiber_independent())
        throw std::invalid_argument("transfer pressure needs a base potential");
    if (!phi.holder)
        throw std::invalid_argument("transfer pressure needs a Holder potential");
    PressureResult res;
    res.method = PressureMethod::TransferOperator;
    double prev = 0.0;
    bool have_prev = false;
    for (int N : resolutions) {
        auto L = TransferDiscretization::build(phi, N);
        auto e = power_iterate(L);
        double p = std::log(e.lambda);
        res.diagnostics.push_back({0.0, N, N, p, p});
        if (have_prev) res.cauchy_ladder.push_back(std::abs(p - prev));
        prev = p;
        have_prev = true;
        if (N == resolutions.back()) {
            res.value = p;
            res.eigenvalue = e.lambda;
            res.spectral_gap_ratio = e.gap_ratio;
            res.density.resize(e.right.size());
            double tot = 0.0;
            for (std::size_t i = 0; i < e.right.size(); ++i) {
                res.density[i] = e.right[i] * e.left[i];  // eigenfunction times eigenmeasure
                tot += res.density[i];
            }
            for (auto& d : res.density) d /= tot;
        }
    }
    return res;
}

namespace {

// max_{0 <= i < n} ||4^i delta|| >= eps on the circle
bool dn_separated(double delta, double eps, int n) {
    double d = delta - std::floor(delta);
    for (int i = 0; i < n; ++i) {
        if (std::min(d, 1.0 - d) >= eps) return true;
        d *= 4.0;
        d -= std::floor(d);
    }
    return false;
}

} // namespace

std::vector<std::int64_t> greedy_separated_circle(std::int64_t M, double eps, int n) {
    std::int64_t win = static_cast<std::int64_t>(std::ceil(eps * static_cast<double>(M)));
    win = std::min(win, M);
    std::vector<char> sep(static_cast<std::size_t>(win) + 1, 1);
    bool all = true;
    for (std::int64_t j = 1; j <= win; ++j) {
        sep[static_cast<std::size_t>(j)] =
            dn_separated(static_cast<double>(j) / static_cast<double>(M), eps, n) ? 1 : 0;
        if (!sep[static_cast<std::size_t>(j)]) all = false;
    }
    std::vector<std::int64_t> acc;
    if (all) {  // every grid gap below eps separates, so the greedy keeps everything
        acc.resize(static_cast<std::size_t>(M));
        std::iota(acc.begin(), acc.end(), 0);
        return acc;
    }
    for (std::int64_t i = 0; i < M; ++i) {
        bool ok = true;
        for (auto it = acc.rbegin(); it != acc.rend(); ++it) {
            std::int64_t gap = i - *it;
            if (gap > win) break;
            if (!sep[static_cast<std::size_t>(gap)]) { ok = false; break; }
        }
        if (ok) {
            for (std::size_t j = 0; j < acc.size(); ++j) {  // circular wrap against the front
                std::int64_t gap = acc[j] + M - i;
                if (gap > win) break;
                if (!sep[static_cast<std::size_t>(gap)]) { ok = false; break; }
            }
        }
        if (ok) acc.push_back(i);
    }
    return acc;
}

namespace {

double birkhoff_sum_circle(const Potential& phi, double t, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        s += phi.eval(t);
        t = circle_step(t);
    }
    return s;
}

void headline_from_rows(PressureResult& res) {
    // slope of log sums in n at the smallest epsilon; falls back to the raw
    // quotient when only one n completed
    double eps_min = 1e300;
    for (const auto& r : res.diagnostics) eps_min = std::min(eps_min, r.epsilon);
    const PressureRow *last = nullptr, *prev = nullptr;
    for (const auto& r : res.diagnostics) {
        if (r.epsilon != eps_min) continue;
        prev = last;
        last = &r;
    }
    if (last && prev)
        res.value = (last->log_sum - prev->log_sum) / (last->n - prev->n);
    else if (last)
        res.value = last->value;
}

} // namespace

PressureResult pressure_separated(const Potential& phi, const std::vector<double>& epsilons,
                                  int n_max, std::int64_t max_grid) {
    if (epsilons.empty() || n_max < 2)
        throw std::invalid_argument("need at least one epsilon and n_max >= 2");
    PressureResult res;
    res.method = PressureMethod::SeparatedSets;
    for (double eps : epsilons) {
        if (static_cast<std::int64_t>(std::llround(1.0 / eps)) > max_grid)
            throw std::invalid_argument("grid too coarse for the smallest epsilon");
        for (int n = 1; n <= n_max; ++n) {
            std::int64_t M = std::llround(std::pow(4.0, n - 1) / eps);
            if (M > max_grid) break;  // deeper rows would exceed the grid budget
            auto idx = greedy_separated_circle(M, eps, n);
            double sum = 0.0;
            for (std::int64_t i : idx)
                sum += std::exp(birkhoff_sum_circle(phi, static_cast<double>(i) / static_cast<double>(M), n));
            PressureRow row;
            row.epsilon = eps;
            row.n = n;
            row.count = static_cast<std::int64_t>(idx.size());
            row.log_sum = std::log(sum);
            row.value = row.log_sum / n;
            res.diagnostics.push_back(row);
        }
    }
    headline_from_rows(res);
    return res;
}

PressureResult pressure_separated_baker(const Potential& phi, const std::vector<double>& epsilons,
                                        int n_max, std::int64_t max_grid) {
    if (!phi.fiber_independent())
        throw std::invalid_argument("the lifted estimator needs a base potential");
    PressureResult res;
    res.method = PressureMethod::SeparatedSets;
    for (double eps : epsilons) {
        // contracting coordinate: later iterates only shrink the s distance, so
        // separation there is decided at time zero; an eps-spaced greedy pass
        std::int64_t Ms = std::llround(1.0 / eps);
        if (Ms > max_grid)
            throw std::invalid_argument("grid too coarse for the smallest epsilon");
        std::vector<std::int64_t> s_acc;
        for (std::int64_t i = 0; i < Ms; ++i) {
            bool ok = true;
            if (!s_acc.empty()) {
                double gap = static_cast<double>(i - s_acc.back()) / static_cast<double>(Ms);
                double wrap = static_cast<double>(s_acc.front() + Ms - i) / static_cast<double>(Ms);
                ok = std::min(gap, 1.0 - gap) >= eps && std::min(wrap, 1.0 - wrap) >= eps;
            }
            if (ok) s_acc.push_back(i);
        }
        for (int n = 1; n <= n_max; ++n) {
            std::int64_t M = std::llround(std::pow(4.0, n - 1) / eps);
            if (M > max_grid) break;
            auto idx = greedy_separated_circle(M, eps, n);
            double sum = 0.0;
            for (std::int64_t i : idx)
                sum += std::exp(birkhoff_sum_circle(phi, static_cast<double>(i) / static_cast<double>(M), n));
            sum *= static_cast<double>(s_acc.size());
            PressureRow row;
            row.epsilon = eps;
            row.n = n;
            row.count = static_cast<std::int64_t>(idx.size()) *
                        static_cast<std::int64_t>(s_acc.size());
            row.log_sum = std::log(sum);
            row.value = row.log_sum / n;
            res.diagnostics.push_back(row);
        }
    }
    headline_from_rows(res);
    return res;
}

VariationalReport variational_check(const Potential& phi, double pressure, int max_period) {
    VariationalReport rep;
    rep.pressure = pressure;
    for (int p = 1; p <= max_period; ++p) {
        std::int64_t mod = (static_cast<std::int64_t>(1) << (2 * p)) - 1;  // 4^p - 1
        double best = -1e300;
        for (std::int64_t k = 0; k < mod; ++k) {
            double s = 0.0;
            std::int64_t j = k;
            for (int i = 0; i < p; ++i) {
                s += phi.eval(static_cast<double>(j) / static_cast<double>(mod));
                j = (4 * j) % mod;
            }
            best = std::max(best, s / p);
        }
        rep.bounds.push_back({p, best});
        rep.max_cycle_average = std::max(rep.max_cycle_average, best);
    }
    rep.satisfied = pressure >= rep.max_cycle_average - 1e-9;
    double min_phi = 1e300;
    for (int i = 0; i < 4096; ++i)
        min_phi = std::min(min_phi, phi.eval(static_cast<double>(i) / 4096.0));
    rep.entropy_floor = std::log(4.0) + min_phi;
    rep.floor_satisfied = pressure >= rep.entropy_floor - 1e-9;
    return rep;
}

std::function<double(const BasePoint&)> lift_potential(const SkewSystem& sys, int band,
                                                       const Potential& phi, int depth) {
    if (phi.fiber_independent()) {
        Potential copy = phi;
        return [copy](const BasePoint& p) { return copy.eval(p.t); };
    }
    Potential copy = phi;
    const SkewSystem* s = &sys;
    return [copy, s, band, depth](const BasePoint& p) {
        return copy.eval(p.t, graph_value(*s, band, p, depth));
    };
}

LiftedPressureReport lifted_pressure_check(const Potential& phi, int resolution,
                                           const std::vector<double>& epsilons, int baker_n_max) {
    LiftedPressureReport rep;
    rep.transfer_circle =
        transfer_pressure(phi, {resolution / 2, resolution}).value;
    rep.separated_baker = pressure_separated_baker(phi, epsilons, baker_n_max).value;
    rep.difference = std::abs(rep.transfer_circle - rep.separated_baker);
    return rep;
}

PushforwardMeasure pushforward_equilibrium(const SkewSystem& sys, int band,
                                           const std::vector<double>& density,
                                           const BaseMeasureSampler& sampler, std::size_t count,
                                           int depth, int threads) {
    if (density.empty()) throw std::invalid_argument("empty equilibrium density");
    std::vector<double> cdf(density.size());
    std::partial_sum(density.begin(), density.end(), cdf.begin());
    const double total = cdf.back();
    const int N = static_cast<int>(density.size());

    PushforwardMeasure out;
    out.measure.atoms.resize(count);
    parallel_for(count, threads, [&](std::size_t i) {
        double u = sampler.uniform(i, 7) * total;
        int cell = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        cell = std::min(cell, N - 1);
        double t = (cell + sampler.uniform(i, 8)) / N;
        BasePoint p = sampler.sample(BaseKind::Baker, i);
        p.t = t;  // pre-orbit branches stay those of the sampled point
        double g = graph_value(sys, band, p, depth);
        out.measure.atoms[i] = {t, g, 1.0 / static_cast<double>(count)};
    });
    std::vector<double> xs(count);
    for (std::size_t i = 0; i < count; ++i) xs[i] = out.measure.atoms[i].x;
    out.mean_x = mean_se(xs);
    return out;
}

EmpiricalMeasure advance_measure(const SkewSystem& sys, int band, const EmpiricalMeasure& m) {
    EmpiricalMeasure out;
    out.atoms.reserve(m.atoms.size());
    for (const auto& a : m.atoms)
        out.atoms.push_back({circle_step(a.t), sys.fiber_unchecked(band, a.t, a.x, 0), a.weight});
    return out;
}

} // namespace skewgraph
