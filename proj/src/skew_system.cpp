#include "skewgraph/skew_system.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace skewgraph {

SkewSystem::SkewSystem(BaseKind base, const std::vector<BandSpec>& bands, BumpProfile profile,
                       std::vector<double> etas, double w)
    : base_(base), specs_(bands), profile_(profile), w_(w) {
    if (bands.empty()) throw std::invalid_argument("at least one band required");
    etas.resize(bands.size(), 0.0);
    for (std::size_t i = 0; i < bands.size(); ++i) {
        const auto& b = bands[i];
        if (!(b.lo < b.p0 && b.p0 < b.p1 && b.p1 < b.hi))
            throw std::invalid_argument("band requires lo < p0 < p1 < hi");
        Interval iv{b.lo, b.hi};
        FiberMap f0 = FiberMap::cubic_pinch(b.p0, b.c, iv);
        FiberMap f1 = FiberMap::cubic_pinch(b.p1, b.c, iv);
        FiberMap f0e = etas[i] > 0.0 ? FiberMap::perturbed(f0, etas[i], w) : f0;
        bands_.push_back(Band{iv, f0, f1, f0e, etas[i], w});
    }
}

SkewSystem SkewSystem::reference(BaseKind base, double eta) {
    std::vector<BandSpec> bands{{0.08, 0.42, 0.18, 0.32, 2.0}, {0.58, 0.92, 0.68, 0.82, 2.0}};
    return SkewSystem(base, bands, BumpProfile{}, {eta, 0.0}, 0.04);
}

std::vector<double> SkewSystem::etas() const {
    std::vector<double> v;
    for (const auto& b : bands_) v.push_back(b.eta);
    return v;
}

double SkewSystem::fiber_unchecked(int i, double t, double x, int order) const {
    const Band& b = bands_[static_cast<std::size_t>(i)];
    double l = profile_.eval(t, 0);
    double wt = l * l;
    return (1.0 - wt) * b.f0_eff.eval_unchecked(x, order) + wt * b.f1.eval_unchecked(x, order);
}

double SkewSystem::fiber(int i, double t, double x, int order) const {
    const Band& b = bands_.at(static_cast<std::size_t>(i));
    if (!b.iv.contains(x, 1e-12)) throw std::domain_error("fibre coordinate outside the band");
    return fiber_unchecked(i, t, x, order);
}

double SkewSystem::fiber_inverse(int i, double t, double x, int order) const {
    const Band& b = bands_.at(static_cast<std::size_t>(i));
    double a = b.iv.lo, c = b.iv.hi;
    for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (a + c);
        if (fiber_unchecked(i, t, m, 0) < x) a = m; else c = m;
    }
    double y = 0.5 * (a + c);
    switch (order) {
        case 0: return y;
        case 1: return 1.0 / fiber_unchecked(i, t, y, 1);
        case 2: {
            double d1 = fiber_unchecked(i, t, y, 1);
            return -fiber_unchecked(i, t, y, 2) / (d1 * d1 * d1);
        }
        default: throw std::invalid_argument("order must be 0, 1 or 2");
    }
}

int SkewSystem::band_of(double x) const {
    for (int i = 0; i < band_count(); ++i)
        if (bands_[static_cast<std::size_t>(i)].iv.contains(x)) return i;
    return -1;
}

std::string SystemReport::to_text() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.passed ? "pass" : "FAIL") << (c.gating ? "  " : " i") << " " << c.name
           << "  witness=" << fmt_g17(c.witness);
        if (!c.note.empty()) os << "  (" << c.note << ")";
        os << "\n";
    }
    return os.str();
}

SystemReport validate_system(const SkewSystem& sys) {
    SystemReport rep;
    const int t_grid = 1000;
    for (int i = 0; i < sys.band_count(); ++i) {
        const Band& b = sys.band(i);
        auto wp = validate_weak_pair(b.f0, b.f1, b.iv);
        rep.weak_pairs.push_back(wp);
        rep.checks.push_back({"weak_pair_band" + std::to_string(i + 1) + "_eta0", wp.passed(),
                              true, wp.caverage_min_margin, ""});

        // trapping and monotonicity of the effective family over a t-grid
        double trap_margin = 1e300, min_df = 1e300;
        for (int j = 0; j < t_grid; ++j) {
            double t = static_cast<double>(j) / t_grid;
            double flo = sys.fiber_unchecked(i, t, b.iv.lo, 0);
            double fhi = sys.fiber_unchecked(i, t, b.iv.hi, 0);
            trap_margin = std::min({trap_margin, flo - b.iv.lo, b.iv.hi - fhi});
            for (int k = 0; k <= 16; ++k) {
                double x = b.iv.lo + b.iv.width() * k / 16;
                min_df = std::min(min_df, sys.fiber_unchecked(i, t, x, 1));
            }
        }
        rep.checks.push_back({"trapping_band" + std::to_string(i + 1), trap_margin > 0.0, true,
                              trap_margin, ""});
        rep.checks.push_back({"monotone_band" + std::to_string(i + 1), min_df > 0.0, true,
                              min_df, ""});

        // modulus of continuity in t against the analytic slope bound
        double max_step = 0.0, slope_bound = 0.0;
        for (int j = 0; j < t_grid; ++j) {
            double t0 = static_cast<double>(j) / t_grid;
            double t1 = static_cast<double>(j + 1) / t_grid;
            for (double x : {b.iv.lo, 0.5 * (b.iv.lo + b.iv.hi), b.iv.hi}) {
                max_step = std::max(max_step, std::abs(sys.fiber_unchecked(i, t1, x, 0) -
                                                       sys.fiber_unchecked(i, t0, x, 0)));
                double gap = std::abs(b.f1.eval_unchecked(x, 0) - b.f0_eff.eval_unchecked(x, 0));
                double dl = std::abs(2.0 * sys.profile().eval(t0, 0) * sys.profile().eval(t0, 1));
                slope_bound = std::max(slope_bound, gap * dl);
            }
        }
        // the slope bound is sampled at interval endpoints; 1.5x covers the
        // interior of each grid interval for these smooth families
        rep.checks.push_back({"t_continuity_band" + std::to_string(i + 1),
                              max_step <= 1.5 * slope_bound / t_grid + 1e-9, true, max_step, ""});

        // informational: the effective f0 loses s-weak contractivity once the
        // bump makes its pinch point repelling
        if (b.eta > 0.0) {
            auto sw = validate_s_weak_contractive(b.f0_eff);
            rep.checks.push_back({"s_weak_band" + std::to_string(i + 1) + "_f0_effective",
                                  sw.passed(), false, sw.df_at_p,
                                  sw.passed() ? "" : "pinch point repelling under perturbation"});
        }
    }
    return rep;
}

SkewSystem perturb(const SkewSystem& sys, double eta) {
    if (eta < 0.0) throw std::invalid_argument("eta must be nonnegative");
    auto etas = sys.etas();
    etas[0] = eta;
    SkewSystem out(sys.base_kind(), sys.specs(), sys.profile(), etas, sys.perturbation_w());
    const Band& b = out.band(0);
    for (int j = 0; j <= 1000; ++j) {
        double t = static_cast<double>(j) / 1000;
        double flo = out.fiber_unchecked(0, t, b.iv.lo, 0);
        double fhi = out.fiber_unchecked(0, t, b.iv.hi, 0);
        if (!(flo > b.iv.lo && fhi < b.iv.hi)) {
            std::ostringstream os;
            os << "perturbation eta=" << eta << " breaks trapping at t=" << t
               << ": image endpoints (" << fmt_g17(flo) << ", " << fmt_g17(fhi) << ")";
            throw std::domain_error(os.str());
        }
    }
    return out;
}

OrbitRecord forward_orbit(const SkewSystem& sys, const BasePoint& p, double x0, int n) {
    OrbitRecord rec;
    rec.band = sys.band_of(x0);
    if (rec.band < 0) throw std::domain_error("fibre start outside every band");
    rec.points.reserve(static_cast<std::size_t>(n) + 1);
    rec.xs.reserve(static_cast<std::size_t>(n) + 1);
    rec.log_derivs.reserve(static_cast<std::size_t>(n));
    ForwardWalker walker(p);
    double x = x0;
    rec.points.push_back(walker.point());
    rec.xs.push_back(x);
    const Interval iv = sys.band(rec.band).iv;
    for (int k = 0; k < n; ++k) {
        double t = walker.t();
        rec.log_derivs.push_back(std::log(sys.fiber_unchecked(rec.band, t, x, 1)));
        x = sys.fiber_unchecked(rec.band, t, x, 0);
        if (!iv.contains(x))
            throw std::runtime_error("fibre escaped its trapping band; system invalid");
        walker.step();
        rec.points.push_back(walker.point());
        rec.xs.push_back(x);
    }
    return rec;
}

double c2_distance(const SkewSystem& a, const SkewSystem& b, int t_grid, int x_grid) {
    if (a.band_count() != b.band_count())
        throw std::invalid_argument("systems must share their bands");
    double sup = 0.0;
    for (int i = 0; i < a.band_count(); ++i) {
        const Interval iva = a.band(i).iv, ivb = b.band(i).iv;
        if (std::abs(iva.lo - ivb.lo) > 1e-12 || std::abs(iva.hi - ivb.hi) > 1e-12)
            throw std::invalid_argument("systems must share their bands");
        for (int j = 0; j < t_grid; ++j) {
            double t = static_cast<double>(j) / t_grid;
            for (int k = 0; k <= x_grid; ++k) {
                double x = iva.lo + iva.width() * k / x_grid;
                for (int order = 0; order <= 2; ++order)
                    sup = std::max(sup, std::abs(a.fiber_unchecked(i, t, x, order) -
                                                 b.fiber_unchecked(i, t, x, order)));
                // one bisection per system, derivatives from the inverse-function rule
                double ya = a.fiber_inverse(i, t, x, 0);
                double yb = b.fiber_inverse(i, t, x, 0);
                double da = a.fiber_unchecked(i, t, ya, 1), db = b.fiber_unchecked(i, t, yb, 1);
                sup = std::max(sup, std::abs(ya - yb));
                sup = std::max(sup, std::abs(1.0 / da - 1.0 / db));
                sup = std::max(sup, std::abs(-a.fiber_unchecked(i, t, ya, 2) / (da * da * da) +
                                             b.fiber_unchecked(i, t, yb, 2) / (db * db * db)));
            }
        }
    }
    return sup;
}

} // namespace skewgraph
