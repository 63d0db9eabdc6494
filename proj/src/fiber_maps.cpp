#include "skewgraph/fiber_maps.hpp"

#include <cmath>
#include <stdexcept>

namespace skewgraph {

namespace {

constexpr int kGridPoints = 10000;

double eval_power_law(const PowerLaw& f, double x, int order) {
    switch (order) {
        case 0: return f.a * std::pow(x, f.p) + f.b * std::pow(x, f.q) + f.c;
        case 1: return f.a * f.p * std::pow(x, f.p - 1) + f.b * f.q * std::pow(x, f.q - 1);
        case 2:
            return f.a * f.p * (f.p - 1) * std::pow(x, f.p - 2) +
                   f.b * f.q * (f.q - 1) * std::pow(x, f.q - 2);
        default: throw std::invalid_argument("order must be 0, 1 or 2");
    }
}

double eval_cubic_pinch(const CubicPinch& f, double x, int order) {
    double d = x - f.pin;
    switch (order) {
        case 0: return x - f.c * d * d * d;
        case 1: return 1.0 - 3.0 * f.c * d * d;
        case 2: return -6.0 * f.c * d;
        default: throw std::invalid_argument("order must be 0, 1 or 2");
    }
}

double eval_perturbation(double d, double eta, double w, int order) {
    double u = d / w;
    double e = std::exp(-u * u);
    switch (order) {
        case 0: return eta * d * e;
        case 1: return eta * e * (1.0 - 2.0 * u * u);
        case 2: return -eta * e * (2.0 * u / w) * (3.0 - 2.0 * u * u);
        default: throw std::invalid_argument("order must be 0, 1 or 2");
    }
}

} // namespace

FiberMap FiberMap::power_law(double a, double p, double b, double q, double c, Interval dom) {
    return FiberMap(PowerLaw{a, p, b, q, c}, dom);
}

FiberMap FiberMap::cubic_pinch(double pin, double c, Interval dom) {
    return FiberMap(CubicPinch{pin, c}, dom);
}

FiberMap FiberMap::perturbed(const FiberMap& base, double eta, double w) {
    auto roots = find_fixed_points(base);
    if (roots.size() != 1)
        throw std::invalid_argument("perturbation center requires a unique fixed point");
    Perturbed p{std::make_shared<FiberMap>(base), eta, w, roots.front().location};
    return FiberMap(std::move(p), base.domain());
}

double FiberMap::perturbation_eta() const {
    if (const auto* p = std::get_if<Perturbed>(&form_)) return p->eta;
    return 0.0;
}

double FiberMap::eval_unchecked(double x, int order) const {
    if (const auto* f = std::get_if<PowerLaw>(&form_)) return eval_power_law(*f, x, order);
    if (const auto* f = std::get_if<CubicPinch>(&form_)) return eval_cubic_pinch(*f, x, order);
    const auto& f = std::get<Perturbed>(form_);
    return f.base->eval_unchecked(x, order) + eval_perturbation(x - f.center, f.eta, f.w, order);
}

double FiberMap::eval(double x, int order) const {
    if (!domain_.contains(x, 1e-12))
        throw std::domain_error("fiber coordinate outside the map domain");
    return eval_unchecked(x, order);
}

double FiberMap::displacement(double x) const {
    if (const auto* f = std::get_if<PowerLaw>(&form_))
        return eval_power_law(*f, x, 0) - x;
    if (const auto* f = std::get_if<CubicPinch>(&form_)) {
        double d = x - f->pin;
        return -f->c * d * d * d;
    }
    const auto& f = std::get<Perturbed>(form_);
    return f.base->displacement(x) + eval_perturbation(x - f.center, f.eta, f.w, 0);
}

double FiberMap::eval_inverse(double x, int order) const {
    double a = domain_.lo, b = domain_.hi;
    // fixed iteration count reaches ~1e-16 of the bracket; the map is strictly increasing
    for (int i = 0; i < 60; ++i) {
        double m = 0.5 * (a + b);
        if (eval_unchecked(m, 0) < x) a = m; else b = m;
    }
    double y = 0.5 * (a + b);
    switch (order) {
        case 0: return y;
        case 1: return 1.0 / eval_unchecked(y, 1);
        case 2: {
            double d1 = eval_unchecked(y, 1);
            return -eval_unchecked(y, 2) / (d1 * d1 * d1);
        }
        default: throw std::invalid_argument("order must be 0, 1 or 2");
    }
}

std::vector<FixedPoint> find_fixed_points(const FiberMap& map, double tol) {
    const Interval dom = map.domain();
    const double step = dom.width() / kGridPoints;
    std::vector<FixedPoint> out;
    auto push = [&](double r) {
        if (!out.empty() && std::abs(out.back().location - r) < step) return;
        out.push_back({r, map.eval_unchecked(r, 1)});
    };
    double prev_x = dom.lo;
    double prev_g = map.displacement(prev_x);
    if (prev_g == 0.0) push(prev_x);
    for (int i = 1; i <= kGridPoints; ++i) {
        double x = dom.lo + dom.width() * i / kGridPoints;
        double g = map.displacement(x);
        if (g == 0.0) {
            push(x);
        } else if (prev_g * g < 0.0) {
            // bisect to bracket width min(tol, 1e-15); flat (tangent) roots need
            // the full bracket, an |f(x)-x| early exit would stop far from them
            double a = prev_x, b = x, ga = prev_g;
            const double bracket = std::min(tol, 1e-15);
            while (b - a > bracket) {
                double m = 0.5 * (a + b);
                if (m <= a || m >= b) break;  // bracket hit ulp spacing
                double gm = map.displacement(m);
                if (gm == 0.0) { a = b = m; break; }
                if (ga * gm < 0.0) b = m; else { a = m; ga = gm; }
            }
            push(0.5 * (a + b));
        }
        prev_x = x;
        prev_g = g;
    }
    return out;
}

SWeakReport validate_s_weak_contractive(const FiberMap& map, double tol_d, double tol_p) {
    SWeakReport r;
    r.fixed_points = find_fixed_points(map);
    r.unique_fixed_point = r.fixed_points.size() == 1;
    if (!r.unique_fixed_point) return r;  // structural failure recorded, not thrown

    const double p = r.fixed_points.front().location;
    const Interval dom = map.domain();
    r.df_at_p = map.eval_unchecked(p, 1);
    r.derivative_one_at_p = std::abs(r.df_at_p - 1.0) <= tol_d;

    r.max_df_away = -1e300;
    for (int i = 0; i <= kGridPoints; ++i) {
        double x = dom.lo + dom.width() * i / kGridPoints;
        if (std::abs(x - p) <= tol_p) continue;
        r.max_df_away = std::max(r.max_df_away, map.eval_unchecked(x, 1));
    }
    r.derivative_below_one = r.max_df_away < 1.0;

    // |f(x)-f(y)| < |x-y| over grid pairs at several separations
    r.pairwise_contractive = true;
    const int n = 512;
    for (int gap : {1, 7, 64, 255}) {
        for (int i = 0; i + gap <= n; ++i) {
            double x = dom.lo + dom.width() * i / n;
            double y = dom.lo + dom.width() * (i + gap) / n;
            if (std::abs(map.eval_unchecked(y, 0) - map.eval_unchecked(x, 0)) >= y - x) {
                r.pairwise_contractive = false;
                break;
            }
        }
        if (!r.pairwise_contractive) break;
    }
    return r;
}

std::optional<CoveringInterval> certify_covering(const FiberMap& f0, const FiberMap& f1,
                                                 double x0, double x1) {
    CoveringInterval c{x0, x1,
                       f0.eval_unchecked(x0, 0), f0.eval_unchecked(x1, 0),
                       f1.eval_unchecked(x0, 0), f1.eval_unchecked(x1, 0)};
    // Cl(B) inside f0(B) u f1(B): the left image sticks out below x0, the right
    // image above x1, and the two images overlap.
    if (!(c.f0_x0 < x0 && c.f1_x1 > x1 && c.f0_x1 > c.f1_x0)) return std::nullopt;
    for (int i = 0; i <= 256; ++i) {
        double x = x0 + (x1 - x0) * i / 256;
        if (f0.eval_unchecked(x, 1) >= 1.0 || f1.eval_unchecked(x, 1) >= 1.0)
            return std::nullopt;
    }
    return c;
}

WeakPairReport validate_weak_pair(const FiberMap& f0, const FiberMap& f1, Interval band) {
    WeakPairReport r;
    r.fixed_points_f0 = find_fixed_points(f0);
    r.fixed_points_f1 = find_fixed_points(f1);

    ConditionCheck c1{"s_weak_contractive_maps", false, 0.0, ""};
    auto s0 = validate_s_weak_contractive(f0);
    auto s1 = validate_s_weak_contractive(f1);
    c1.passed = s0.passed() && s1.passed();
    c1.witness = std::max(std::abs(s0.df_at_p - 1.0), std::abs(s1.df_at_p - 1.0));
    if (!c1.passed) c1.note = !s0.passed() ? "f0 fails" : "f1 fails";
    r.conditions.push_back(c1);

    ConditionCheck c2{"contraction_on_average", false, 0.0, ""};
    double min_margin = 1e300;
    for (int i = 0; i <= kGridPoints; ++i) {
        double x = band.lo + band.width() * i / kGridPoints;
        double m = -(std::log(f0.eval_unchecked(x, 1)) + std::log(f1.eval_unchecked(x, 1)));
        min_margin = std::min(min_margin, m);
    }
    r.caverage_min_margin = min_margin;
    c2.passed = min_margin > 0.0;
    c2.witness = min_margin;
    r.conditions.push_back(c2);

    ConditionCheck c3{"fixed_point_separation", false, 0.0, ""};
    if (r.fixed_points_f0.size() == 1 && r.fixed_points_f1.size() == 1) {
        double p0 = r.fixed_points_f0.front().location;
        double p1 = r.fixed_points_f1.front().location;
        bool interior = p0 > band.lo && p0 < band.hi && p1 > band.lo && p1 < band.hi;
        bool cross = std::abs(f0.eval_unchecked(p1, 0) - p0) > 1e-9 &&
                     std::abs(f1.eval_unchecked(p0, 0) - p1) > 1e-9;
        c3.passed = interior && cross && p1 - p0 > 1e-9;
        c3.witness = p1 - p0;
        if (p0 >= p1) c3.note = "ordering failure: p0 >= p1";
    } else {
        c3.note = "fixed points not unique";
    }
    r.conditions.push_back(c3);

    ConditionCheck c4{"covering_interval", false, 0.0, ""};
    if (c3.passed) {
        double p0 = r.fixed_points_f0.front().location;
        double p1 = r.fixed_points_f1.front().location;
        // scan candidate intervals from the midpoint outward
        for (int k = 24; k >= 1 && !r.covering; --k) {
            double half = (p1 - p0) * 0.5 * k / 25.0;
            double mid = 0.5 * (p0 + p1);
            r.covering = certify_covering(f0, f1, mid - half, mid + half);
        }
        if (r.covering) {
            c4.passed = true;
            c4.witness = r.covering->x1 - r.covering->x0;
        }
    }
    r.conditions.push_back(c4);
    return r;
}

double BumpProfile::eval(double t, int order) const {
    t -= std::floor(t);
    auto smooth = [order](double u) {
        if (order == 0) return ((6.0 * u - 15.0) * u + 10.0) * u * u * u;
        return ((30.0 * u - 60.0) * u + 30.0) * u * u;  // d/du
    };
    if (t >= arc0.lo && t <= arc0.hi) return 0.0;
    if (t >= arc1.lo && t <= arc1.hi) return order == 0 ? 1.0 : 0.0;
    if (t > arc0.hi && t < arc1.lo) {  // rising gap
        double len = arc1.lo - arc0.hi;
        double v = smooth((t - arc0.hi) / len);
        return order == 0 ? v : v / len;
    }
    // falling gap (wraps through 1)
    double len = 1.0 - arc1.hi + arc0.lo;
    double u = (t - arc1.hi) / len;
    double v = smooth(u);
    return order == 0 ? 1.0 - v : -v / len;
}

double isotopy_eval(const FiberMap& f0, const FiberMap& f1, const BumpProfile& profile,
                    double t, double x, int order) {
    double l = profile.eval(t, 0);
    double w = l * l;
    return (1.0 - w) * f0.eval(x, order) + w * f1.eval(x, order);
}

} // namespace skewgraph
