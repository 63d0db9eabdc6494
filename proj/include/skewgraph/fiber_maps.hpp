#ifndef SKEWGRAPH_FIBER_MAPS_HPP
#define SKEWGRAPH_FIBER_MAPS_HPP

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "skewgraph/util.hpp"

namespace skewgraph {

// Two-term power map  f(x) = a x^p + b x^q + c  on a closed interval.
struct PowerLaw {
    double a, p, b, q, c;
};

// f(x) = x - c (x - pin)^3.  Increasing on its band when 3c(x-pin)^2 < 1,
// fixed point at pin with Df(pin) = 1 exactly.
struct CubicPinch {
    double pin;
    double c;
};

class FiberMap;

// g(x) = base(x) + eta (x - center) exp(-((x - center)/w)^2).
// center is the unique fixed point of the base map, so Dg(center) = 1 + eta.
struct Perturbed {
    std::shared_ptr<const FiberMap> base;
    double eta;
    double w;
    double center;
};

class FiberMap {
public:
    FiberMap(PowerLaw f, Interval domain) : form_(f), domain_(domain) {}
    FiberMap(CubicPinch f, Interval domain) : form_(f), domain_(domain) {}
    FiberMap(Perturbed f, Interval domain) : form_(std::move(f)), domain_(domain) {}

    static FiberMap power_law(double a, double p, double b, double q, double c, Interval dom);
    static FiberMap cubic_pinch(double pin, double c, Interval dom);
    // center defaults to the base map's unique fixed point
    static FiberMap perturbed(const FiberMap& base, double eta, double w);

    const Interval& domain() const { return domain_; }
    bool is_perturbed() const { return std::holds_alternative<Perturbed>(form_); }
    double perturbation_eta() const;

    // value (order 0), first (1) or second (2) derivative; throws std::domain_error
    // if x is outside the domain.
    double eval(double x, int order = 0) const;

    // derivative/value without the domain check, for grid scans that probe endpoints
    double eval_unchecked(double x, int order) const;

    // f(x) - x in closed form per variant; near tangent fixed points the naive
    // difference cancels catastrophically, this does not
    double displacement(double x) const;

    // inverse by bisection on the (strictly increasing) map; |f(y) - x| < 1e-13.
    // order 0: f^{-1}(x); order 1: 1/Df(f^{-1} x); order 2: -D2f/(Df)^3 at f^{-1} x.
    double eval_inverse(double x, int order = 0) const;

private:
    std::variant<PowerLaw, CubicPinch, Perturbed> form_;
    Interval domain_;
};

struct FixedPoint {
    double location;
    double derivative;
};

// all roots of f(x) - x in the domain: sign-change scan on a 10^4 grid,
// then bisection to |f(x)-x| < 1e-12
std::vector<FixedPoint> find_fixed_points(const FiberMap& map, double tol = 1e-12);

struct ConditionCheck {
    std::string name;
    bool passed = false;
    double witness = 0.0;  // the extremal value that decided the check
    std::string note;
};

struct SWeakReport {
    std::vector<FixedPoint> fixed_points;
    bool unique_fixed_point = false;
    bool derivative_one_at_p = false;   // Df(p) within [1 - tol_d, 1 + tol_d]
    bool derivative_below_one = false;  // Df(x) < 1 at grid points away from p
    bool pairwise_contractive = false;  // |f(x)-f(y)| < |x-y| on grid pairs
    double df_at_p = 0.0;
    double max_df_away = 0.0;
    bool passed() const {
        return unique_fixed_point && derivative_one_at_p && derivative_below_one &&
               pairwise_contractive;
    }
};

SWeakReport validate_s_weak_contractive(const FiberMap& map, double tol_d = 0.06,
                                        double tol_p = 1e-3);

struct CoveringInterval {
    double x0, x1;
    double f0_x0, f0_x1, f1_x0, f1_x1;  // endpoint images used in the certificate
};

// endpoint-arithmetic certificate: f0(x0) < x0, f1(x1) > x1, f0(x1) > f1(x0),
// and Df_i < 1 on [x0, x1]
std::optional<CoveringInterval> certify_covering(const FiberMap& f0, const FiberMap& f1,
                                                 double x0, double x1);

struct WeakPairReport {
    std::vector<FixedPoint> fixed_points_f0, fixed_points_f1;
    double caverage_min_margin = 0.0;  // min over grid of -(log Df0 + log Df1)
    std::optional<CoveringInterval> covering;
    std::vector<ConditionCheck> conditions;  // (1) s-weak maps, (2) average contraction,
                                             // (3) fixed-point separation, plus covering
    bool passed() const {
        for (const auto& c : conditions)
            if (!c.passed) return false;
        return true;
    }
};

// checks the weak-pair conditions for (f0, f1) on their shared band and searches
// for a covering interval between the two fixed points
WeakPairReport validate_weak_pair(const FiberMap& f0, const FiberMap& f1, Interval band);

// circle arcs where the interpolation parameter is pinned to 0 resp. 1;
// quintic smoothstep (6u^5 - 15u^4 + 10u^3) across the gaps keeps it C^2
struct BumpProfile {
    Interval arc0{0.0, 0.25};
    Interval arc1{0.5, 0.75};
    double delta = 0.02;

    // order 0: value; order 1: d/dt
    double eval(double t, int order = 0) const;
};

// f_t(x) = (1 - l(t)^2) f0(x) + l(t)^2 f1(x); order differentiates in x.
// Throws std::domain_error if x is outside the shared band.
double isotopy_eval(const FiberMap& f0, const FiberMap& f1, const BumpProfile& profile,
                    double t, double x, int order = 0);

} // namespace skewgraph

#endif
