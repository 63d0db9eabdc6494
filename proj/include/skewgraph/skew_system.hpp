#ifndef SKEWGRAPH_SKEW_SYSTEM_HPP
#define SKEWGRAPH_SKEW_SYSTEM_HPP

#include <string>
#include <vector>

#include "skewgraph/base_dynamics.hpp"
#include "skewgraph/fiber_maps.hpp"

namespace skewgraph {

// one trapping band: a weak pair plus the optional repeller-creating bump on f0
struct BandSpec {
    double lo, hi;   // band interval
    double p0, p1;   // pinch points of the two cubic fibre maps
    double c;        // pinch strength
};

struct Band {
    Interval iv;
    FiberMap f0;      // unperturbed
    FiberMap f1;
    FiberMap f0_eff;  // perturbed copy of f0 when eta > 0, else f0
    double eta = 0.0;
    double w = 0.04;
};

struct SystemCheck {
    std::string name;
    bool passed = false;
    bool gating = true;  // informational entries do not fail the system
    double witness = 0.0;
    std::string note;
};

struct SystemReport {
    std::vector<SystemCheck> checks;
    std::vector<WeakPairReport> weak_pairs;  // per band, at eta = 0
    bool all_passed() const {
        for (const auto& c : checks)
            if (c.gating && !c.passed) return false;
        return true;
    }
    std::string to_text() const;
};

class SkewSystem {
public:
    SkewSystem(BaseKind base, const std::vector<BandSpec>& bands, BumpProfile profile,
               std::vector<double> etas, double w);

    // the shipped construction: bands [0.08,0.42] and [0.58,0.92] with pinch
    // points (0.18, 0.32) and (0.68, 0.82), c = 2, arcs [0,1/4] and [1/2,3/4]
    static SkewSystem reference(BaseKind base = BaseKind::Baker, double eta = 0.0);

    int band_count() const { return static_cast<int>(bands_.size()); }
    const Band& band(int i) const { return bands_.at(static_cast<std::size_t>(i)); }
    const std::vector<BandSpec>& specs() const { return specs_; }
    const BumpProfile& profile() const { return profile_; }
    BaseKind base_kind() const { return base_; }
    double perturbation_w() const { return w_; }
    std::vector<double> etas() const;

    // f_t(x) on band i; order differentiates in x
    double fiber(int i, double t, double x, int order = 0) const;
    double fiber_unchecked(int i, double t, double x, int order) const;
    // inverse of the (strictly increasing) combined map, by bisection
    double fiber_inverse(int i, double t, double x, int order = 0) const;

    int band_of(double x) const;  // -1 if x lies in no band

private:
    BaseKind base_;
    std::vector<BandSpec> specs_;
    std::vector<Band> bands_;
    BumpProfile profile_;
    double w_;
};

SystemReport validate_system(const SkewSystem& sys);

// replaces the band-1 f0 component by its bump perturbation; re-checks trapping
// and throws std::domain_error when the perturbed family leaks out of the band
SkewSystem perturb(const SkewSystem& sys, double eta);

struct OrbitRecord {
    int band = 0;
    std::vector<BasePoint> points;   // n + 1 base points
    std::vector<double> xs;          // n + 1 fibre coordinates
    std::vector<double> log_derivs;  // n entries: log Df_{t_k}(x_k)
};

// n-step forward orbit of (p, x0); the fibre coordinate must lie in a band.
// Fibre escape from the trapping band signals a broken system and throws.
OrbitRecord forward_orbit(const SkewSystem& sys, const BasePoint& p, double x0, int n);

// grid supremum of the C^2 distance between the fibre families (maps and their
// inverses); symmetric and zero iff the families agree on the grid
double c2_distance(const SkewSystem& a, const SkewSystem& b, int t_grid = 512, int x_grid = 512);

} // namespace skewgraph

#endif
