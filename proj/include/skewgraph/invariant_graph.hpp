#ifndef SKEWGRAPH_INVARIANT_GRAPH_HPP
#define SKEWGRAPH_INVARIANT_GRAPH_HPP

#include <cstddef>
#include <vector>

#include "skewgraph/skew_system.hpp"

namespace skewgraph {

// Nested-pullback enclosure of the attractor fibre over one base point: the
// image of the band under the fibre maps composed along the pre-orbit
// (endpoints suffice, the maps are increasing).  half_* holds the enclosure at
// half depth; the gap between the two is the Cauchy decrement used to decide
// whether the fibre has collapsed to a point at this depth.
struct FiberAttractor {
    int band = 0;
    int depth = 0;
    double lo = 0.0, hi = 0.0;
    double half_lo = 0.0, half_hi = 0.0;
    bool is_bone = false;  // width > bone_tol

    double width() const { return hi - lo; }
    double cauchy_gap() const { return (half_hi - half_lo) - (hi - lo); }
    // still collapsing (gap dominates) or already below the absolute tolerance
    bool is_point(double bone_tol) const {
        return width() <= bone_tol || width() <= cauchy_gap();
    }
};

FiberAttractor pullback_fiber(const SkewSystem& sys, int band, const BasePoint& p, int depth,
                              double bone_tol = 1e-4);

// pullback of the left band endpoint; the lower edge of the fibre enclosure
double graph_value(const SkewSystem& sys, int band, const BasePoint& p, int depth);

// |f_{t0}(gamma(p)) - gamma(step p)| with both graph values taken from
// depth-truncated pullbacks
double invariance_residual_at(const SkewSystem& sys, int band, const BasePoint& p, int depth);

struct ResidualReport {
    double max_residual = 0.0;
    std::vector<double> per_sample;
};

ResidualReport invariance_residual(const SkewSystem& sys, const std::vector<BasePoint>& samples,
                                   int depth, int threads = 1);

struct MultiGraphRecord {
    BasePoint point;
    std::vector<FiberAttractor> fibers;  // one per band
    double residual = 0.0;               // max over bands
};

struct MultiGraphSample {
    std::vector<MultiGraphRecord> records;
    int depth = 0;
    double bone_tol = 0.0;
    std::vector<std::size_t> cardinality_histogram;  // index = #point fibres of a sample
    std::size_t interval_fibers = 0;                 // fibres not collapsed at this depth
    double bone_fraction = 0.0;                      // by the absolute width rule
    double max_residual = 0.0;
};

MultiGraphSample sample_multigraph(const SkewSystem& sys, const BaseMeasureSampler& sampler,
                                   std::size_t count, int depth, double bone_tol = 1e-4,
                                   int threads = 1, bool special_points = false);

// Upper-semicontinuity probe: fibres over base points near p must not stick out
// of an eps-neighbourhood of the fibre over p, where eps combines the Cauchy
// decrement of the enclosure at the shared pre-orbit depth with a drift
// allowance for the coordinate offset (sup_t |d f_t / dt| * 4r/3 < r here).
struct UscReport {
    FiberAttractor center;
    double eps = 0.0;
    int shared_depth = 0;     // min number of leading pre-orbit branches shared
    double max_excess = 0.0;  // how far any neighbour fibre exceeds U_eps(center)
    double max_diam_violation = 0.0;  // max over neighbours of diam' - diam - 2 eps
    double max_neighbor_width = 0.0;
    std::size_t neighbors = 0;
};

UscReport usc_probe(const SkewSystem& sys, int band, const BasePoint& p, double radius,
                    std::size_t count, int depth);

} // namespace skewgraph

#endif
