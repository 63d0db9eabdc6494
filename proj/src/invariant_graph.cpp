#include "skewgraph/invariant_graph.hpp"

#include <cmath>
#include <stdexcept>

namespace skewgraph {

namespace {

// shared pullback core: composes the fibre maps at t_{-1}, ..., t_{-depth}
// (innermost first) over the band endpoints; a second endpoint pair injected at
// half depth produces the half-depth enclosure in the same sweep
struct PullbackState {
    double lo, hi;
    double half_lo, half_hi;
    double lo_prev;  // pullback of the left endpoint at depth-1, for residuals
};

PullbackState pullback_core(const SkewSystem& sys, int band, const std::vector<double>& ts,
                            int depth) {
    const Interval iv = sys.band(band).iv;
    const int half = depth / 2;
    PullbackState st{iv.lo, iv.hi, iv.lo, iv.hi, iv.lo};
    for (int k = depth; k >= 1; --k) {
        double t = ts[static_cast<std::size_t>(k)];
        st.lo = sys.fiber_unchecked(band, t, st.lo, 0);
        st.hi = sys.fiber_unchecked(band, t, st.hi, 0);
        if (k <= half) {
            st.half_lo = sys.fiber_unchecked(band, t, st.half_lo, 0);
            st.half_hi = sys.fiber_unchecked(band, t, st.half_hi, 0);
        }
        if (k <= depth - 1)
            st.lo_prev = sys.fiber_unchecked(band, t, st.lo_prev, 0);
    }
    return st;
}

} // namespace

FiberAttractor pullback_fiber(const SkewSystem& sys, int band, const BasePoint& p, int depth,
                              double bone_tol) {
    if (p.kind == BaseKind::Circle)
        throw std::invalid_argument("pullbacks need a pre-orbit; circle points have none");
    if (depth < 1) throw std::invalid_argument("pullback depth must be >= 1");
    auto ts = preorbit(p, depth);
    auto st = pullback_core(sys, band, ts, depth);
    FiberAttractor a;
    a.band = band;
    a.depth = depth;
    a.lo = st.lo;
    a.hi = st.hi;
    a.half_lo = st.half_lo;
    a.half_hi = st.half_hi;
    a.is_bone = a.width() > bone_tol;
    return a;
}

double graph_value(const SkewSystem& sys, int band, const BasePoint& p, int depth) {
    return pullback_fiber(sys, band, p, depth).lo;
}

double invariance_residual_at(const SkewSystem& sys, int band, const BasePoint& p, int depth) {
    auto ts = preorbit(p, depth);
    auto st = pullback_core(sys, band, ts, depth);
    // gamma at the stepped point, pulled back over its own pre-orbit
    // (t0, t-1, ..., t-(depth-1)), equals f_{t0} of the depth-1 pullback at p
    double g_step = sys.fiber_unchecked(band, p.t, st.lo_prev, 0);
    return std::abs(sys.fiber_unchecked(band, p.t, st.lo, 0) - g_step);
}

ResidualReport invariance_residual(const SkewSystem& sys, const std::vector<BasePoint>& samples,
                                   int depth, int threads) {
    ResidualReport rep;
    rep.per_sample.assign(samples.size(), 0.0);
    parallel_for(samples.size(), threads, [&](std::size_t i) {
        double worst = 0.0;
        for (int b = 0; b < sys.band_count(); ++b)
            worst = std::max(worst, invariance_residual_at(sys, b, samples[i], depth));
        rep.per_sample[i] = worst;
    });
    for (double r : rep.per_sample) rep.max_residual = std::max(rep.max_residual, r);
    return rep;
}

MultiGraphSample sample_multigraph(const SkewSystem& sys, const BaseMeasureSampler& sampler,
                                   std::size_t count, int depth, double bone_tol, int threads,
                                   bool special_points) {
    if (sys.base_kind() == BaseKind::Circle)
        throw std::invalid_argument("multi-graph sampling needs an invertible base");
    MultiGraphSample out;
    out.depth = depth;
    out.bone_tol = bone_tol;
    out.records.resize(count);
    parallel_for(count, threads, [&](std::size_t i) {
        MultiGraphRecord rec;
        rec.point = special_points ? sampler.sample_special(i)
                                   : sampler.sample(sys.base_kind(), i, depth);
        rec.fibers.reserve(static_cast<std::size_t>(sys.band_count()));
        auto ts = preorbit(rec.point, depth);
        for (int b = 0; b < sys.band_count(); ++b) {
            auto st = pullback_core(sys, b, ts, depth);
            FiberAttractor a;
            a.band = b;
            a.depth = depth;
            a.lo = st.lo;
            a.hi = st.hi;
            a.half_lo = st.half_lo;
            a.half_hi = st.half_hi;
            a.is_bone = a.width() > bone_tol;
            rec.fibers.push_back(a);
            double g_step = sys.fiber_unchecked(b, rec.point.t, st.lo_prev, 0);
            rec.residual = std::max(
                rec.residual,
                std::abs(sys.fiber_unchecked(b, rec.point.t, st.lo, 0) - g_step));
        }
        out.records[i] = std::move(rec);
    });
    out.cardinality_histogram.assign(static_cast<std::size_t>(sys.band_count()) + 1, 0);
    std::size_t bones = 0, total = 0;
    for (const auto& rec : out.records) {
        std::size_t points = 0;
        for (const auto& a : rec.fibers) {
            ++total;
            if (a.is_bone) ++bones;
            if (a.is_point(bone_tol)) ++points; else ++out.interval_fibers;
        }
        out.cardinality_histogram[points] += 1;
        out.max_residual = std::max(out.max_residual, rec.residual);
    }
    out.bone_fraction = total ? static_cast<double>(bones) / static_cast<double>(total) : 0.0;
    return out;
}

UscReport usc_probe(const SkewSystem& sys, int band, const BasePoint& p, double radius,
                    std::size_t count, int depth) {
    UscReport rep;
    rep.center = pullback_fiber(sys, band, p, depth);
    rep.neighbors = count;
    rep.shared_depth = depth;
    BaseMeasureSampler jitter{mix64(p.key, 0xA11CE), 7};
    std::vector<BasePoint> nbrs;
    for (std::size_t j = 0; j < count; ++j) {
        double dt = radius * (2.0 * jitter.uniform(j, 0) - 1.0);
        double ds = radius * (2.0 * jitter.uniform(j, 1) - 1.0);
        double t = p.t + dt, s = p.s + ds;
        t -= std::floor(t);
        s -= std::floor(s);
        nbrs.push_back(BasePoint::baker(t, s));
    }
    for (const auto& q : nbrs) {
        int shared = 0;
        while (shared < depth && backward_digit(q, shared) == backward_digit(p, shared)) ++shared;
        rep.shared_depth = std::min(rep.shared_depth, shared);
    }
    // enclosure decrement from the shortest shared pre-orbit, plus coordinate drift
    double shared_gap = 0.0;
    if (rep.shared_depth < depth) {
        double shallow_w = rep.shared_depth == 0
                               ? sys.band(band).iv.width()
                               : pullback_fiber(sys, band, p, rep.shared_depth).width();
        shared_gap = shallow_w - rep.center.width();
    }
    rep.eps = shared_gap + radius;
    for (const auto& q : nbrs) {
        auto a = pullback_fiber(sys, band, q, depth);
        double excess = std::max(rep.center.lo - rep.eps - a.lo, a.hi - (rep.center.hi + rep.eps));
        rep.max_excess = std::max(rep.max_excess, excess);
        rep.max_diam_violation =
            std::max(rep.max_diam_violation, a.width() - rep.center.width() - 2.0 * rep.eps);
        rep.max_neighbor_width = std::max(rep.max_neighbor_width, a.width());
    }
    if (count == 0) rep.max_excess = 0.0;
    return rep;
}

} // namespace skewgraph
