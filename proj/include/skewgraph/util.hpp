#ifndef SKEWGRAPH_UTIL_HPP
#define SKEWGRAPH_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace skewgraph {

// splitmix64 finalizer; the workhorse behind all counter-based randomness here.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

// uniform double in [0,1) from 53 high bits
inline double u01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
    double width() const { return hi - lo; }
    bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
    bool strictly_inside(double x) const { return x > lo && x < hi; }
};

// Index-partitioned parallel loop. Each index writes its own slot, so results
// are identical for any worker count.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    int nt = std::min<std::size_t>(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int w = 0; w < nt; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < n; i += nt) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

// round-trip-exact decimal formatting, used for all CSV output
inline std::string fmt_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct MeanSE {
    double mean = 0.0;
    double se = 0.0;
    std::size_t count = 0;
};

inline MeanSE mean_se(const std::vector<double>& xs) {
    MeanSE r;
    r.count = xs.size();
    if (xs.empty()) return r;
    double s = 0;
    for (double x : xs) s += x;
    r.mean = s / xs.size();
    if (xs.size() > 1) {
        double v = 0;
        for (double x : xs) v += (x - r.mean) * (x - r.mean);
        r.se = std::sqrt(v / (xs.size() - 1) / xs.size());
    }
    return r;
}

} // namespace skewgraph

#endif
