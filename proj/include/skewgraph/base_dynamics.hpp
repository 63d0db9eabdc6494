#ifndef SKEWGRAPH_BASE_DYNAMICS_HPP
#define SKEWGRAPH_BASE_DYNAMICS_HPP

#include <cstdint>
#include <vector>

#include "skewgraph/util.hpp"

namespace skewgraph {

enum class BaseKind { Circle, Baker, Solenoid };

// A point of the base dynamics.
//
// Circle: forward coordinate t only.  Baker: the pair (t, s) on the torus; the
// s-expansion encodes the pre-orbit of t.  Solenoid: t plus an explicit list of
// pre-orbit branch digits in {0,1,2,3} of finite depth.
//
// Points produced by BaseMeasureSampler carry a nonzero stream key: their base-4
// digit string is conceptually bi-infinite, and digits beyond double precision
// are drawn lazily (and reproducibly) from the key.  A double coordinate holds
// only ~26 base-4 digits, so without the key both long forward orbits and deep
// pre-orbits would degenerate onto the dyadic lattice.  Points constructed from
// plain doubles (key 0) extend with zero digits, which keeps them exactly equal
// to naive floating-point iteration.
struct BasePoint {
    BaseKind kind = BaseKind::Baker;
    double t = 0.0;
    double s = 0.0;
    std::vector<std::uint8_t> digits;  // Solenoid only: pre-orbit branches
    std::uint64_t key = 0;
    std::int64_t phase = 0;  // shift of the keyed digit string under stepping

    static BasePoint circle(double t) { return {BaseKind::Circle, t, 0.0, {}, 0, 0}; }
    static BasePoint baker(double t, double s) { return {BaseKind::Baker, t, s, {}, 0, 0}; }
    static BasePoint solenoid(std::vector<std::uint8_t> digits, double t0);
};

double circle_step(double t);              // 4 t (mod 1)
BasePoint baker_step(const BasePoint& p);  // (t,s) -> (4t mod 1, (s + floor(4t))/4)
BasePoint baker_inverse(const BasePoint& p);

// digit of the point's base-4 string: index k >= 0 is the k-th pre-orbit branch
// (s-side); forward digits are addressed by forward_digit.
int backward_digit(const BasePoint& p, std::int64_t k);
int forward_digit(const BasePoint& p, std::int64_t k);

// t0, t-1, ..., t-depth with omega(t-(k+1)) = t-k by construction.
// Circle points have no canonical pre-orbit and throw std::invalid_argument;
// Solenoid points throw if depth exceeds their recorded digits.
std::vector<double> preorbit(const BasePoint& p, int depth);

BasePoint baker_to_solenoid(const BasePoint& p, int depth);

// reconstruct s = sum digits[i] / 4^{i+1}
double solenoid_reconstruct_s(const BasePoint& p);

// Drives long forward base orbits.  The t coordinate is rebuilt each step from
// a 32-digit window of the point's digit string, so orbits do not collapse onto
// dyadics the way repeated floating-point doubling does.
class ForwardWalker {
public:
    explicit ForwardWalker(const BasePoint& start);
    const BasePoint& point() const { return cur_; }
    double t() const { return cur_.t; }
    void step();

private:
    BasePoint cur_;
    std::uint64_t window_;  // 32 upcoming base-4 digits, most significant first
    std::int64_t next_idx_; // index of the first digit past the window
};

// Deterministic Lebesgue sampler: identical (seed, stream) always yields the
// identical sequence, and every sample owns an independent digit key so that
// parallel consumers cannot perturb each other.
struct BaseMeasureSampler {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    std::uint64_t sample_key(std::uint64_t index) const;
    BasePoint sample(BaseKind kind, std::uint64_t index, int solenoid_depth = 60) const;
    // bone-site mode: uniform t with the all-zero pre-orbit branch
    BasePoint sample_special(std::uint64_t index) const;
    std::vector<BasePoint> sample_many(BaseKind kind, std::size_t count,
                                       int solenoid_depth = 60) const;
    // plain uniform doubles, for fiber starts and auxiliary draws
    double uniform(std::uint64_t index, std::uint64_t slot = 0) const;
};

} // namespace skewgraph

#endif
