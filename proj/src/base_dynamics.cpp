#include "skewgraph/base_dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace skewgraph {

namespace {

// digit of the bi-infinite keyed string at absolute index i (may be negative)
int raw_digit(std::uint64_t key, std::int64_t i) {
    std::uint64_t u = (static_cast<std::uint64_t>(i) << 1) ^ static_cast<std::uint64_t>(i >> 63);
    return static_cast<int>(mix64(key, u) & 3u);
}

constexpr int kSampledDigits = 26;  // 52 bits: exactly representable in a double

double digits_to_unit(std::uint64_t key, std::int64_t first, std::int64_t stride) {
    double v = 0.0, w = 0.25;
    for (int k = 0; k < kSampledDigits; ++k) {
        v += w * raw_digit(key, first + stride * k);
        w *= 0.25;
    }
    return v;
}

} // namespace

BasePoint BasePoint::solenoid(std::vector<std::uint8_t> digits, double t0) {
    BasePoint p;
    p.kind = BaseKind::Solenoid;
    p.t = t0;
    p.digits = std::move(digits);
    return p;
}

double circle_step(double t) {
    double y = 4.0 * t;
    return y - std::floor(y);
}

BasePoint baker_step(const BasePoint& p) {
    double y = 4.0 * p.t;
    double d = std::floor(y);
    BasePoint q = p;
    q.t = y - d;
    q.s = (p.s + d) * 0.25;
    q.phase = p.phase + 1;
    if (p.kind == BaseKind::Solenoid && !p.digits.empty()) {
        q.digits.insert(q.digits.begin(), static_cast<std::uint8_t>(d));
        q.digits.pop_back();
    }
    return q;
}

BasePoint baker_inverse(const BasePoint& p) {
    double y = 4.0 * p.s;
    double d = std::floor(y);
    BasePoint q = p;
    q.t = (p.t + d) * 0.25;
    q.s = y - d;
    q.phase = p.phase - 1;
    if (p.kind == BaseKind::Solenoid)
        throw std::invalid_argument("solenoid points invert by dropping the leading digit");
    return q;
}

int backward_digit(const BasePoint& p, std::int64_t k) {
    if (p.kind == BaseKind::Solenoid) {
        if (k < 0 || k >= static_cast<std::int64_t>(p.digits.size()))
            throw std::invalid_argument("pre-orbit depth exceeds the recorded digits");
        return p.digits[static_cast<std::size_t>(k)];
    }
    if (p.key != 0) return raw_digit(p.key, p.phase - 1 - k);
    // key 0: the digits are exactly the base-4 expansion of the double s
    double s = p.s;
    int d = 0;
    for (std::int64_t j = 0; j <= k; ++j) {
        double y = 4.0 * s;
        d = static_cast<int>(y);
        s = y - d;
    }
    return d;
}

int forward_digit(const BasePoint& p, std::int64_t k) {
    if (p.key != 0) return raw_digit(p.key, p.phase + k);
    double t = p.t;
    int d = 0;
    for (std::int64_t j = 0; j <= k; ++j) {
        double y = 4.0 * t;
        d = static_cast<int>(y);
        t = y - d;
    }
    return d;
}

std::vector<double> preorbit(const BasePoint& p, int depth) {
    if (p.kind == BaseKind::Circle)
        throw std::invalid_argument("circle points have no canonical pre-orbit");
    if (p.kind == BaseKind::Solenoid && depth > static_cast<int>(p.digits.size()))
        throw std::invalid_argument("pre-orbit depth exceeds the recorded digits");
    std::vector<double> ts(static_cast<std::size_t>(depth) + 1);
    ts[0] = p.t;
    if (p.kind == BaseKind::Solenoid || p.key != 0) {
        for (int k = 0; k < depth; ++k)
            ts[k + 1] = (ts[k] + backward_digit(p, k)) * 0.25;
        return ts;
    }
    double s = p.s;
    for (int k = 0; k < depth; ++k) {
        double y = 4.0 * s;
        double d = std::floor(y);
        s = y - d;
        ts[k + 1] = (ts[k] + d) * 0.25;
    }
    return ts;
}

BasePoint baker_to_solenoid(const BasePoint& p, int depth) {
    BasePoint q;
    q.kind = BaseKind::Solenoid;
    q.t = p.t;
    q.key = p.key;
    q.phase = p.phase;
    q.digits.resize(static_cast<std::size_t>(depth));
    if (p.key != 0) {
        for (int k = 0; k < depth; ++k)
            q.digits[k] = static_cast<std::uint8_t>(backward_digit(p, k));
        return q;
    }
    double s = p.s;
    for (int k = 0; k < depth; ++k) {
        double y = 4.0 * s;
        double d = std::floor(y);
        q.digits[k] = static_cast<std::uint8_t>(d);
        s = y - d;
    }
    return q;
}

double solenoid_reconstruct_s(const BasePoint& p) {
    double s = 0.0;
    for (std::size_t i = p.digits.size(); i-- > 0;)
        s = (s + p.digits[i]) * 0.25;
    return s;
}

ForwardWalker::ForwardWalker(const BasePoint& start) : cur_(start) {
    if (start.key != 0) {
        window_ = 0;
        for (int k = 0; k < 32; ++k)
            window_ = (window_ << 2) | static_cast<std::uint64_t>(raw_digit(start.key, start.phase + k));
        next_idx_ = start.phase + 32;
    } else {
        window_ = static_cast<std::uint64_t>(start.t * 0x1.0p64);
        next_idx_ = start.phase + 32;
    }
    cur_.t = static_cast<double>(window_) * 0x1.0p-64;
}

void ForwardWalker::step() {
    int d = static_cast<int>(window_ >> 62);
    cur_.s = (cur_.s + d) * 0.25;
    std::uint64_t in = cur_.key != 0 ? static_cast<std::uint64_t>(raw_digit(cur_.key, next_idx_)) : 0u;
    window_ = (window_ << 2) | in;
    ++next_idx_;
    cur_.phase += 1;
    cur_.t = static_cast<double>(window_) * 0x1.0p-64;
    if (cur_.kind == BaseKind::Solenoid && !cur_.digits.empty()) {
        cur_.digits.insert(cur_.digits.begin(), static_cast<std::uint8_t>(d));
        cur_.digits.pop_back();
    }
}

std::uint64_t BaseMeasureSampler::sample_key(std::uint64_t index) const {
    return mix64(mix64(seed, 0x5157EA6B ^ stream), index) | 1u;  // never 0
}

BasePoint BaseMeasureSampler::sample(BaseKind kind, std::uint64_t index, int solenoid_depth) const {
    std::uint64_t key = sample_key(index);
    BasePoint p;
    p.kind = kind;
    p.key = key;
    p.phase = 0;
    p.t = digits_to_unit(key, 0, 1);
    if (kind == BaseKind::Circle) return p;
    if (kind == BaseKind::Baker) {
        p.s = digits_to_unit(key, -1, -1);
        return p;
    }
    p.digits.resize(static_cast<std::size_t>(solenoid_depth));
    for (int k = 0; k < solenoid_depth; ++k)
        p.digits[k] = static_cast<std::uint8_t>(raw_digit(key, -1 - k));
    return p;
}

BasePoint BaseMeasureSampler::sample_special(std::uint64_t index) const {
    // every pre-orbit branch is 0, so the whole pre-orbit falls into [0, 1/4)
    std::uint64_t key = sample_key(index ^ 0x0B0E5ULL);
    BasePoint p;
    p.kind = BaseKind::Baker;
    p.key = 0;
    p.t = digits_to_unit(key, 0, 1);
    p.s = 0.0;
    return p;
}

std::vector<BasePoint> BaseMeasureSampler::sample_many(BaseKind kind, std::size_t count,
                                                       int solenoid_depth) const {
    std::vector<BasePoint> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(sample(kind, i, solenoid_depth));
    return out;
}

double BaseMeasureSampler::uniform(std::uint64_t index, std::uint64_t slot) const {
    return u01(mix64(sample_key(index), 0xD1CEu + slot));
}

} // namespace skewgraph
