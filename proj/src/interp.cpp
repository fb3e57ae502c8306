#include "chirplock/interp.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "chirplock/errors.hpp"

namespace chirplock {

MonotoneCubic::MonotoneCubic(std::span<const double> x, std::span<const double> y)
    : x_(x.begin(), x.end()), y_(y.begin(), y.end()) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) {
        throw ConfigError("interpolant needs at least two (x, y) pairs of equal length");
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(x_[i + 1] > x_[i])) {
            throw ConfigError("interpolant abscissae must be strictly increasing");
        }
        if (y_[i + 1] < y_[i]) {
            throw ConfigError("interpolant ordinates must be non-decreasing");
        }
    }
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
        d_[0] = d_[1] = delta[0];
        return;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        d_[i] = (h[i - 1] * delta[i] + h[i] * delta[i - 1]) / (h[i - 1] + h[i]);
    }
    d_[0] = ((2.0 * h[0] + h[1]) * delta[0] - h[0] * delta[1]) / (h[0] + h[1]);
    d_[n - 1] = ((2.0 * h[n - 2] + h[n - 3]) * delta[n - 2] - h[n - 2] * delta[n - 3]) /
                (h[n - 2] + h[n - 3]);

    for (std::size_t i = 0; i < n; ++i) {
        double bound;
        if (i == 0) {
            bound = 3.0 * delta[0];
        } else if (i + 1 == n) {
            bound = 3.0 * delta[n - 2];
        } else {
            bound = 3.0 * std::min(delta[i - 1], delta[i]);
        }
        d_[i] = std::clamp(d_[i], 0.0, bound);
    }
}

std::size_t MonotoneCubic::segment(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    if (it == x_.begin()) {
        return 0;
    }
    const auto i = static_cast<std::size_t>(it - x_.begin()) - 1;
    return std::min(i, x_.size() - 2);
}

double MonotoneCubic::value(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * y_[i] + (t3 - 2 * t2 + t) * h * d_[i] +
           (-2 * t3 + 3 * t2) * y_[i + 1] + (t3 - t2) * h * d_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
    if (x < x_.front() || x > x_.back()) return 0.0;
    const std::size_t i = segment(x);
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t;
    return ((6 * t2 - 6 * t) * y_[i] + (6 * t - 6 * t2) * y_[i + 1]) / h +
           (3 * t2 - 4 * t + 1) * d_[i] + (3 * t2 - 2 * t) * d_[i + 1];
}

double MonotoneCubic::solve(double level) const {
    if (!(y_.front() <= level && level <= y_.back())) {
        throw BracketMiss(fmt::format("level {} outside sampled range [{}, {}]", level, y_.front(),
                                      y_.back()));
    }
    std::size_t i = 0;
    while (i + 2 < x_.size() && y_[i + 1] < level) {
        ++i;
    }
    double lo = x_[i];
    double hi = x_[i + 1];
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (value(mid) < level) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> isotonic_fit(std::span<const double> y) {
    struct Block {
        double sum;
        std::size_t count;
        [[nodiscard]] double mean() const { return sum / static_cast<double>(count); }
    };
    std::vector<Block> blocks;
    for (double v : y) {
        blocks.push_back({v, 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
            auto last = blocks.back();
            blocks.pop_back();
            blocks.back().sum += last.sum;
            blocks.back().count += last.count;
        }
    }
    std::vector<double> out;
    out.reserve(y.size());
    for (const auto& b : blocks) {
        out.insert(out.end(), b.count, b.mean());
    }
    return out;
}

}  // namespace chirplock
