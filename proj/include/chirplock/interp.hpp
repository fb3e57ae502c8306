#pragma once

#include <span>
#include <vector>

namespace chirplock {

// Shape-preserving piecewise cubic Hermite interpolant for non-decreasing data.
// Knot slopes are three-point parabolic estimates limited to 3x the adjacent
// secant slopes, which keeps every segment monotone.
class MonotoneCubic {
public:
    MonotoneCubic(std::span<const double> x, std::span<const double> y);

    [[nodiscard]] double value(double x) const;
    [[nodiscard]] double derivative(double x) const;
    // Smallest x with value(x) == level; throws BracketMiss when outside the range.
    [[nodiscard]] double solve(double level) const;
    // Index of the knot interval containing x.
    [[nodiscard]] std::size_t segment(double x) const;

    [[nodiscard]] const std::vector<double>& knots() const noexcept { return x_; }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> d_;
};

// Least-squares non-decreasing fit (pool adjacent violators, unit weights).
std::vector<double> isotonic_fit(std::span<const double> y);

}  // namespace chirplock
