#include "chirplock/analytic.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "chirplock/errors.hpp"

namespace chirplock::analytic {

namespace {

void check_terms(int terms) {
    if (terms < 1) {
        throw ConfigError(fmt::format("number of product terms must be >= 1 (got {})", terms));
    }
}

void check_p1(double p1) {
    if (!(p1 >= 0.0)) {
        throw ConfigError(fmt::format("P1 must be non-negative (got {})", p1));
    }
}

// Bisection to a narrow bracket followed by secant polishing of the monotone
// increasing function f on [lo, hi] with f(lo) < 0 < f(hi).
template <class F>
double solve_increasing(F&& f, double lo, double hi, double tol) {
    double flo = f(lo);
    double fhi = f(hi);
    while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (fm < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    double x = lo - flo * (hi - lo) / (fhi - flo);
    for (int it = 0; it < 60; ++it) {
        const double fx = f(x);
        if (fx < 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        if (hi - lo < tol || fx == 0.0) {
            break;
        }
        double next = x - fx * (hi - lo) / (fhi - flo);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (std::abs(next - x) < 0.25 * tol) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

}  // namespace

double lz_ratio(double p1) { return std::exp(-0.5 * std::numbers::pi * p1 * p1); }

double lz_step_probability(double p1, int n) {
    check_p1(p1);
    if (n < 1) {
        throw ConfigError(fmt::format("transition index must be >= 1 (got {})", n));
    }
    // 1 - r^n = -expm1(n ln r)
    return -std::expm1(-0.5 * std::numbers::pi * p1 * p1 * n);
}

double lc_capture_probability(double p1, int terms) {
    check_terms(terms);
    double p = 1.0;
    for (int k = 1; k <= terms; ++k) {
        p *= lz_step_probability(p1, k);
    }
    return p;
}

double lc_capture_slope(double p1, int terms) {
    check_terms(terms);
    check_p1(p1);
    if (p1 == 0.0) {
        return 0.0;
    }
    // d ln P / dP1 = sum_k pi P1 k r^k / (1 - r^k)
    const double a = 0.5 * std::numbers::pi * p1 * p1;
    double dlog = 0.0;
    for (int k = 1; k <= terms; ++k) {
        const double one_minus = -std::expm1(-a * k);
        dlog += std::numbers::pi * p1 * k * std::exp(-a * k) / one_minus;
    }
    return lc_capture_probability(p1, terms) * dlog;
}

double lc_threshold(int terms) {
    check_terms(terms);
    return solve_increasing([terms](double p1) { return lc_capture_probability(p1, terms) - 0.5; },
                            0.0, 10.0, 1e-12);
}

double lc_width(int terms) { return 1.0 / lc_capture_slope(lc_threshold(terms), terms); }

double classical_threshold(double p2) {
    if (!(p2 > 0.0)) {
        throw ConfigError(fmt::format("P2 must be positive (got {})", p2));
    }
    return kClassicalThresholdCoefficient / std::sqrt(p2);
}

double classical_threshold_coefficient(const PhysicalParams& p) {
    PhysicalParams at_threshold = p;
    at_threshold.drive = kClassicalCriticalDrive * std::pow(p.chirp, 0.75) / std::sqrt(p.beta) *
                         p.mass * std::sqrt(p.omega0);
    const auto d = from_physical(at_threshold);
    return d.p1() * std::sqrt(d.p2());
}

double classical_width(double thermal_ratio) {
    return kClassicalWidthCoefficient * std::sqrt(0.5 * effective_temperature_ratio(thermal_ratio));
}

double classical_width(const PhysicalParams& p) {
    validate(p);
    return classical_width(p.temperature / (p.hbar * p.omega0));
}

Regime classify(double p1, double p2) {
    return p2 < p1 + 1.0 ? Regime::AutoResonance : Regime::LadderClimbing;
}

}  // namespace chirplock::analytic
