#include "chirplock/params.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "chirplock/errors.hpp"

namespace chirplock {

namespace {

void require(bool ok, const char* field, const char* rule, double value) {
    if (!ok) {
        throw ConfigError(fmt::format("{} must be {} (got {})", field, rule, value));
    }
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }
bool finite_nonnegative(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void validate(const PhysicalParams& p) {
    require(finite_positive(p.mass), "mass", "positive", p.mass);
    require(finite_positive(p.omega0), "omega0", "positive", p.omega0);
    require(finite_positive(p.hbar), "hbar", "positive", p.hbar);
    require(finite_positive(p.chirp), "chirp", "positive", p.chirp);
    require(finite_positive(p.beta), "beta", "positive", p.beta);
    require(finite_nonnegative(p.drive), "drive", "non-negative", p.drive);
    require(finite_nonnegative(p.temperature), "temperature", "non-negative", p.temperature);
}

double coth(double x) {
    if (std::isinf(x)) {
        return 1.0;
    }
    // coth x = 1 + 2 / (e^{2x} - 1)
    return 1.0 + 2.0 / std::expm1(2.0 * x);
}

double effective_temperature_ratio(double thermal_ratio) {
    if (!(thermal_ratio >= 0.0)) {
        throw ConfigError(fmt::format("temperature must be non-negative (got {})", thermal_ratio));
    }
    if (thermal_ratio == 0.0) {
        return 0.5;
    }
    return 0.5 * coth(0.5 / thermal_ratio);
}

double effective_temperature(double hbar_omega0, double thermal_energy) {
    return hbar_omega0 * effective_temperature_ratio(thermal_energy / hbar_omega0);
}

DimensionlessParams DimensionlessParams::make(double p1, double p2, double thermal_ratio) {
    require(finite_nonnegative(p1), "P1", "non-negative", p1);
    require(finite_positive(p2), "P2", "positive", p2);
    require(finite_nonnegative(thermal_ratio), "thermal_ratio", "non-negative", thermal_ratio);

    DimensionlessParams d;
    d.p1_ = p1;
    d.p2_ = p2;
    d.thermal_ratio_ = thermal_ratio;
    d.mu_ = 0.5 * p1 * std::sqrt(p2);
    d.lambda_ = 0.5 * p2;
    const double teff = effective_temperature_ratio(thermal_ratio);
    d.gamma_ = 1.0 / teff;
    d.sigma2_ = d.lambda_ * teff;
    return d;
}

DimensionlessParams from_physical(const PhysicalParams& p) {
    validate(p);
    const double p1 = p.drive / std::sqrt(2.0 * p.mass * p.hbar * p.omega0 * p.chirp);
    const double p2 = 3.0 * p.hbar * p.beta / (4.0 * p.mass * std::sqrt(p.chirp));
    return DimensionlessParams::make(p1, p2, p.temperature / (p.hbar * p.omega0));
}

double classical_drive_param(const DimensionlessParams& d) { return d.mu(); }

DimensionlessParams dimensionless_from_fixed_frame(const FixedFrameScaling& s) {
    require(finite_positive(s.alpha_bar), "alpha_bar", "positive", s.alpha_bar);
    require(finite_positive(s.beta_bar), "beta_bar", "positive", s.beta_bar);
    require(finite_nonnegative(s.eps_bar), "eps_bar", "non-negative", s.eps_bar);
    require(s.gamma > 0.0 && s.gamma <= 2.0, "gamma", "in (0, 2]", s.gamma);
    const double p1 = s.eps_bar / std::sqrt(2.0 * s.gamma * s.alpha_bar);
    const double p2 = 3.0 * s.gamma * s.beta_bar / (4.0 * std::sqrt(s.alpha_bar));
    // gamma = 1 / (k_B T_eff / hbar w0) = 2 tanh(1 / 2 theta)
    double thermal_ratio = 0.0;
    if (s.gamma < 2.0) {
        thermal_ratio = 0.5 / std::atanh(0.5 * s.gamma);
    }
    return DimensionlessParams::make(p1, p2, thermal_ratio);
}

FixedFrameScaling fixed_frame_from_dimensionless(const DimensionlessParams& d, double alpha_bar) {
    require(finite_positive(alpha_bar), "alpha_bar", "positive", alpha_bar);
    FixedFrameScaling s;
    s.alpha_bar = alpha_bar;
    s.gamma = d.gamma();
    s.beta_bar = 4.0 * std::sqrt(alpha_bar) * d.p2() / (3.0 * s.gamma);
    s.eps_bar = d.p1() * std::sqrt(2.0 * s.gamma * alpha_bar);
    return s;
}

}  // namespace chirplock
