#pragma once

// Closed-form phase-locking models: successive Landau-Zener steps on the
// energy ladder (quantum limit) and classical autoresonance (classical limit).

#include "chirplock/params.hpp"

namespace chirplock::analytic {

inline constexpr int kDefaultProductTerms = 5;
inline constexpr double kClassicalThresholdCoefficient = 0.82;  // P1cr sqrt(P2)
inline constexpr double kClassicalCriticalDrive = 1.34;         // eps_cr / (alpha^3/4 beta^-1/2 m w0^1/2)
inline constexpr double kClassicalWidthCoefficient = 1.23;

// r = exp(-pi P1^2 / 2)
double lz_ratio(double p1);

// Probability of the n-1 -> n transition: 1 - r^n.
double lz_step_probability(double p1, int n);

// prod_{k=1}^{N} (1 - r^k)
double lc_capture_probability(double p1, int terms = kDefaultProductTerms);

// d/dP1 of lc_capture_probability, via logarithmic differentiation.
double lc_capture_slope(double p1, int terms = kDefaultProductTerms);

// P1 with lc_capture_probability(P1, N) = 1/2.
double lc_threshold(int terms = kDefaultProductTerms);

// Inverse slope of the capture product at its threshold.
double lc_width(int terms = kDefaultProductTerms);

// 0.82 / sqrt(P2)
double classical_threshold(double p2);

// eps_cr = 1.34 alpha^{3/4} beta^{-1/2} m w0^{1/2} converted to P1 and multiplied by
// sqrt(P2); should reproduce kClassicalThresholdCoefficient.
double classical_threshold_coefficient(const PhysicalParams& p);

// 1.23 sqrt(k_B T_eff / 2 hbar w0) with thermal_ratio = k_B T / hbar w0.
double classical_width(double thermal_ratio);
double classical_width(const PhysicalParams& p);

enum class Regime { AutoResonance, LadderClimbing };

// P2 < P1 + 1 is classical autoresonance, otherwise ladder climbing.
Regime classify(double p1, double p2);

}  // namespace chirplock::analytic
