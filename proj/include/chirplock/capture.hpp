#pragma once

// Capture probability, S-curves P(P1) at fixed P2, and their threshold/width.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chirplock/ladder.hpp"

namespace chirplock {

struct SeparatorPolicy {
    enum class Mode { Valley, Fixed };
    Mode mode = Mode::Valley;
    int fixed_level = 5;
};

struct SeparatorResult {
    int level = 1;
    bool fallback = false;       // no resolvable valley; round(tau / 2 P2) used
    bool no_separation = false;  // population above level 1 below 1e-3
    double valley_population = 0.0;
};

struct CaptureResult {
    double p2 = 0.0;
    double p1 = 0.0;
    int separator = 1;
    double probability = 0.0;
    double tau_measure = 0.0;
    double valley_depth = 0.0;  // smoothed population at the separator level
    bool separator_fallback = false;
    double max_norm_drift = 0.0;  // of the ladder run behind this result
};

struct SimSettings {
    double tau0 = -10.0;
    // Unset selects default_tau_measure(P2).
    std::optional<double> tau_measure;
    LadderSettings ladder;
    SeparatorPolicy separator;
    int workers = 1;
};

// max(12, 10 P2 + 10): far enough past the first resonance tau = P2 that the
// resonant and nonresonant groups have separated.
double default_tau_measure(double p2);

// Populations smoothed by a 3-point moving average (end points use 2 points).
std::vector<double> smooth_populations(std::span<const double> populations);

// Level of the population valley between the nonresonant group (below half the
// resonant level tau/P2) and the resonant group (above it).
SeparatorResult separator_level(const AmplitudeState& state, double p2);
SeparatorResult separator_level(const LadderRun& run, double tau_measure);

// P = sum_{n >= n_c} |B_n(tau_measure)|^2
CaptureResult capture_probability(const LadderRun& run, int separator, double tau_measure);

// Integrates one ladder run and measures its capture probability.
CaptureResult simulate_capture(const DimensionlessParams& params, const SimSettings& settings);

struct CurveSample {
    double p1 = 0.0;
    double probability = 0.0;
    int separator = 0;
    double max_norm_drift = 0.0;
    bool ok = true;
    std::string error;
};

struct SCurve {
    double p2 = 0.0;
    std::vector<CurveSample> samples;  // sorted by P1
    double threshold = 0.0;            // P1cr, P(P1cr) = 1/2
    double width = 0.0;                // 1 / (dP/dP1) at P1cr
    double threshold_error = 0.0;      // half the grid spacing around P1cr
    double width_error = 0.0;          // leave-one-knot-out spread of the width
    double slope = 0.0;
    bool fitted = false;    // false when the samples do not bracket P = 1/2
    std::string fit_error;
};

struct ThresholdWidth {
    double threshold = 0.0;
    double width = 0.0;
    double threshold_error = 0.0;
    double width_error = 0.0;
    double slope = 0.0;
};

// Threshold and width from (P1, P) samples: isotonic fit, monotone cubic
// interpolant, root of P = 1/2 and the interpolant's analytic slope there.
ThresholdWidth threshold_and_width(std::span<const double> p1, std::span<const double> probability);
ThresholdWidth threshold_and_width(const SCurve& curve);

// Runs one ladder integration per grid point (in parallel) and fits the curve.
// Points whose integration fails are kept with ok = false and left out of the fit.
SCurve scan_s_curve(double p2, std::span<const double> p1_grid, const SimSettings& settings);

// Several curves through one work queue. A curve whose samples do not bracket
// P = 1/2 comes back with fitted = false instead of throwing.
std::vector<SCurve> scan_s_curves(std::span<const double> p2_values,
                                  const std::vector<std::vector<double>>& p1_grids,
                                  const SimSettings& settings);

// Evenly spaced P1 grid centred on the analytic threshold guess for P2.
std::vector<double> default_p1_grid(double p2, int points = 15, double half_span = 0.7);

// max(LC threshold, classical threshold) as a starting guess for scans.
double threshold_guess(double p2);

}  // namespace chirplock
