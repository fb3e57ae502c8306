#include "chirplock/capture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "chirplock/analytic.hpp"
#include "chirplock/errors.hpp"
#include "chirplock/interp.hpp"
#include "chirplock/parallel.hpp"

namespace chirplock {

double default_tau_measure(double p2) { return std::max(12.0, 10.0 * p2 + 10.0); }

std::vector<double> smooth_populations(std::span<const double> pop) {
    const std::size_t n = pop.size();
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = std::min(n - 1, i + 1);
        double acc = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) {
            acc += pop[j];
        }
        s[i] = acc / static_cast<double>(hi - lo + 1);
    }
    return s;
}

SeparatorResult separator_level(const AmplitudeState& state, double p2) {
    const auto pop = state.populations();
    const int n = static_cast<int>(pop.size());
    const int resonant = resonant_level(state.tau, p2);

    SeparatorResult out;
    out.level = std::clamp(static_cast<int>(std::lround(0.5 * std::max(state.tau, 0.0) / p2)), 1,
                           std::max(1, n - 1));

    const double excited = std::accumulate(pop.begin() + std::min(n, 2), pop.end(), 0.0);
    if (excited < 1e-3) {
        out.fallback = true;
        out.no_separation = true;
        return out;
    }

    const auto s = smooth_populations(pop);
    const int split = resonant / 2;
    if (resonant < 2 || split + 1 >= n) {
        out.fallback = true;
        return out;
    }
    auto is_peak = [&](int i) {
        const double left = i > 0 ? s[static_cast<std::size_t>(i - 1)] : -1.0;
        const double right = i + 1 < n ? s[static_cast<std::size_t>(i + 1)] : -1.0;
        const double v = s[static_cast<std::size_t>(i)];
        return v >= left && v >= right && v > 0.0;
    };
    int low_peak = -1;
    int high_peak = -1;
    for (int i = 0; i < n; ++i) {
        if (!is_peak(i)) continue;
        const double v = s[static_cast<std::size_t>(i)];
        if (i <= split) {
            if (low_peak < 0 || v > s[static_cast<std::size_t>(low_peak)]) low_peak = i;
        } else {
            if (high_peak < 0 || v > s[static_cast<std::size_t>(high_peak)]) high_peak = i;
        }
    }
    if (low_peak < 0 || high_peak < 0 || high_peak - low_peak < 2) {
        out.fallback = true;
        return out;
    }
    int valley = low_peak + 1;
    for (int i = low_peak + 1; i < high_peak; ++i) {
        if (s[static_cast<std::size_t>(i)] < s[static_cast<std::size_t>(valley)]) valley = i;
    }
    const double floor =
        std::min(s[static_cast<std::size_t>(low_peak)], s[static_cast<std::size_t>(high_peak)]);
    const double vv = s[static_cast<std::size_t>(valley)];
    if (!(vv < 0.5 * floor)) {
        out.fallback = true;
        out.valley_population = s[static_cast<std::size_t>(out.level)];
        return out;
    }
    out.level = std::max(1, valley);
    out.valley_population = vv;
    return out;
}

SeparatorResult separator_level(const LadderRun& run, double tau_measure) {
    return separator_level(run.at(tau_measure), run.params.p2());
}

CaptureResult capture_probability(const LadderRun& run, int separator, double tau_measure) {
    const auto& state = run.at(tau_measure);
    if (separator < 1 || separator >= state.size()) {
        throw ConfigError(fmt::format("separator level {} outside [1, {})", separator, state.size()));
    }
    const auto pop = state.populations();
    const auto smooth = smooth_populations(pop);
    CaptureResult r;
    r.p1 = run.params.p1();
    r.p2 = run.params.p2();
    r.separator = separator;
    r.tau_measure = tau_measure;
    r.probability = std::accumulate(pop.begin() + separator, pop.end(), 0.0);
    r.probability = std::clamp(r.probability, 0.0, 1.0);
    r.valley_depth = smooth[static_cast<std::size_t>(separator)];
    return r;
}

CaptureResult simulate_capture(const DimensionlessParams& params, const SimSettings& settings) {
    const double tau_m = settings.tau_measure.value_or(default_tau_measure(params.p2()));
    const double times[] = {tau_m};
    const auto run = integrate(params, settings.tau0, tau_m, times, settings.ladder);
    int nc;
    bool fallback = false;
    if (settings.separator.mode == SeparatorPolicy::Mode::Fixed) {
        nc = settings.separator.fixed_level;
    } else {
        const auto sep = separator_level(run, tau_m);
        nc = sep.level;
        fallback = sep.fallback;
    }
    auto r = capture_probability(run, nc, tau_m);
    r.separator_fallback = fallback;
    r.max_norm_drift = run.diagnostics.max_norm_drift;
    return r;
}

ThresholdWidth threshold_and_width(std::span<const double> p1, std::span<const double> probability) {
    if (p1.size() != probability.size()) {
        throw ConfigError("P1 and probability samples differ in length");
    }
    if (p1.size() < 2) {
        throw BracketMiss(fmt::format("{} sample(s) cannot bracket P = 1/2", p1.size()));
    }
    const auto fit = isotonic_fit(probability);
    if (fit.front() > 0.5 || fit.back() < 0.5) {
        throw BracketMiss(fmt::format("samples span P in [{:.3f}, {:.3f}], not bracketing 1/2",
                                      fit.front(), fit.back()));
    }
    const MonotoneCubic curve(p1, fit);

    ThresholdWidth tw;
    tw.threshold = curve.solve(0.5);
    tw.slope = curve.derivative(tw.threshold);
    tw.width = tw.slope > 0.0 ? 1.0 / tw.slope : std::numeric_limits<double>::infinity();
    const std::size_t seg = curve.segment(tw.threshold);
    tw.threshold_error = 0.5 * (p1[seg + 1] - p1[seg]);

    // Leave-one-knot-out spread of the width.
    double spread = 0.0;
    if (p1.size() >= 5) {
        for (std::size_t skip = 1; skip + 1 < p1.size(); ++skip) {
            std::vector<double> xs, ys;
            for (std::size_t i = 0; i < p1.size(); ++i) {
                if (i == skip) continue;
                xs.push_back(p1[i]);
                ys.push_back(fit[i]);
            }
            const MonotoneCubic reduced(xs, ys);
            const double x0 = reduced.solve(0.5);
            const double d = reduced.derivative(x0);
            if (d > 0.0) {
                spread = std::max(spread, std::abs(1.0 / d - tw.width));
            }
        }
    }
    tw.width_error = spread;
    return tw;
}

ThresholdWidth threshold_and_width(const SCurve& curve) {
    std::vector<double> xs, ys;
    for (const auto& s : curve.samples) {
        if (!s.ok) continue;
        xs.push_back(s.p1);
        ys.push_back(s.probability);
    }
    return threshold_and_width(xs, ys);
}

namespace {

std::vector<double> sorted_grid(std::span<const double> p1_grid) {
    std::vector<double> grid(p1_grid.begin(), p1_grid.end());
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

void run_sample(CurveSample& s, double p2, const SimSettings& settings) {
    try {
        const auto d = DimensionlessParams::make(s.p1, p2);
        const auto r = simulate_capture(d, settings);
        s.probability = r.probability;
        s.separator = r.separator;
        s.max_norm_drift = r.max_norm_drift;
    } catch (const Error& e) {
        s.ok = false;
        s.error = e.what();
    }
}

void apply_fit(SCurve& curve, const ThresholdWidth& tw) {
    curve.threshold = tw.threshold;
    curve.width = tw.width;
    curve.threshold_error = tw.threshold_error;
    curve.width_error = tw.width_error;
    curve.slope = tw.slope;
    curve.fitted = true;
}

}  // namespace

SCurve scan_s_curve(double p2, std::span<const double> p1_grid, const SimSettings& settings) {
    const double p2s[] = {p2};
    std::vector<std::vector<double>> grids{std::vector<double>(p1_grid.begin(), p1_grid.end())};
    auto curves = scan_s_curves(p2s, grids, settings);
    if (!curves.front().fitted) {
        throw BracketMiss(curves.front().fit_error);
    }
    return std::move(curves.front());
}

std::vector<SCurve> scan_s_curves(std::span<const double> p2_values,
                                  const std::vector<std::vector<double>>& p1_grids,
                                  const SimSettings& settings) {
    if (p2_values.size() != p1_grids.size()) {
        throw ConfigError("one P1 grid is needed per P2 value");
    }
    std::vector<SCurve> curves(p2_values.size());
    std::vector<std::pair<std::size_t, std::size_t>> jobs;
    for (std::size_t c = 0; c < curves.size(); ++c) {
        if (!(p2_values[c] > 0.0)) {
            throw ConfigError(fmt::format("P2 must be positive (got {})", p2_values[c]));
        }
        curves[c].p2 = p2_values[c];
        const auto grid = sorted_grid(p1_grids[c]);
        curves[c].samples.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            curves[c].samples[i].p1 = grid[i];
            jobs.emplace_back(c, i);
        }
    }
    run_indexed(jobs.size(), settings.workers, [&](std::size_t j) {
        const auto [c, i] = jobs[j];
        run_sample(curves[c].samples[i], curves[c].p2, settings);
    });
    for (auto& curve : curves) {
        try {
            apply_fit(curve, threshold_and_width(curve));
        } catch (const BracketMiss& e) {
            curve.fitted = false;
            curve.fit_error = e.what();
        }
    }
    return curves;
}

double threshold_guess(double p2) {
    return std::max(analytic::lc_threshold(), analytic::classical_threshold(p2));
}

std::vector<double> default_p1_grid(double p2, int points, double half_span) {
    if (points < 2) {
        throw ConfigError("P1 grid needs at least 2 points");
    }
    const double c = threshold_guess(p2);
    const double lo = std::max(0.05, c - half_span);
    const double hi = c + half_span;
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
    }
    return g;
}

}  // namespace chirplock
