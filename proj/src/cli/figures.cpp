#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "chirplock/errors.hpp"
#include "chirplock/wigner.hpp"
#include "commands.hpp"
#include "gnuplot.hpp"

namespace chirplock::cli {

namespace {

struct Check {
    std::string name;
    double value = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;

    [[nodiscard]] bool pass() const { return std::isfinite(value) && std::abs(value - expected) <= tolerance; }
};

class CheckList {
public:
    void add(std::string name, double value, double expected, double tolerance) {
        checks_.push_back({std::move(name), value, expected, tolerance});
    }

    int report(const Context& ctx, bool enabled) const {
        io::Json j = io::Json::array();
        bool ok = true;
        for (const auto& c : checks_) {
            j.push_back({{"name", c.name}, {"value", c.value}, {"expected", c.expected},
                         {"tolerance", c.tolerance}, {"pass", c.pass()}});
            if (enabled) {
                ctx.out() << fmt::format("{} {}: {:.4f} (expected {} +- {})\n", c.pass() ? "PASS" : "FAIL", c.name,
                                         c.value, c.expected, c.tolerance);
            }
            ok = ok && c.pass();
        }
        io::write_json(ctx.common.out / "checks.json", j);
        return enabled && !ok ? kExitCheck : 0;
    }

    static constexpr int kExitCheck = 4;

private:
    std::vector<Check> checks_;
};

// Level-population figures: ladder populations and fixed-frame Wigner snapshots
// at four slow times, ground state at tau = -8.
struct PopulationFigure {
    double p1, p2;
    std::vector<double> taus;
    int nc;                  // separator level for the stated capture probability
    double capture;          // stated capture probability at the last time
    double alpha_bar, beta_bar;
};

const PopulationFigure kPopulationFigures[] = {
    {0.8, 8.0, {0.0, 30.0, 60.0, 90.0}, 6, 0.48, 6.25e-7, 0.0042},
    {1.0, 1.0, {0.0, 8.0, 16.0, 24.0}, 10, 0.62, 1e-4, 0.0067},
    {1.9, 0.2, {0.0, 4.0, 8.0, 12.0}, 40, 0.66, 1e-4, 0.0013},
};

constexpr double kFigureTau0 = -8.0;

int population_figure(const Context& ctx, const FiguresOptions& o) {
    const auto& fig = kPopulationFigures[o.fig - 1];
    const auto d = DimensionlessParams::make(fig.p1, fig.p2);
    const auto settings = ctx.ladder_settings();
    const auto run = integrate(d, kFigureTau0, fig.taus.back(), fig.taus, settings);

    // The drive amplitude is taken from P1; beta from the stated rescaled value.
    FixedFrameScaling scaling{fig.alpha_bar, fig.beta_bar, 0.0, 2.0};
    scaling.eps_bar = fig.p1 * std::sqrt(2.0 * scaling.gamma * fig.alpha_bar);

    ctx.prepare({{"figure", o.fig},
                 {"params", io::to_json(d)},
                 {"tau0", kFigureTau0},
                 {"fixed_frame",
                  {{"alpha_bar", scaling.alpha_bar},
                   {"beta_bar", scaling.beta_bar},
                   {"eps_bar", scaling.eps_bar},
                   {"gamma", scaling.gamma}}}});
    const auto& dir = ctx.common.out;
    io::write_populations(dir / "populations.csv", run);
    io::write_text(dir / "populations.gp", gnuplot::populations("populations.csv", fig.taus));
    io::write_separatrix(dir / "separatrix.csv", wigner::separatrix(fig.beta_bar));

    CheckList checks;
    const double tau_last = fig.taus.back();
    const auto stated = capture_probability(run, fig.nc, tau_last);
    checks.add(fmt::format("fig{} capture P(n >= {}) at tau = {}", o.fig, fig.nc, tau_last), stated.probability,
               fig.capture, 0.05);
    const auto sep = separator_level(run, tau_last);
    if (o.fig == 1) {
        checks.add("fig1 population valley level at tau = 90", sep.level, 6.0, 1.0);
    }
    io::write_json(dir / "ladder.json", {{"basis_size", run.basis_size},
                                         {"diagnostics", io::to_json(run.diagnostics)},
                                         {"valley_level", sep.level},
                                         {"valley_fallback", sep.fallback},
                                         {"capture_level", fig.nc},
                                         {"capture_probability", stated.probability}});

    if (o.wigner) {
        wigner::FixedFrameConfig c;
        c.scaling = scaling;
        c.t0 = wigner::fixed_time(kFigureTau0, fig.alpha_bar);
        for (double t : fig.taus) c.output_times.push_back(wigner::fixed_time(t, fig.alpha_bar));
        const double half = 1.15 / std::sqrt(fig.beta_bar);
        const int points = static_cast<int>(std::ceil(2.0 * half / 0.25 / 16.0)) * 16;
        c.x = c.u = wigner::Axis::symmetric(half, points);
        c.dt = std::min(c.dt, 0.9 * wigner::fixed_step_bound(c));
        c.series_every = std::max(1, static_cast<int>((c.output_times.back() - c.t0) / c.dt / 200.0));
        const auto wr = wigner::evolve_fixed(c, wigner::initial_thermal(c));
        std::vector<std::string> stems;
        io::Json snaps = io::Json::array();
        for (std::size_t k = 0; k < wr.snapshots.size(); ++k) {
            const auto& f = wr.snapshots[k];
            stems.push_back(fmt::format("field_{:02d}", k));
            io::write_field(dir / stems.back(), f, fig.beta_bar);
            const auto cg = wigner::coarse_grain(f, std::sqrt(scaling.gamma));
            snaps.push_back(io::Json{{"tau", fig.taus[k]},
                             {"time", f.time},
                             {"negativity", cg.negativity_before},
                             {"coarse_negativity", cg.negativity_after}});
        }
        io::write_series(dir / "series.csv", wr.diagnostics);
        io::write_json(dir / "wigner.json", {{"diagnostics", io::to_json(wr.diagnostics)}, {"snapshots", snaps}});
        io::write_text(dir / "wigner.gp",
                       gnuplot::wigner_panels(stems, wr.snapshots, std::sqrt(fig.beta_bar), "separatrix.csv"));
        ctx.out() << fmt::format("fig{} Wigner: {} steps, normalization drift {:.3e}\n", o.fig,
                                 wr.diagnostics.steps, wr.diagnostics.max_norm_drift);
    }
    ctx.out() << fmt::format("fig{} ladder: P(n >= {}) = {:.4f} at tau = {}, valley at n = {}\n", o.fig, fig.nc,
                             stated.probability, tau_last, sep.level);
    return checks.report(ctx, o.check);
}

const SCurve* row(const std::vector<SCurve>& curves, double p2) {
    for (const auto& c : curves) {
        if (std::abs(c.p2 - p2) < 1e-12 * p2) return &c;
    }
    return nullptr;
}

int map_figure(const Context& ctx, const FiguresOptions& o) {
    MapOptions m;
    m.points = o.points;
    if (o.quick) {
        m.p2 = {0.2, 1.0, 8.0};
    } else {
        m.p2 = log_spaced(0.1, 10.0, o.p2_points);
        m.p2.push_back(0.2);
        m.p2.push_back(8.0);
        std::sort(m.p2.begin(), m.p2.end());
        m.p2.erase(std::unique(m.p2.begin(), m.p2.end(),
                               [](double a, double b) { return std::abs(a - b) < 1e-9 * b; }),
                   m.p2.end());
    }
    const auto curves = sweep_curves(ctx, m);
    CheckList checks;
    auto value = [&](double p2, bool threshold) {
        const auto* c = row(curves, p2);
        if (c == nullptr || !c->fitted) return std::nan("");
        return threshold ? c->threshold : c->width;
    };
    if (o.fig == 4) {
        write_threshold_table(ctx.common.out / "fig4_threshold.csv", curves);
        io::write_text(ctx.common.out / "fig4.gp", gnuplot::threshold_map("fig4_threshold.csv"));
        checks.add("fig4 P1cr at P2 = 8", value(8.0, true), 0.79, 0.08);
        checks.add("fig4 P1cr at P2 = 0.2", value(0.2, true), 1.83, 0.1);
    } else {
        write_width_table(ctx.common.out / "fig5_width.csv", curves);
        io::write_text(ctx.common.out / "fig5.gp", gnuplot::width_map("fig5_width.csv"));
        checks.add("fig5 width at P2 = 8", value(8.0, false), 0.66, 0.1);
        checks.add("fig5 width at P2 = 0.2", value(0.2, false), 0.61, 0.1);
    }
    for (const auto& c : curves) {
        ctx.out() << (c.fitted ? fmt::format("P2={:.4g}: P1cr = {:.4f}, width = {:.4f}\n", c.p2, c.threshold, c.width)
                               : fmt::format("P2={:.4g}: not fitted ({})\n", c.p2, c.fit_error));
    }
    return checks.report(ctx, o.check);
}

}  // namespace

int run_figures(const Context& ctx, const FiguresOptions& o) {
    if (o.fig < 1 || o.fig > 5) {
        throw ConfigError(fmt::format("--fig must be 1..5 (got {})", o.fig));
    }
    return o.fig <= 3 ? population_figure(ctx, o) : map_figure(ctx, o);
}

}  // namespace chirplock::cli
