#include <cmath>

#include <fmt/format.h>

#include "chirplock/errors.hpp"
#include "chirplock/wigner.hpp"
#include "commands.hpp"
#include "gnuplot.hpp"

namespace chirplock::cli {

using namespace wigner;

namespace {

double thermal_ratio_from_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma <= 2.0)) {
        throw ConfigError(fmt::format("--gamma must lie in (0, 2] (got {})", gamma));
    }
    return gamma < 2.0 ? 0.5 / std::atanh(0.5 * gamma) : 0.0;
}

// Even point count, a multiple of 16, with spacing at most `spacing`.
int points_for(double half_width, double spacing) {
    const int n = static_cast<int>(std::ceil(2.0 * half_width / spacing / 16.0)) * 16;
    return std::max(n, 32);
}

int series_interval(double span, double dt) {
    const double steps = span / dt;
    return std::max(1, static_cast<int>(steps / 200.0));
}

struct Outputs {
    std::vector<std::string> stems;
    io::Json snapshots = io::Json::array();
};

io::Json snapshot_entry(const PhaseSpaceField& f, double cell) {
    const auto cg = coarse_grain(f, cell);
    return io::Json{{"time", f.time},
                    {"integral", f.integral()},
                    {"negativity", cg.negativity_before},
                    {"coarse_cell", cell},
                    {"coarse_block", cg.block},
                    {"coarse_negativity", cg.negativity_after}};
}

int run_fixed(const Context& ctx, const WignerOptions& o) {
    FixedFrameConfig c;
    if (o.beta_bar || o.eps_bar) {
        if (o.p1 || o.p2) {
            throw ConfigError("give either --p1/--p2 or --beta-bar/--eps-bar, not both");
        }
        c.scaling = {o.alpha_bar, o.beta_bar.value_or(0.0), o.eps_bar.value_or(0.0), o.gamma};
    } else if (o.p1 && o.p2) {
        const auto d = DimensionlessParams::make(*o.p1, *o.p2, thermal_ratio_from_gamma(o.gamma));
        c.scaling = fixed_frame_from_dimensionless(d, o.alpha_bar);
    } else {
        throw ConfigError("fixed frame needs --p1 and --p2 (with --alpha-bar) or --beta-bar/--eps-bar");
    }
    thermal_ratio_from_gamma(c.scaling.gamma);

    std::vector<double> taus;
    if (!o.times.empty()) {
        if (!o.taus.empty()) throw ConfigError("give either --times or --taus, not both");
        c.t0 = 0.0;
        c.output_times = o.times;
    } else {
        if (o.taus.empty()) throw ConfigError("no output times: give --taus (or --times)");
        c.t0 = fixed_time(o.tau0, c.scaling.alpha_bar);
        for (double t : o.taus) c.output_times.push_back(fixed_time(t, c.scaling.alpha_bar));
        taus = o.taus;
    }
    const double beta = c.scaling.beta_bar;
    const double half = o.half_width > 0.0 ? o.half_width : (beta > 0.0 ? 1.15 / std::sqrt(beta) : 12.0);
    const int points = o.points > 0 ? o.points : points_for(half, 0.25);
    c.x = c.u = Axis::symmetric(half, points);
    if (o.order > 0) c.splitting_order = o.order;
    if (o.sponge_fraction >= 0.0) c.sponge_fraction = o.sponge_fraction;
    if (o.sponge_rate >= 0.0) c.sponge_rate = o.sponge_rate;
    c.x_offset = o.x_offset;
    c.u_offset = o.p_offset;
    c.dt = o.dt > 0.0 ? o.dt : std::min(c.dt, 0.9 * fixed_step_bound(c));
    double t_end = c.t0;
    for (double t : c.output_times) t_end = std::max(t_end, t);
    c.series_every = o.series_every > 0 ? o.series_every : series_interval(t_end - c.t0, c.dt);

    const auto f0 = initial_thermal(c);
    const auto run = evolve_fixed(c, f0);

    io::Json extra{{"frame", "fixed"},
                   {"scaling",
                    {{"alpha_bar", c.scaling.alpha_bar},
                     {"beta_bar", c.scaling.beta_bar},
                     {"eps_bar", c.scaling.eps_bar},
                     {"gamma", c.scaling.gamma}}},
                   {"grid", {{"x", io::to_json(c.x)}, {"u", io::to_json(c.u)}}},
                   {"dt", c.dt},
                   {"splitting_order", c.splitting_order}};
    if (c.scaling.alpha_bar > 0.0 && beta > 0.0) {
        extra["dimensionless"] = io::to_json(dimensionless_from_fixed_frame(c.scaling));
    }
    ctx.prepare(extra);
    const auto& dir = ctx.common.out;

    const double cell = o.cell.value_or(std::sqrt(c.scaling.gamma));
    Outputs out;
    std::optional<Eigenstates> states;
    std::optional<io::CsvWriter> pops;
    if (o.project > 0) {
        states = quartic_eigenstates(c.x, beta, c.scaling.gamma, o.project);
        pops.emplace(dir / "projections.csv", std::vector<std::string>{"time", "n", "population"});
    }
    const bool harmonic = beta == 0.0 && c.scaling.eps_bar == 0.0;
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
        const auto& f = run.snapshots[k];
        const auto stem = fmt::format("field_{:02d}", k);
        io::write_field(dir / stem, f, beta);
        out.stems.push_back(stem);
        auto entry = snapshot_entry(f, cell);
        if (k < taus.size()) entry["tau"] = taus[k];
        if (states) {
            const auto p = project_populations(f, *states, c.scaling.gamma);
            for (std::size_t n = 0; n < p.size(); ++n) {
                *pops << f.time << static_cast<int>(n) << p[n];
                pops->end_row();
            }
        }
        if (harmonic) {
            const auto ref = rotate(f0, f.time - c.t0);
            double sup = 0.0;
            for (std::size_t i = 0; i < f.values.size(); ++i) sup = std::max(sup, std::abs(f.values[i] - ref.values[i]));
            entry["rotation_match_sup"] = sup;
            ctx.out() << fmt::format("rotation match at t = {}: sup |f - rotated f0| = {:.3e}\n", f.time, sup);
        }
        out.snapshots.push_back(entry);
    }
    std::string sep_csv;
    if (beta > 0.0) {
        sep_csv = "separatrix.csv";
        io::write_separatrix(dir / sep_csv, separatrix(beta));
    }
    io::write_series(dir / "series.csv", run.diagnostics);
    io::write_json(dir / "summary.json", {{"diagnostics", io::to_json(run.diagnostics)}, {"snapshots", out.snapshots}});
    io::write_text(dir / "wigner.gp",
                   gnuplot::wigner_panels(out.stems, run.snapshots, beta > 0.0 ? std::sqrt(beta) : 1.0, sep_csv));
    ctx.out() << fmt::format("fixed frame: {} steps of {:.4g}, normalization drift {:.3e}, absorbed {:.3e}\n",
                             run.diagnostics.steps, c.dt, run.diagnostics.max_norm_drift, run.diagnostics.absorbed_mass);
    return 0;
}

int run_rotating(const Context& ctx, const WignerOptions& o) {
    if (o.beta_bar || o.eps_bar) {
        throw ConfigError("--beta-bar/--eps-bar apply to the fixed frame; the rotating frame takes --p1/--p2");
    }
    if (!o.p1 || !o.p2) {
        throw ConfigError("rotating frame needs --p1 and --p2");
    }
    if (o.taus.empty()) {
        throw ConfigError("no output times: give --taus");
    }
    const auto d = DimensionlessParams::make(*o.p1, *o.p2, thermal_ratio_from_gamma(o.gamma));
    auto c = RotatingFrameConfig::from_params(d, o.tau0, o.taus);
    if (o.half_width > 0.0 || o.points > 0) {
        const double half = o.half_width > 0.0 ? o.half_width : c.q.max;
        const int points = o.points > 0 ? o.points : c.q.points;
        c.q = c.p = Axis::symmetric(half, points);
    }
    if (o.order > 0) c.splitting_order = o.order;
    if (o.sponge_fraction >= 0.0) c.sponge_fraction = o.sponge_fraction;
    if (o.sponge_rate >= 0.0) c.sponge_rate = o.sponge_rate;
    c.q_offset = o.x_offset;
    c.p_offset = o.p_offset;
    c.dt = o.dt;
    const double dt = c.dt > 0.0 ? c.dt : 0.5 * rotating_step_bound(c);
    double tau_end = c.tau0;
    for (double t : c.output_taus) tau_end = std::max(tau_end, t);
    c.series_every = o.series_every > 0 ? o.series_every : series_interval(tau_end - c.tau0, dt);

    const auto run = evolve_rotating(c, initial_thermal(c));
    ctx.prepare({{"frame", "rotating"},
                 {"params", io::to_json(d)},
                 {"grid", {{"q", io::to_json(c.q)}, {"p", io::to_json(c.p)}}},
                 {"dt", run.diagnostics.step},
                 {"splitting_order", c.splitting_order}});
    const auto& dir = ctx.common.out;
    const double cell = o.cell.value_or(std::sqrt(c.lambda));
    Outputs out;
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
        const auto& f = run.snapshots[k];
        const auto stem = fmt::format("field_{:02d}", k);
        io::write_field(dir / stem, f, 0.0);
        out.stems.push_back(stem);
        auto entry = snapshot_entry(f, cell);
        if (f.time > 0.0) {
            // phase-locked: beyond half the resonant radius squared R^2 = tau
            entry["locked_fraction"] = f.mass_outside(std::sqrt(0.5 * f.time));
        }
        out.snapshots.push_back(entry);
    }
    io::write_series(dir / "series.csv", run.diagnostics);
    io::write_json(dir / "summary.json", {{"diagnostics", io::to_json(run.diagnostics)}, {"snapshots", out.snapshots}});
    io::write_text(dir / "wigner.gp", gnuplot::wigner_panels(out.stems, run.snapshots, 1.0, ""));
    ctx.out() << fmt::format("rotating frame: {} steps of {:.4g}, normalization drift {:.3e}, absorbed {:.3e}\n",
                             run.diagnostics.steps, run.diagnostics.step, run.diagnostics.max_norm_drift,
                             run.diagnostics.absorbed_mass);
    return 0;
}

}  // namespace

int run_wigner(const Context& ctx, const WignerOptions& o) {
    return o.frame == "rotating" ? run_rotating(ctx, o) : run_fixed(ctx, o);
}

}  // namespace chirplock::cli
