#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "chirplock/analytic.hpp"
#include "chirplock/errors.hpp"
#include "commands.hpp"
#include "gnuplot.hpp"

namespace chirplock::cli {

LadderSettings Context::ladder_settings() const {
    LadderSettings s;
    if (common.rtol) s.rtol = *common.rtol;
    if (common.atol) s.atol = *common.atol;
    return s;
}

void Context::prepare(const io::Json& extra) const {
    fs::create_directories(common.out);
    const auto s = ladder_settings();
    io::Json m{{"program", "chirplock"},
               {"version", CHIRPLOCK_VERSION_STRING},
               {"command", command},
               {"workers", common.workers},
               {"seed", common.seed},
               {"tolerances", {{"ladder_rtol", s.rtol}, {"ladder_atol", s.atol}, {"guard_threshold", s.guard_threshold}}},
               {"config_file", "resolved.toml"}};
    for (const auto& [k, v] : extra.items()) m[k] = v;
    io::write_json(common.out / "manifest.json", m);
    io::write_text(common.out / "resolved.toml", resolved_config);
}

SimSettings SimOptions::settings(const Context& ctx) const {
    SimSettings s;
    s.tau0 = tau0;
    s.tau_measure = tau_measure;
    s.ladder = ctx.ladder_settings();
    s.workers = ctx.common.workers;
    if (separator == "fixed") {
        s.separator.mode = SeparatorPolicy::Mode::Fixed;
        s.separator.fixed_level = nc;
    }
    return s;
}

std::vector<double> log_spaced(double lo, double hi, int points) {
    if (!(lo > 0.0 && hi >= lo) || points < 1) {
        throw ConfigError(fmt::format("bad log-spaced range [{}, {}] with {} points", lo, hi, points));
    }
    std::vector<double> v;
    for (int k = 0; k < points; ++k) {
        const double f = points == 1 ? 0.0 : static_cast<double>(k) / (points - 1);
        v.push_back(lo * std::pow(hi / lo, f));
    }
    return v;
}

int run_ladder(const Context& ctx, const LadderOptions& o) {
    if (!(o.tau_end > o.tau0)) {
        throw ConfigError(fmt::format("--tau-end ({}) must exceed --tau0 ({})", o.tau_end, o.tau0));
    }
    auto times = o.times.empty() ? std::vector<double>{o.tau_end} : o.times;
    auto settings = ctx.ladder_settings();
    settings.basis_size = o.basis;
    settings.interaction_picture = !o.plain;
    const auto d = DimensionlessParams::make(o.p1, o.p2);
    const auto run = integrate(d, o.tau0, o.tau_end, times, settings);

    ctx.prepare({{"params", io::to_json(d)}});
    io::write_populations(ctx.common.out / "populations.csv", run);
    io::write_json(ctx.common.out / "run.json",
                   {{"params", io::to_json(d)},
                    {"tau0", o.tau0},
                    {"tau_end", o.tau_end},
                    {"basis_size", run.basis_size},
                    {"settings", io::to_json(settings)},
                    {"diagnostics", io::to_json(run.diagnostics)}});
    io::write_text(ctx.common.out / "populations.gp", gnuplot::populations("populations.csv", times));
    ctx.out() << fmt::format("ladder P1={} P2={}: basis {}, {} steps, norm drift {:.3e}\n", o.p1, o.p2,
                             run.basis_size, run.diagnostics.accepted_steps, run.diagnostics.max_norm_drift);
    return 0;
}

int run_scan(const Context& ctx, const ScanOptions& o) {
    const auto grid = o.p1.empty() ? default_p1_grid(o.p2, o.points, o.half_span) : o.p1;
    const auto settings = o.sim.settings(ctx);
    const auto curve = scan_s_curve(o.p2, grid, settings);
    ctx.prepare({{"simulation", io::to_json(settings)}});
    io::write_s_curve(ctx.common.out / "s_curve.csv", curve);
    io::write_json(ctx.common.out / "s_curve.json", io::s_curve_summary(curve));
    io::write_text(ctx.common.out / "s_curve.gp", gnuplot::s_curve("s_curve.csv", curve));
    ctx.out() << fmt::format("P2={}: P1cr = {:.6f} +- {:.2g}, width = {:.6f} +- {:.2g}\n", curve.p2,
                             curve.threshold, curve.threshold_error, curve.width, curve.width_error);
    return 0;
}

std::vector<SCurve> sweep_curves(const Context& ctx, const MapOptions& o) {
    auto p2s = o.p2.empty() ? log_spaced(o.p2_min, o.p2_max, o.p2_points) : o.p2;
    std::sort(p2s.begin(), p2s.end());
    std::vector<std::vector<double>> grids;
    for (double p2 : p2s) grids.push_back(default_p1_grid(p2, o.points, o.half_span));
    const auto settings = o.sim.settings(ctx);
    auto curves = scan_s_curves(p2s, grids, settings);
    ctx.prepare({{"simulation", io::to_json(settings)}});
    fs::create_directories(ctx.common.out / "curves");
    io::Json summary = io::Json::array();
    for (std::size_t k = 0; k < curves.size(); ++k) {
        io::write_s_curve(ctx.common.out / "curves" / fmt::format("curve_{:02d}.csv", k), curves[k]);
        summary.push_back(io::s_curve_summary(curves[k]));
    }
    io::write_json(ctx.common.out / "curves" / "summary.json", summary);
    return curves;
}

void write_threshold_table(const fs::path& path, const std::vector<SCurve>& curves) {
    io::CsvWriter csv(path, {"p2", "p1cr", "p1cr_error", "lc_reference", "ar_reference", "fitted"});
    const double lc = analytic::lc_threshold();
    for (const auto& c : curves) {
        csv << c.p2 << (c.fitted ? c.threshold : std::nan("")) << (c.fitted ? c.threshold_error : std::nan(""))
            << lc << analytic::classical_threshold(c.p2) << c.fitted;
        csv.end_row();
    }
}

void write_width_table(const fs::path& path, const std::vector<SCurve>& curves) {
    io::CsvWriter csv(path, {"p2", "width", "width_error", "lc_reference", "ar_reference", "fitted"});
    const double lc = analytic::lc_width();
    const double ar = analytic::classical_width(0.0);
    for (const auto& c : curves) {
        csv << c.p2 << (c.fitted ? c.width : std::nan("")) << (c.fitted ? c.width_error : std::nan("")) << lc << ar
            << c.fitted;
        csv.end_row();
    }
}

int run_threshold_map(const Context& ctx, const MapOptions& o) {
    const auto curves = sweep_curves(ctx, o);
    write_threshold_table(ctx.common.out / "threshold_map.csv", curves);
    io::write_text(ctx.common.out / "threshold_map.gp", gnuplot::threshold_map("threshold_map.csv"));
    for (const auto& c : curves) {
        ctx.out() << (c.fitted ? fmt::format("P2={:.4g}: P1cr = {:.4f} +- {:.2g}\n", c.p2, c.threshold, c.threshold_error)
                               : fmt::format("P2={:.4g}: no threshold ({})\n", c.p2, c.fit_error));
    }
    return 0;
}

int run_width_map(const Context& ctx, const MapOptions& o) {
    const auto curves = sweep_curves(ctx, o);
    write_width_table(ctx.common.out / "width_map.csv", curves);
    io::write_text(ctx.common.out / "width_map.gp", gnuplot::width_map("width_map.csv"));
    for (const auto& c : curves) {
        ctx.out() << (c.fitted ? fmt::format("P2={:.4g}: width = {:.4f} +- {:.2g}\n", c.p2, c.width, c.width_error)
                               : fmt::format("P2={:.4g}: no width ({})\n", c.p2, c.fit_error));
    }
    return 0;
}

}  // namespace chirplock::cli
