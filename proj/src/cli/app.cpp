#include "chirplock/cli.hpp"

#include <cstdlib>
#include <deque>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "chirplock/errors.hpp"
#include "chirplock/parallel.hpp"
#include "commands.hpp"

namespace chirplock::cli {

namespace {

CLI::Validator number_check(const char* name, bool (*ok)(double), const char* what) {
    return CLI::Validator(
        [ok, what](std::string& in) -> std::string {
            double v = 0.0;
            try {
                std::size_t used = 0;
                v = std::stod(in, &used);
                if (used != in.size()) throw std::invalid_argument(in);
            } catch (const std::exception&) {
                return fmt::format("expected a number, got '{}'", in);
            }
            return ok(v) ? std::string() : fmt::format("must be {} (got {})", what, in);
        },
        name);
}

const CLI::Validator kPositive = number_check("POSITIVE", [](double v) { return v > 0.0; }, "positive");
const CLI::Validator kNonNegative = number_check("NON-NEGATIVE", [](double v) { return v >= 0.0; }, "non-negative");

bool looks_numeric(const std::string& v) {
    if (v == "true" || v == "false") return true;
    char* end = nullptr;
    std::strtod(v.c_str(), &end);
    return !v.empty() && end == v.c_str() + v.size();
}

std::string config_value(const std::vector<std::string>& values) {
    auto one = [](const std::string& v) { return looks_numeric(v) ? v : "\"" + v + "\""; };
    if (values.size() == 1) return one(values.front());
    std::string s = "[";
    for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + one(values[i]);
    return s + "]";
}

// Options of `app` with their final values, skipping unset ones.
void append_options(std::string& out, const CLI::App& app) {
    for (const CLI::Option* opt : app.get_options()) {
        const auto& names = opt->get_lnames();
        if (names.empty() || names.front() == "help" || names.front() == "version" || names.front() == "config") {
            continue;
        }
        std::vector<std::string> values;
        if (opt->count() > 0) {
            values = opt->results();
            if (opt->get_expected_min() == 0) values = {"true"};
        } else if (!opt->get_default_str().empty()) {
            values = {opt->get_default_str()};
        }
        if (values.empty()) continue;
        out += names.front() + " = " + config_value(values) + "\n";
    }
}

std::string resolved_config(const CLI::App& app, const CLI::App& sub) {
    std::string out;
    append_options(out, app);
    out += "\n[" + sub.get_name() + "]\n";
    append_options(out, sub);
    return out;
}

// Binds an optional<double> through a plain value; filled in after parsing.
struct OptionalDouble {
    double value = 0.0;
    CLI::Option* option = nullptr;
    std::optional<double>* target = nullptr;

    void resolve() const {
        if (option != nullptr && option->count() > 0) *target = value;
    }
};

void add_sim_options(CLI::App* cmd, SimOptions& s, std::deque<OptionalDouble>& optionals) {
    cmd->add_option("--tau0", s.tau0, "Start of the sweep in slow time (ground state there)")
        ->capture_default_str();
    auto& tm = optionals.emplace_back();
    tm.target = &s.tau_measure;
    tm.option = cmd->add_option("--tau-measure", tm.value,
                                "Slow time at which populations are read (default max(12, 10 P2 + 10))");
    cmd->add_option("--separator", s.separator, "Separator policy between level groups")
        ->check(CLI::IsMember({"valley", "fixed"}))
        ->capture_default_str();
    cmd->add_option("--nc", s.nc, "Separator level when --separator fixed")
        ->check(kPositive)
        ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Chirped Duffing oscillator: ladder climbing, autoresonance and Wigner dynamics"};
    app.set_version_flag("--version", CHIRPLOCK_VERSION_STRING);
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "TOML or INI file with option values; command-line flags win");

    Context ctx;
    ctx.log = &out;
    ctx.common.workers = default_workers();
    std::string out_dir = "out";
    std::deque<OptionalDouble> optionals;  // stable addresses: options bind to members
    app.add_option("-o,--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("-j,--workers", ctx.common.workers, "Parallel workers (default: CHIRPLOCK_WORKERS or core count)")
        ->check(kPositive)
        ->capture_default_str();
    app.add_option("--seed", ctx.common.seed, "Seed recorded in the manifest; every solver here is deterministic")
        ->capture_default_str();
    {
        auto& r = optionals.emplace_back();
        r.target = &ctx.common.rtol;
        r.option = app.add_option("--rtol", r.value, "Ladder integrator relative tolerance")->check(kPositive);
        auto& a = optionals.emplace_back();
        a.target = &ctx.common.atol;
        a.option = app.add_option("--atol", a.value, "Ladder integrator absolute tolerance")->check(kPositive);
    }

    LadderOptions lo;
    auto* ladder = app.add_subcommand("ladder", "Integrate the slow amplitude equations from the ground state");
    ladder->add_option("--p1", lo.p1, "Drive parameter P1")->required()->check(kNonNegative);
    ladder->add_option("--p2", lo.p2, "Nonlinearity parameter P2")->required()->check(kPositive);
    ladder->add_option("--tau0", lo.tau0, "Start time")->capture_default_str();
    ladder->add_option("--tau-end", lo.tau_end, "End time")->required();
    ladder->add_option("--times", lo.times, "Snapshot times (default: tau-end)");
    ladder->add_option("--basis", lo.basis, "Basis size (0 = automatic)")->check(kNonNegative)->capture_default_str();
    ladder->add_flag("--plain", lo.plain, "Integrate without removing the diagonal phases");

    ScanOptions so;
    auto* scan = app.add_subcommand("scan", "Capture probability versus P1 at fixed P2 (S-curve)");
    scan->add_option("--p2", so.p2, "Nonlinearity parameter P2")->required()->check(kPositive);
    scan->add_option("--p1", so.p1, "Explicit P1 grid (default: centred on the analytic threshold)");
    scan->add_option("--points", so.points, "Default grid size")->check(kPositive)->capture_default_str();
    scan->add_option("--half-span", so.half_span, "Default grid half-width in P1")->check(kPositive)->capture_default_str();
    add_sim_options(scan, so.sim, optionals);

    MapOptions to;
    MapOptions wo;
    auto* tmap = app.add_subcommand("threshold-map", "Threshold P1cr over a range of P2");
    auto* wmap = app.add_subcommand("width-map", "Transition width over a range of P2");
    for (auto [cmd, m] : {std::pair{tmap, &to}, std::pair{wmap, &wo}}) {
        cmd->add_option("--p2", m->p2, "Explicit P2 values (default: log-spaced range)");
        cmd->add_option("--p2-min", m->p2_min, "Smallest P2")->check(kPositive)->capture_default_str();
        cmd->add_option("--p2-max", m->p2_max, "Largest P2")->check(kPositive)->capture_default_str();
        cmd->add_option("--p2-points", m->p2_points, "Number of log-spaced P2 values")->check(kPositive)->capture_default_str();
        cmd->add_option("--points", m->points, "P1 grid size per curve")->check(kPositive)->capture_default_str();
        cmd->add_option("--half-span", m->half_span, "P1 grid half-width")->check(kPositive)->capture_default_str();
        add_sim_options(cmd, m->sim, optionals);
    }

    WignerOptions wg;
    auto* wig = app.add_subcommand("wigner", "Evolve a Wigner function in the fixed or rotating frame");
    wig->add_option("--frame", wg.frame, "fixed or rotating")->check(CLI::IsMember({"fixed", "rotating"}))->capture_default_str();
    for (auto [name, target, help] :
         {std::tuple{"--p1", &wg.p1, "Drive parameter P1"}, std::tuple{"--p2", &wg.p2, "Nonlinearity parameter P2"},
          std::tuple{"--beta-bar", &wg.beta_bar, "Rescaled nonlinearity (fixed frame)"},
          std::tuple{"--eps-bar", &wg.eps_bar, "Rescaled drive amplitude (fixed frame)"},
          std::tuple{"--cell", &wg.cell, "Coarse-graining cell (default sqrt(gamma) or sqrt(lambda))"}}) {
        auto& o = optionals.emplace_back();
        o.target = target;
        o.option = wig->add_option(name, o.value, help)->check(kNonNegative);
    }
    wig->add_option("--alpha-bar", wg.alpha_bar, "Rescaled chirp rate (fixed frame)")->check(kNonNegative)->capture_default_str();
    wig->add_option("--gamma", wg.gamma, "hbar w0 / k_B T_eff (2 at zero temperature)")->capture_default_str();
    wig->add_option("--tau0", wg.tau0, "Start slow time")->capture_default_str();
    wig->add_option("--taus", wg.taus, "Output slow times");
    wig->add_option("--times", wg.times, "Fixed frame: output times in units of 1/w0 (start at 0)");
    wig->add_option("--half-width", wg.half_width, "Grid half-width (0 = frame default)")->capture_default_str();
    wig->add_option("--points", wg.points, "Grid points per axis (0 = frame default)")->capture_default_str();
    wig->add_option("--dt", wg.dt, "Time step (0 = frame default)")->capture_default_str();
    wig->add_option("--order", wg.order, "Splitting order, 2 or 4 (0 = frame default)")->capture_default_str();
    wig->add_option("--sponge-fraction", wg.sponge_fraction, "Absorbing layer width (negative = default)")->capture_default_str();
    wig->add_option("--sponge-rate", wg.sponge_rate, "Absorbing layer strength (negative = default)")->capture_default_str();
    wig->add_option("--x-offset", wg.x_offset, "Initial Gaussian centre, x or Q")->capture_default_str();
    wig->add_option("--p-offset", wg.p_offset, "Initial Gaussian centre, u or P")->capture_default_str();
    wig->add_option("--series-every", wg.series_every, "Time-series sampling interval in steps")->capture_default_str();
    wig->add_option("--project", wg.project, "Fixed frame: number of eigenstate populations to report")->capture_default_str();

    FiguresOptions fo;
    auto* figs = app.add_subcommand("figures", "Data files behind the five standard figures");
    figs->add_option("--fig", fo.fig, "Figure number")->check(CLI::Range(1, 5))->required();
    figs->add_flag("--check", fo.check, "Compare against the reference values and report pass/fail");
    figs->add_flag("--quick", fo.quick, "Smaller sweeps (figures 4 and 5: P2 in {0.2, 1, 8})");
    figs->add_flag("!--no-wigner", fo.wigner, "Figures 1-3: skip the Wigner runs");
    figs->add_option("--points", fo.points, "P1 grid size per curve")->check(kPositive)->capture_default_str();
    figs->add_option("--p2-points", fo.p2_points, "Log-spaced P2 values in [0.1, 10]")->check(kPositive)->capture_default_str();

    // A [subcommand] section in the config file selects that subcommand.
    for (auto* sub : app.get_subcommands({})) sub->configurable();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }
    for (const auto& o : optionals) o.resolve();
    ctx.common.out = out_dir;
    ctx.resolved_config = resolved_config(app, *app.get_subcommands().front());

    try {
        if (ladder->parsed()) {
            ctx.command = "ladder";
            return run_ladder(ctx, lo);
        }
        if (scan->parsed()) {
            ctx.command = "scan";
            return run_scan(ctx, so);
        }
        if (tmap->parsed()) {
            ctx.command = "threshold-map";
            return run_threshold_map(ctx, to);
        }
        if (wmap->parsed()) {
            ctx.command = "width-map";
            return run_width_map(ctx, wo);
        }
        if (wig->parsed()) {
            ctx.command = "wigner";
            return run_wigner(ctx, wg);
        }
        ctx.command = "figures";
        return run_figures(ctx, fo);
    } catch (const ConfigError& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const GridTooSmall& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const CFLViolation& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "solver error: " << e.what() << '\n';
        return kExitSolver;
    }
}

}  // namespace chirplock::cli
