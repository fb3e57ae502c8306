// Acceptance run: evaluates criteria 1-13, prints one PASS/FAIL line per
// criterion and stores the verdicts as JSON.
//
//   chirplock_acceptance --results FILE [--criteria 1,5,12]   run and record
//   chirplock_acceptance --results FILE --report N            exit 0 iff N passed
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "chirplock/analytic.hpp"
#include "chirplock/capture.hpp"
#include "chirplock/ladder.hpp"
#include "chirplock/parallel.hpp"
#include "chirplock/wigner.hpp"

using namespace chirplock;
using Json = nlohmann::ordered_json;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

// Drifts collected from every ladder and Wigner run for the conservation check.
struct DriftLog {
    double ladder = 0.0;
    double wigner = 0.0;
    int ladder_runs = 0;
    int wigner_runs = 0;
    void add_ladder(double d) {
        ladder = std::max(ladder, d);
        ++ladder_runs;
    }
    void add_wigner(double d) {
        wigner = std::max(wigner, d);
        ++wigner_runs;
    }
};

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

std::string range(double v, double target, double tol, int digits = 4) {
    return fmt::format("{:.{}f} (target {} +- {})", v, digits, target, tol);
}

// The S-curves at P2 = 8 and 0.2 feed criteria 6, 7 and 9.
struct Curves {
    std::map<double, SCurve> by_p2;
    const SCurve& get(double p2, DriftLog& drifts) {
        auto it = by_p2.find(p2);
        if (it != by_p2.end()) return it->second;
        SimSettings s;
        s.tau0 = -10.0;
        s.workers = default_workers();
        auto curve = scan_s_curve(p2, default_p1_grid(p2), s);
        for (const auto& sample : curve.samples) drifts.add_ladder(sample.max_norm_drift);
        return by_p2.emplace(p2, std::move(curve)).first->second;
    }
};

Verdict lc_threshold_check() {
    const double v = analytic::lc_threshold(5);
    return {within(v, 0.79, 0.005), "lc_threshold(5) = " + range(v, 0.79, 0.005)};
}

Verdict lc_width_check() {
    const double v = analytic::lc_width(5);
    return {within(v, 0.66, 0.005), "lc_width(5) = " + range(v, 0.66, 0.005)};
}

Verdict classical_coefficient_check() {
    PhysicalParams p;
    p.mass = 1.7;
    p.omega0 = 2.3;
    p.beta = 0.015;
    p.chirp = 3e-4;
    p.hbar = 0.4;
    const double v = analytic::classical_threshold_coefficient(p);
    return {within(v, 0.8206, 0.001), "converted eps_cr gives P1cr sqrt(P2) = " + range(v, 0.8206, 0.001)};
}

Verdict classical_width_check() {
    const double v = analytic::classical_width(0.0);
    return {within(v, 0.615, 0.005), "classical_width(T=0) = " + range(v, 0.615, 0.005)};
}

Verdict two_level_check(DriftLog& drifts) {
    LadderSettings s;
    s.basis_size = 2;
    s.guard_levels = 0;
    bool ok = true;
    std::string detail;
    for (double p1 : {0.3, 0.8, 1.5}) {
        const std::vector<double> times{300.0};
        const auto run = integrate(DimensionlessParams::make(p1, 1.0), -300.0, 300.0, times, s);
        drifts.add_ladder(run.diagnostics.max_norm_drift);
        const double got = run.at(300.0).populations()[1];
        const double want = 1.0 - std::exp(-std::numbers::pi * p1 * p1 / 2.0);
        const double rel = std::abs(got - want) / want;
        ok = ok && rel <= 0.01;
        detail += fmt::format("P1={}: {:.5f} vs {:.5f} (rel {:.1e}); ", p1, got, want, rel);
    }
    return {ok, detail};
}

Verdict lc_simulated_threshold(Curves& curves, DriftLog& drifts) {
    const auto& c = curves.get(8.0, drifts);
    return {c.fitted && within(c.threshold, 0.79, 0.08), "P2=8 S-curve P1cr = " + range(c.threshold, 0.79, 0.08)};
}

Verdict ar_simulated_threshold(Curves& curves, DriftLog& drifts) {
    const auto& c = curves.get(0.2, drifts);
    const double v = c.threshold * std::sqrt(0.2);
    return {c.fitted && within(v, 0.82, 0.08), "P2=0.2 S-curve P1cr sqrt(P2) = " + range(v, 0.82, 0.08)};
}

Verdict spot_values(DriftLog& drifts) {
    struct Spot {
        double p2, p1;
        int nc;
        double tau_measure, target;
    };
    // Read at the last population panel of each example, started at tau0 = -8.
    const Spot spots[] = {{8.0, 0.8, 6, 90.0, 0.48}, {1.0, 1.0, 10, 24.0, 0.62}, {0.2, 1.9, 40, 12.0, 0.66}};
    bool ok = true;
    std::string detail;
    for (const auto& s : spots) {
        SimSettings settings;
        settings.tau0 = -8.0;
        settings.tau_measure = s.tau_measure;
        settings.separator.mode = SeparatorPolicy::Mode::Fixed;
        settings.separator.fixed_level = s.nc;
        const auto r = simulate_capture(DimensionlessParams::make(s.p1, s.p2), settings);
        drifts.add_ladder(r.max_norm_drift);
        const bool pass = within(r.probability, s.target, 0.05);
        ok = ok && pass;
        detail += fmt::format("(P2={}, P1={}, nc={}) P = {} {}; ", s.p2, s.p1, s.nc,
                              range(r.probability, s.target, 0.05), pass ? "ok" : "out");
    }
    return {ok, detail};
}

Verdict simulated_widths(Curves& curves, DriftLog& drifts) {
    const auto& lc = curves.get(8.0, drifts);
    const auto& ar = curves.get(0.2, drifts);
    const bool ok = lc.fitted && ar.fitted && within(lc.width, 0.66, 0.1) && within(ar.width, 0.61, 0.1);
    return {ok, fmt::format("P2=8 width {}; P2=0.2 width {}", range(lc.width, 0.66, 0.1), range(ar.width, 0.61, 0.1))};
}

Verdict harmonic_limit(DriftLog& drifts) {
    wigner::FixedFrameConfig c;
    c.scaling = {0.0, 0.0, 0.0, 2.0};
    c.x_offset = 3.0;
    c.sponge_fraction = 0.0;
    const int samples = 8;
    for (int k = 1; k <= samples; ++k) c.output_times.push_back(2 * std::numbers::pi * k / samples);
    const auto run = wigner::evolve_fixed(c, wigner::initial_thermal(c));
    drifts.add_wigner(run.diagnostics.max_norm_drift);
    double sup = 0.0;
    for (const auto& f : run.snapshots) {
        const double xc = c.x_offset * std::cos(f.time);
        const double uc = -c.x_offset * std::sin(f.time);
        for (int i = 0; i < f.x.points; ++i) {
            for (int j = 0; j < f.p.points; ++j) {
                const double dx = f.x.coord(i) - xc, du = f.p.coord(j) - uc;
                const double exact = std::exp(-(dx * dx + du * du) / 2) / (2 * std::numbers::pi);
                sup = std::max(sup, std::abs(f(i, j) - exact));
            }
        }
    }
    return {sup <= 1e-4, fmt::format("sup |f - rotated Gaussian| over one period = {:.2e} (limit 1e-4)", sup)};
}

Verdict cross_representation(DriftLog& drifts) {
    const double p1 = 0.8, p2 = 8.0, tau0 = -8.0, alpha_bar = 6.25e-7;
    const auto d = DimensionlessParams::make(p1, p2);
    const std::vector<double> taus{0.0, 30.0};
    wigner::FixedFrameConfig c;
    c.scaling = fixed_frame_from_dimensionless(d, alpha_bar);
    c.t0 = wigner::fixed_time(tau0, alpha_bar);
    for (double t : taus) c.output_times.push_back(wigner::fixed_time(t, alpha_bar));
    c.x = c.u = wigner::Axis::symmetric(12.0, 128);
    c.dt = 0.15;
    c.splitting_order = 4;
    const auto run = wigner::evolve_fixed(c, wigner::initial_thermal(c));
    drifts.add_wigner(run.diagnostics.max_norm_drift);

    const int levels = 30;
    const auto states = wigner::quartic_eigenstates(c.x, c.scaling.beta_bar, c.scaling.gamma, levels);
    const auto ladder = integrate(d, tau0, taus.back(), taus);
    drifts.add_ladder(ladder.diagnostics.max_norm_drift);
    double worst = 0.0;
    std::string detail;
    for (std::size_t k = 0; k < taus.size(); ++k) {
        const auto pw = wigner::project_populations(run.snapshots[k], states, c.scaling.gamma);
        const auto pl = ladder.at(taus[k]).populations();
        double diff = 0.0;
        for (int n = 0; n < levels; ++n) {
            const double l = n < static_cast<int>(pl.size()) ? pl[static_cast<std::size_t>(n)] : 0.0;
            diff = std::max(diff, std::abs(l - pw[static_cast<std::size_t>(n)]));
        }
        worst = std::max(worst, diff);
        detail += fmt::format("tau={}: max level difference {:.4f}; ", taus[k], diff);
    }
    return {worst <= 0.05, detail + "limit 0.05"};
}

Verdict intermediate_envelope(DriftLog& drifts) {
    const std::vector<double> p2s{2.0, 3.0, 4.0};
    std::vector<std::vector<double>> grids;
    for (double p2 : p2s) grids.push_back(default_p1_grid(p2));
    SimSettings serial;
    SimSettings parallel = serial;
    parallel.workers = std::max(4, default_workers());
    const auto a = scan_s_curves(p2s, grids, serial);
    const auto b = scan_s_curves(p2s, grids, parallel);
    bool ok = true;
    bool identical = true;
    std::string detail;
    for (std::size_t i = 0; i < p2s.size(); ++i) {
        for (std::size_t k = 0; k < a[i].samples.size(); ++k) {
            drifts.add_ladder(a[i].samples[k].max_norm_drift);
            identical = identical && a[i].samples[k].probability == b[i].samples[k].probability;
        }
        identical = identical && a[i].threshold == b[i].threshold && a[i].width == b[i].width;
        const bool in = a[i].fitted && a[i].threshold >= 0.6 && a[i].threshold <= 1.2;
        ok = ok && in;
        detail += fmt::format("P2={}: P1cr = {:.4f}{}; ", p2s[i], a[i].threshold, in ? "" : " (outside [0.6, 1.2])");
    }
    detail += identical ? "repeat run bit-identical" : "repeat run differs";
    return {ok && identical, detail};
}

int report(const std::string& path, int criterion) {
    std::ifstream in(path);
    if (!in) {
        std::fprintf(stderr, "no results at %s\n", path.c_str());
        return 2;
    }
    const auto j = Json::parse(in);
    const auto key = std::to_string(criterion);
    if (!j.contains(key)) {
        std::fprintf(stderr, "criterion %d was not evaluated\n", criterion);
        return 2;
    }
    const auto& v = j[key];
    std::printf("criterion %2d %s  %s\n", criterion, v["pass"].get<bool>() ? "PASS" : "FAIL",
                v["detail"].get<std::string>().c_str());
    return v["pass"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::string results = "acceptance_results.json";
    std::vector<int> only;
    int report_criterion = 0;
    app.add_option("--results", results, "Verdict file");
    app.add_option("--criteria", only, "Evaluate only these criteria")->delimiter(',');
    app.add_option("--report", report_criterion, "Print one stored verdict and exit with its status");
    CLI11_PARSE(app, argc, argv);
    if (report_criterion > 0) {
        return report(results, report_criterion);
    }

    DriftLog drifts;
    Curves curves;
    const std::vector<std::pair<int, std::function<Verdict()>>> checks{
        {1, lc_threshold_check},
        {2, lc_width_check},
        {3, classical_coefficient_check},
        {4, classical_width_check},
        {5, [&] { return two_level_check(drifts); }},
        {6, [&] { return lc_simulated_threshold(curves, drifts); }},
        {7, [&] { return ar_simulated_threshold(curves, drifts); }},
        {8, [&] { return spot_values(drifts); }},
        {9, [&] { return simulated_widths(curves, drifts); }},
        {11, [&] { return harmonic_limit(drifts); }},
        {12, [&] { return cross_representation(drifts); }},
        {13, [&] { return intermediate_envelope(drifts); }},
        {10,
         [&] {
             const bool ok = drifts.ladder <= 1e-8 && drifts.wigner <= 1e-4;
             return Verdict{ok, fmt::format("max ladder drift {:.2e} over {} runs (limit 1e-8); "
                                            "max Wigner drift {:.2e} over {} runs (limit 1e-4)",
                                            drifts.ladder, drifts.ladder_runs, drifts.wigner, drifts.wigner_runs)};
         }},
    };
    const std::set<int> selected(only.begin(), only.end());

    Json out = Json::object();
    std::map<int, Verdict> verdicts;
    for (const auto& [id, check] : checks) {
        if (!selected.empty() && !selected.contains(id)) continue;
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        v.detail += fmt::format(" [{:.1f} s]", secs);
        verdicts[id] = v;
        std::fflush(stdout);
    }
    int failed = 0;
    for (const auto& [id, v] : verdicts) {
        std::printf("criterion %2d %s  %s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
        out[std::to_string(id)] = {{"pass", v.pass}, {"detail", v.detail}};
        failed += v.pass ? 0 : 1;
    }
    std::printf("%zu evaluated, %d failed\n", verdicts.size(), failed);
    std::ofstream(results) << out.dump(2) << '\n';
    return 0;
}
