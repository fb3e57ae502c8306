#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "chirplock/capture.hpp"
#include "chirplock/io.hpp"

namespace chirplock::cli {

namespace fs = std::filesystem;

struct Common {
    fs::path out = "out";
    int workers = 1;
    unsigned long seed = 0;
    std::optional<double> rtol;
    std::optional<double> atol;
};

struct Context {
    Common common;
    std::string command;
    std::string resolved_config;  // every option with its final value, config-file syntax
    std::ostream* log = nullptr;

    [[nodiscard]] std::ostream& out() const { return *log; }
    [[nodiscard]] LadderSettings ladder_settings() const;
    // Creates the output directory and writes manifest.json and resolved.toml.
    void prepare(const io::Json& extra = io::Json::object()) const;
};

struct LadderOptions {
    double p1 = 0.0;
    double p2 = 1.0;
    double tau0 = -10.0;
    double tau_end = 0.0;
    std::vector<double> times;
    int basis = 0;
    bool plain = false;
};

struct SimOptions {
    double tau0 = -10.0;
    std::optional<double> tau_measure;
    std::string separator = "valley";
    int nc = 5;

    [[nodiscard]] SimSettings settings(const Context& ctx) const;
};

struct ScanOptions {
    double p2 = 1.0;
    std::vector<double> p1;
    int points = 15;
    double half_span = 0.7;
    SimOptions sim;
};

struct MapOptions {
    std::vector<double> p2;
    double p2_min = 0.1;
    double p2_max = 10.0;
    int p2_points = 13;
    int points = 15;
    double half_span = 0.7;
    SimOptions sim;
};

struct WignerOptions {
    std::string frame = "fixed";
    // physical scaling (fixed frame); unset values are derived from p1/p2
    std::optional<double> p1;
    std::optional<double> p2;
    double alpha_bar = 0.0;
    std::optional<double> beta_bar;
    std::optional<double> eps_bar;
    double gamma = 2.0;
    double tau0 = -8.0;
    std::vector<double> taus;
    std::vector<double> times;  // fixed frame: output times in 1/w0, instead of taus
    double half_width = 0.0;    // 0 selects the frame default
    int points = 0;
    double dt = 0.0;
    int order = 0;
    double sponge_fraction = -1.0;
    double sponge_rate = -1.0;
    double x_offset = 0.0;
    double p_offset = 0.0;
    int series_every = 0;
    int project = 0;            // fixed frame: number of eigenstate populations
    std::optional<double> cell; // coarse-graining cell
};

struct FiguresOptions {
    int fig = 1;
    bool check = false;
    bool quick = false;
    bool wigner = true;
    int points = 15;
    int p2_points = 13;
};

int run_ladder(const Context& ctx, const LadderOptions& o);
int run_scan(const Context& ctx, const ScanOptions& o);
int run_threshold_map(const Context& ctx, const MapOptions& o);
int run_width_map(const Context& ctx, const MapOptions& o);
int run_wigner(const Context& ctx, const WignerOptions& o);
int run_figures(const Context& ctx, const FiguresOptions& o);

// Log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int points);

}  // namespace chirplock::cli

namespace chirplock::cli {

// Shared by the map commands and the figures.
std::vector<SCurve> sweep_curves(const Context& ctx, const MapOptions& o);
void write_threshold_table(const fs::path& path, const std::vector<SCurve>& curves);
void write_width_table(const fs::path& path, const std::vector<SCurve>& curves);

}  // namespace chirplock::cli
