#pragma once

// Wigner-function dynamics of the chirped Duffing oscillator.
//
// Fixed frame (x, u rescaled by L = sqrt(k_B T_eff / m w0^2), time in 1/w0):
//   df/dt + u df/dx - V'(x,t) df/du = (gamma^2 beta x / 4) d^3f/du^3,
//   V = x^2/2 - beta x^4/4 + eps x cos(phi_d),  phi_d = t - alpha t^2 / 2.
//
// Chirped rotating frame (slow time tau):
//   df/dtau + G_P df/dQ - G_Q df/dP = (lambda^2/4) D f,
//   G = (tau/2)(Q^2+P^2) - (Q^2+P^2)^2/4 + mu Q,
//   D = (Q d/dP - P d/dQ)(d^2/dQ^2 + d^2/dP^2).

#include <span>
#include <vector>

#include "chirplock/params.hpp"

namespace chirplock::wigner {

enum class Frame { Fixed, Rotating };

const char* to_string(Frame f);

// Periodic uniform axis: points at min + i * spacing, i < points; max is the
// periodic image of min.
struct Axis {
    double min = -1.0;
    double max = 1.0;
    int points = 64;

    [[nodiscard]] double spacing() const { return (max - min) / points; }
    [[nodiscard]] double coord(int i) const { return min + i * spacing(); }
    [[nodiscard]] double period() const { return max - min; }

    // Symmetric axis [-half_width, half_width).
    static Axis symmetric(double half_width, int points);
};

struct PhaseSpaceField {
    Frame frame = Frame::Fixed;
    Axis x;  // x (fixed) or Q (rotating)
    Axis p;  // u (fixed) or P (rotating)
    double time = 0.0;  // t in 1/w0 (fixed) or tau (rotating)
    std::vector<double> values;  // values[i * p.points + j]

    PhaseSpaceField() = default;
    PhaseSpaceField(Frame frame, Axis x, Axis p, double time = 0.0);

    [[nodiscard]] double& operator()(int i, int j) {
        return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(p.points) +
                      static_cast<std::size_t>(j)];
    }
    [[nodiscard]] double operator()(int i, int j) const {
        return values[static_cast<std::size_t>(i) * static_cast<std::size_t>(p.points) +
                      static_cast<std::size_t>(j)];
    }
    [[nodiscard]] double cell_area() const { return x.spacing() * p.spacing(); }
    [[nodiscard]] double integral() const;
    // integral of max(-f, 0)
    [[nodiscard]] double negativity() const;
    // <x^2> - <x>^2 and the same for p
    [[nodiscard]] double variance_x() const;
    [[nodiscard]] double variance_p() const;
    // integral of f over x^2 + p^2 > radius^2
    [[nodiscard]] double mass_outside(double radius) const;
};

struct TimeSeriesRow {
    double time = 0.0;
    double mass = 0.0;      // integral over the grid
    double absorbed = 0.0;  // removed by the sponge so far
    double negativity = 0.0;
};

struct WignerDiagnostics {
    long steps = 0;
    double step = 0.0;        // time step used
    double step_bound = 0.0;  // admissible step of the scheme
    double absorbed_mass = 0.0;
    // max |mass + absorbed - initial mass| over the run
    double max_norm_drift = 0.0;
    std::vector<TimeSeriesRow> series;
};

struct WignerRun {
    std::vector<PhaseSpaceField> snapshots;
    WignerDiagnostics diagnostics;
};

struct FixedFrameConfig {
    FixedFrameScaling scaling;
    double t0 = 0.0;                   // start time (1/w0), linear resonance at t = 0
    std::vector<double> output_times;  // in 1/w0, >= t0
    Axis x = Axis::symmetric(12.0, 128);
    Axis u = Axis::symmetric(12.0, 128);
    double dt = 0.2;
    int splitting_order = 4;        // 2 (Strang) or 4 (triple-jump composition of Strang steps)
    double sponge_fraction = 0.05;  // absorbing band per edge, fraction of the axis
    double sponge_rate = 1.0;       // damping rate at the outer edge
    double x_offset = 0.0;          // centre of the initial Gaussian
    double u_offset = 0.0;
    int series_every = 0;  // time-series sampling interval in steps (0 = outputs only)
};

// t = tau / sqrt(alpha_bar)
double fixed_time(double tau, double alpha_bar);

struct RotatingFrameConfig {
    double mu = 0.0;
    double lambda = 0.1;
    double sigma2 = 0.05;
    double tau0 = -10.0;
    std::vector<double> output_taus;
    Axis q = Axis::symmetric(5.0, 160);
    Axis p = Axis::symmetric(5.0, 160);
    double dt = 0.0;  // 0 selects half the step bound
    int splitting_order = 2;
    // Radial absorbing layer beyond (1 - sponge_fraction) of the half-width.
    double sponge_fraction = 0.12;
    double sponge_rate = 4.0;
    double q_offset = 0.0;
    double p_offset = 0.0;
    int series_every = 0;

    static RotatingFrameConfig from_params(const DimensionlessParams& d, double tau0,
                                           std::vector<double> output_taus);
};

// Thermal Gaussian: unit variance in the fixed frame, sigma2 in the rotating frame,
// renormalised so the discrete integral is exactly 1. Throws GridTooSmall when more
// than 1e-8 of the analytic mass lies outside the grid.
PhaseSpaceField initial_thermal(const FixedFrameConfig& config);
PhaseSpaceField initial_thermal(const RotatingFrameConfig& config);

// Split-step spectral solver: exact harmonic rotation by FFT shears with the
// anharmonic and drive kick (including the quantum third-derivative term, exact
// for a quartic potential) applied in the u-spectrum. Order 4 composes three
// Strang substeps with the Yoshida weights.
WignerRun evolve_fixed(const FixedFrameConfig& config, const PhaseSpaceField& f0);

// Largest fixed-frame step the scheme accepts for this grid and potential.
double fixed_step_bound(const FixedFrameConfig& config);

// Split-step spectral solver: exact rotations for the harmonic part and for the
// change to diagonal coordinates, and one-axis quartic kicks using
// R^4 = (2/3)(Q^4 + P^4 + s^4 + d^4), s, d = (Q +- P)/sqrt(2). The Q and P axes
// must be identical. Each kick carries its quantum correction exactly.
WignerRun evolve_rotating(const RotatingFrameConfig& config, const PhaseSpaceField& f0);

double rotating_step_bound(const RotatingFrameConfig& config);

// Spectral evaluation of D f on the field's grid.
PhaseSpaceField apply_quantum_operator(const PhaseSpaceField& f);

// Rigid rotation of a field by angle theta (point map x' = x cos + p sin,
// p' = -x sin + p cos) via three FFT shears.
PhaseSpaceField rotate(const PhaseSpaceField& f, double theta);

struct Point {
    double xi = 0.0;
    double upsilon = 0.0;
};
using Polyline = std::vector<Point>;

// Separatrix of the quartic well in rescaled coordinates xi = sqrt(beta) x,
// upsilon = sqrt(beta) u, where it reads upsilon = +-(1 - xi^2)/sqrt(2).
// Returns the closed inner loop (|xi| <= 1) followed by the four outer branches
// out to |xi| = xi_max.
std::vector<Polyline> separatrix(double beta_bar, int points = 201, double xi_max = 1.5);

struct CoarseGrained {
    PhaseSpaceField field;
    double negativity_before = 0.0;
    double negativity_after = 0.0;
    int block = 1;  // cell size in grid points
};

// Box average over square cells of side `cell` (rounded to whole grid points).
CoarseGrained coarse_grain(const PhaseSpaceField& f, double cell);

struct Eigenstates {
    Axis fine;                               // spacing half the field's x spacing
    std::vector<double> energies;            // ascending
    std::vector<std::vector<double>> states; // real, sum |psi|^2 dx = 1
};

// Lowest `count` eigenstates of -(gamma^2/2) d^2/dx^2 + x^2/2 - beta x^4/4 on a
// sinc-DVR grid with half the spacing of `x`, over the same interval.
Eigenstates quartic_eigenstates(const Axis& x, double beta_bar, double gamma, int count);

// Level populations 2 pi gamma * integral f W_n from the Wigner functions of the
// eigenstates.
std::vector<double> project_populations(const PhaseSpaceField& f, const Eigenstates& states,
                                        double gamma);

}  // namespace chirplock::wigner
