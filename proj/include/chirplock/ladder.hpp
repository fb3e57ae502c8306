#pragma once

// Slow rotating-wave dynamics on a truncated energy ladder:
//
//   i dB_n/dtau = Gamma_n B_n + (P1/2) (sqrt(n+1) B_{n+1} + sqrt(n) B_{n-1}),
//   Gamma_n = n (tau - (n+1) P2 / 2).

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "chirplock/params.hpp"

namespace chirplock {

using Complex = std::complex<double>;

struct AmplitudeState {
    double tau = 0.0;
    std::vector<Complex> amplitudes;

    [[nodiscard]] int size() const noexcept { return static_cast<int>(amplitudes.size()); }
    [[nodiscard]] double norm() const;
    [[nodiscard]] std::vector<double> populations() const;
};

// B_n = delta_{n,0} at tau.
AmplitudeState ground_state(int basis_size, double tau);

struct LadderSettings {
    double rtol = 1e-11;
    double atol = 1e-13;
    // 0 selects default_basis_size().
    int basis_size = 0;
    int guard_levels = 5;
    // Population allowed in the guard band before TruncationOverflow.
    double guard_threshold = 1e-8;
    double initial_step = 0.0;
    double min_step = 1e-13;
    long max_steps = 200'000'000;
    // Remove Gamma_n from the right-hand side analytically on each step.
    bool interaction_picture = true;
};

struct IntegratorDiagnostics {
    long accepted_steps = 0;
    long rejected_steps = 0;
    double max_norm_drift = 0.0;
    double max_guard_population = 0.0;
};

struct LadderRun {
    DimensionlessParams params = DimensionlessParams::make(0.0, 1.0);
    double tau0 = 0.0;
    double tau_end = 0.0;
    int basis_size = 0;
    LadderSettings settings;
    std::vector<AmplitudeState> snapshots;  // ordered in tau
    IntegratorDiagnostics diagnostics;

    // Snapshot whose time equals tau (within 1e-9); throws std::out_of_range otherwise.
    [[nodiscard]] const AmplitudeState& at(double tau) const;
};

double gamma_n(int n, double tau, double p2);

// round(tau / P2), clamped at zero.
int resonant_level(double tau, double p2);

// ceil(tau_end/P2) + max(20, 4 P1 sqrt(ceil(tau_end/P2))).
int default_basis_size(double tau_end, double p2, double p1);

// Integrates from tau0 to tau_end (tau0 < tau_end) and returns dense-output
// snapshots at the requested times, which must lie in [tau0, tau_end].
// Starts from the ground state unless `init` is given (its tau is ignored).
LadderRun integrate(const DimensionlessParams& params, double tau0, double tau_end,
                    std::span<const double> snapshot_times, const LadderSettings& settings = {},
                    const std::optional<AmplitudeState>& init = std::nullopt);

// Propagates a state to tau_to in either direction. settings.basis_size is ignored:
// the basis is the size of `state`.
AmplitudeState propagate(const DimensionlessParams& params, const AmplitudeState& state,
                         double tau_to, const LadderSettings& settings = {},
                         IntegratorDiagnostics* diagnostics = nullptr);

}  // namespace chirplock
