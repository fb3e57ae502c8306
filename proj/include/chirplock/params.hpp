#pragma once

// Physical and dimensionless parameter sets of the chirped Duffing oscillator
//
//   H = p^2/2m + m w0^2 (x^2/2 - beta x^4/4) + eps x cos(phi_d),  w_d = w0 - alpha t
//
// Everything downstream of the input boundary works with the dimensionless set.

namespace chirplock {

// Consistent-unit physical inputs. `temperature` is the energy k_B*T.
struct PhysicalParams {
    double mass = 1.0;
    double omega0 = 1.0;
    double beta = 0.0;
    double drive = 0.0;
    double chirp = 0.0;
    double hbar = 1.0;
    double temperature = 0.0;
};

// Throws ConfigError naming the first offending field.
void validate(const PhysicalParams& p);

// (P1, P2) plus the derived rotating-frame and thermal quantities.
class DimensionlessParams {
public:
    // thermal_ratio is k_B T / (hbar w0); zero means the ground state.
    static DimensionlessParams make(double p1, double p2, double thermal_ratio = 0.0);

    [[nodiscard]] double p1() const noexcept { return p1_; }
    [[nodiscard]] double p2() const noexcept { return p2_; }
    [[nodiscard]] double thermal_ratio() const noexcept { return thermal_ratio_; }
    // Classical autoresonance drive parameter, P1 sqrt(P2) / 2.
    [[nodiscard]] double mu() const noexcept { return mu_; }
    // Dimensionless Planck constant of the rotating frame, P2 / 2.
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    // hbar w0 / k_B T_eff; equals 2 in the ground state.
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    // Variance of the rotating-frame thermal Wigner function.
    [[nodiscard]] double sigma2() const noexcept { return sigma2_; }

private:
    DimensionlessParams() = default;

    double p1_ = 0.0;
    double p2_ = 1.0;
    double thermal_ratio_ = 0.0;
    double mu_ = 0.0;
    double lambda_ = 0.5;
    double gamma_ = 2.0;
    double sigma2_ = 0.25;
};

// P1 = eps / sqrt(2 m hbar w0 alpha), P2 = 3 hbar beta / (4 m sqrt(alpha)).
DimensionlessParams from_physical(const PhysicalParams& p);

// coth(x) for x >= 0, with coth(+inf) = 1. Uses expm1 so small x does not cancel.
double coth(double x);

// k_B T_eff = (hbar w0 / 2) coth(hbar w0 / 2 k_B T). Zero temperature gives hbar w0 / 2.
double effective_temperature(double hbar_omega0, double thermal_energy);

// Same quantity in units of hbar w0, as a function of k_B T / (hbar w0).
double effective_temperature_ratio(double thermal_ratio);

double classical_drive_param(const DimensionlessParams& d);

// Rescaled lab-frame variables used by the fixed-frame Wigner equation:
// x = x/L, u = u/(w0 L), t in units of 1/w0, with L^2 = k_B T_eff / (m w0^2).
struct FixedFrameScaling {
    double alpha_bar = 0.0;  // alpha / w0^2
    double beta_bar = 0.0;   // beta L^2
    double eps_bar = 0.0;    // eps / (m L w0^2)
    double gamma = 2.0;      // hbar w0 / k_B T_eff
};

// In these units hbar = gamma L^2, so
//   P1 = eps_bar / sqrt(2 gamma alpha_bar),  P2 = 3 gamma beta_bar / (4 sqrt(alpha_bar)).
DimensionlessParams dimensionless_from_fixed_frame(const FixedFrameScaling& s);
FixedFrameScaling fixed_frame_from_dimensionless(const DimensionlessParams& d, double alpha_bar);

}  // namespace chirplock
