#include "chirplock/ladder.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "chirplock/errors.hpp"

namespace chirplock {

double AmplitudeState::norm() const {
    double s = 0.0;
    for (const auto& b : amplitudes) {
        s += std::norm(b);
    }
    return s;
}

std::vector<double> AmplitudeState::populations() const {
    std::vector<double> p(amplitudes.size());
    std::transform(amplitudes.begin(), amplitudes.end(), p.begin(),
                   [](const Complex& b) { return std::norm(b); });
    return p;
}

AmplitudeState ground_state(int basis_size, double tau) {
    if (basis_size < 2) {
        throw ConfigError(fmt::format("basis size must be at least 2 (got {})", basis_size));
    }
    AmplitudeState s;
    s.tau = tau;
    s.amplitudes.assign(static_cast<std::size_t>(basis_size), Complex{0.0, 0.0});
    s.amplitudes[0] = 1.0;
    return s;
}

const AmplitudeState& LadderRun::at(double tau) const {
    for (const auto& s : snapshots) {
        if (std::abs(s.tau - tau) <= 1e-9) {
            return s;
        }
    }
    throw std::out_of_range(fmt::format("no snapshot at tau = {}", tau));
}

double gamma_n(int n, double tau, double p2) {
    return n * (tau - (n + 1) * p2 / 2.0);
}

int resonant_level(double tau, double p2) {
    if (!(p2 > 0.0)) {
        throw ConfigError("P2 must be positive");
    }
    return std::max(0, static_cast<int>(std::lround(tau / p2)));
}

int default_basis_size(double tau_end, double p2, double p1) {
    const double top = std::ceil(std::max(tau_end, 0.0) / p2);
    const double margin = std::max(20.0, 4.0 * p1 * std::sqrt(top));
    return static_cast<int>(top + std::ceil(margin));
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension (Hairer & Wanner, contd5).
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

using Vec = std::vector<Complex>;

class LadderStepper {
public:
    LadderStepper(const DimensionlessParams& params, int n, const LadderSettings& settings)
        : p1_half_(0.5 * params.p1()), p2_(params.p2()), n_(n), settings_(settings) {
        sqrt_n_.resize(static_cast<std::size_t>(n_) + 1);
        for (int i = 0; i <= n_; ++i) {
            sqrt_n_[static_cast<std::size_t>(i)] = std::sqrt(static_cast<double>(i));
        }
        for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &tmp_, &y1_, &dense4_}) {
            v->assign(static_cast<std::size_t>(n_), Complex{});
        }
        bond_.assign(static_cast<std::size_t>(n_), Complex{1.0, 0.0});
    }

    // Advances `state` to tau_to, invoking on_step(tau_a, tau_b) after each accepted step
    // so the caller can sample dense output through interpolate().
    template <class OnStep>
    void run(AmplitudeState& state, double tau_to, IntegratorDiagnostics& diag, OnStep&& on_step) {
        Vec& y = state.amplitudes;
        double t = state.tau;
        const double dir = tau_to >= t ? 1.0 : -1.0;
        const double norm0 = state.norm();
        double h = settings_.initial_step > 0.0 ? settings_.initial_step : initial_step(t);
        h = std::min(h, std::abs(tau_to - t));
        double facold = 1e-4;
        bool have_k1 = false;
        long steps = 0;

        while (dir * (tau_to - t) > 0.0) {
            if (++steps > settings_.max_steps) {
                throw StepFailure(fmt::format("exceeded {} steps at tau = {}", settings_.max_steps, t));
            }
            bool last = false;
            if (h >= std::abs(tau_to - t) * (1.0 - 1e-12)) {
                h = std::abs(tau_to - t);
                last = true;
            }
            if (h < settings_.min_step) {
                throw StepFailure(fmt::format("step size underflow ({}) at tau = {}", h, t));
            }
            const double hs = dir * h;
            ref_ = t;
            if (!have_k1 || settings_.interaction_picture) {
                rhs(t, y, k1_);
            }
            const double err = attempt(t, hs, y);

            constexpr double beta = 0.04;
            constexpr double expo1 = 0.2 - beta * 0.75;
            constexpr double safe = 0.9;
            const double fac11 = std::pow(err, expo1);
            if (err <= 1.0) {
                double fac = fac11 / std::pow(facold, beta);
                fac = std::clamp(fac / safe, 0.2, 10.0);
                facold = std::max(err, 1e-4);
                ++diag.accepted_steps;

                // Continuous extension; y_ is still the step start.
                for (std::size_t i = 0; i < y.size(); ++i) {
                    const Complex ydiff = y1_[i] - y[i];
                    const Complex bspl = hs * k1_[i] - ydiff;
                    dense0_i(i) = y[i];
                    dense1_i(i) = ydiff;
                    dense2_i(i) = bspl;
                    dense3_i(i) = ydiff - hs * k7_[i] - bspl;
                    dense4_[i] = hs * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] +
                                       d6 * k6_[i] + d7 * k7_[i]);
                }
                step_t0_ = t;
                step_h_ = hs;

                const double t_new = last ? tau_to : t + hs;
                if (settings_.interaction_picture) {
                    to_schroedinger(t_new, y1_);
                }
                y.swap(y1_);
                k1_.swap(k7_);
                have_k1 = true;
                t = t_new;
                state.tau = t;

                const double drift = std::abs(state.norm() - norm0);
                diag.max_norm_drift = std::max(diag.max_norm_drift, drift);
                check_guard(y, t, diag);
                on_step(step_t0_, t);

                h = h / fac;
            } else {
                ++diag.rejected_steps;
                h = h / std::min(5.0, fac11 / safe);
                have_k1 = !settings_.interaction_picture;
            }
        }
    }

    // Dense-output value at tau inside the last accepted step.
    void interpolate(double tau, Vec& out) const {
        const double s = (tau - step_t0_) / step_h_;
        const double s1 = 1.0 - s;
        out.resize(static_cast<std::size_t>(n_));
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = dense_[0][i] +
                     s * (dense_[1][i] + s1 * (dense_[2][i] + s * (dense_[3][i] + s1 * dense4_[i])));
        }
        if (settings_.interaction_picture) {
            rotate_phases(step_t0_, tau, out);
        }
    }

private:
    Complex& dense0_i(std::size_t i) { return dense_[0][i]; }
    Complex& dense1_i(std::size_t i) { return dense_[1][i]; }
    Complex& dense2_i(std::size_t i) { return dense_[2][i]; }
    Complex& dense3_i(std::size_t i) { return dense_[3][i]; }

    double initial_step(double t) const {
        const double top = static_cast<double>(n_ - 1);
        const double rate =
            std::abs(top * (std::abs(t) + (top + 1.0) * p2_ / 2.0)) + p1_half_ * 2.0 * std::sqrt(top + 1.0);
        return 0.1 / std::max(1.0, rate);
    }

    // theta_n(tau) = int_ref^tau Gamma_n.
    double theta(int n, double tau) const {
        return n * ((tau * tau - ref_ * ref_) / 2.0 - (n + 1) * p2_ * (tau - ref_) / 2.0);
    }

    void rotate_phases(double ref, double tau, Vec& v) const {
        for (int n = 1; n < n_; ++n) {
            const double th = n * ((tau * tau - ref * ref) / 2.0 - (n + 1) * p2_ * (tau - ref) / 2.0);
            v[static_cast<std::size_t>(n)] *= std::polar(1.0, -th);
        }
    }

    void to_schroedinger(double tau, Vec& v) const { rotate_phases(ref_, tau, v); }

    void rhs(double t, const Vec& y, Vec& dy) {
        const std::size_t n = y.size();
        const Complex mi{0.0, -1.0};
        if (!settings_.interaction_picture) {
            for (std::size_t i = 0; i < n; ++i) {
                const int ii = static_cast<int>(i);
                Complex acc = gamma_n(ii, t, p2_) * y[i];
                Complex cpl{};
                if (i + 1 < n) cpl += sqrt_n_[i + 1] * y[i + 1];
                if (i > 0) cpl += sqrt_n_[i] * y[i - 1];
                dy[i] = mi * (acc + p1_half_ * cpl);
            }
            return;
        }
        // bond_[i] = exp(i (theta_{i+1} - theta_i)), coupling i <-> i+1
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const int ii = static_cast<int>(i);
            bond_[i] = std::polar(1.0, theta(ii + 1, t) - theta(ii, t));
        }
        for (std::size_t i = 0; i < n; ++i) {
            Complex cpl{};
            if (i + 1 < n) cpl += sqrt_n_[i + 1] * std::conj(bond_[i]) * y[i + 1];
            if (i > 0) cpl += sqrt_n_[i] * bond_[i - 1] * y[i - 1];
            dy[i] = mi * p1_half_ * cpl;
        }
    }

    // One Dormand-Prince trial step of signed size h from (t, y); fills y1_, k2_..k7_
    // and returns the scaled error norm.
    double attempt(double t, double h, const Vec& y) {
        const std::size_t n = y.size();
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * a21 * k1_[i];
        rhs(t + c2 * h, tmp_, k2_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        rhs(t + c3 * h, tmp_, k3_);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = y[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
        rhs(t + c4 * h, tmp_, k4_);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = y[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
        rhs(t + c5 * h, tmp_, k5_);
        for (std::size_t i = 0; i < n; ++i)
            tmp_[i] = y[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] +
                                  a65 * k5_[i]);
        rhs(t + h, tmp_, k6_);
        for (std::size_t i = 0; i < n; ++i)
            y1_[i] = y[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] +
                                 a76 * k6_[i]);
        rhs(t + h, y1_, k7_);

        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Complex e = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] +
                                   e6 * k6_[i] + e7 * k7_[i]);
            const double sk =
                settings_.atol + settings_.rtol * std::max(std::abs(y[i]), std::abs(y1_[i]));
            sum += std::norm(e) / (sk * sk);
        }
        const double err = std::sqrt(sum / static_cast<double>(n));
        return std::isfinite(err) ? err : 1e10;
    }

    void check_guard(const Vec& y, double t, IntegratorDiagnostics& diag) const {
        const int guard = std::min(settings_.guard_levels, n_ - 1);
        double g = 0.0;
        for (int i = n_ - guard; i < n_; ++i) {
            g += std::norm(y[static_cast<std::size_t>(i)]);
        }
        diag.max_guard_population = std::max(diag.max_guard_population, g);
        if (guard > 0 && g > settings_.guard_threshold) {
            throw TruncationOverflow(
                fmt::format("population {:.3e} in top {} of {} levels at tau = {:.4f}", g, guard, n_, t),
                g);
        }
    }

    double p1_half_;
    double p2_;
    int n_;
    LadderSettings settings_;
    std::vector<double> sqrt_n_;
    Vec k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y1_;
    std::array<Vec, 4> dense_{Vec(static_cast<std::size_t>(n_)), Vec(static_cast<std::size_t>(n_)),
                              Vec(static_cast<std::size_t>(n_)), Vec(static_cast<std::size_t>(n_))};
    Vec dense4_;
    Vec bond_;
    double ref_ = 0.0;
    double step_t0_ = 0.0;
    double step_h_ = 1.0;
};

void check_settings(const LadderSettings& s) {
    if (!(s.rtol > 0.0) || !(s.atol > 0.0)) {
        throw ConfigError("integrator tolerances must be positive");
    }
    if (s.guard_levels < 0) {
        throw ConfigError("guard_levels must be non-negative");
    }
}

}  // namespace

AmplitudeState propagate(const DimensionlessParams& params, const AmplitudeState& state, double tau_to,
                         const LadderSettings& settings, IntegratorDiagnostics* diagnostics) {
    check_settings(settings);
    if (state.size() < 2) {
        throw ConfigError("basis size must be at least 2");
    }
    AmplitudeState out = state;
    IntegratorDiagnostics local;
    LadderStepper stepper(params, out.size(), settings);
    stepper.run(out, tau_to, diagnostics ? *diagnostics : local, [](double, double) {});
    return out;
}

LadderRun integrate(const DimensionlessParams& params, double tau0, double tau_end,
                    std::span<const double> snapshot_times, const LadderSettings& settings,
                    const std::optional<AmplitudeState>& init) {
    check_settings(settings);
    if (!(tau0 < tau_end)) {
        throw ConfigError(fmt::format("tau0 ({}) must be below tau_end ({})", tau0, tau_end));
    }
    std::vector<double> times(snapshot_times.begin(), snapshot_times.end());
    std::sort(times.begin(), times.end());
    for (double t : times) {
        if (t < tau0 - 1e-12 || t > tau_end + 1e-12) {
            throw ConfigError(fmt::format("snapshot time {} outside [{}, {}]", t, tau0, tau_end));
        }
    }

    LadderRun run;
    run.params = params;
    run.tau0 = tau0;
    run.tau_end = tau_end;
    run.settings = settings;

    AmplitudeState state;
    if (init) {
        state = *init;
        state.tau = tau0;
        if (std::abs(state.norm() - 1.0) > 1e-10) {
            throw ConfigError(fmt::format("initial state norm {} is not 1", state.norm()));
        }
    } else {
        const int n = settings.basis_size > 0 ? settings.basis_size
                                              : default_basis_size(tau_end, params.p2(), params.p1());
        state = ground_state(n, tau0);
    }
    run.basis_size = state.size();
    run.settings.basis_size = run.basis_size;

    std::size_t next = 0;
    while (next < times.size() && times[next] <= tau0) {
        AmplitudeState snap = state;
        snap.tau = times[next];
        run.snapshots.push_back(std::move(snap));
        ++next;
    }

    LadderStepper stepper(params, state.size(), settings);
    std::vector<Complex> buf;
    stepper.run(state, tau_end, run.diagnostics, [&](double ta, double tb) {
        (void)ta;
        while (next < times.size() && times[next] <= tb) {
            AmplitudeState snap;
            snap.tau = times[next];
            if (times[next] >= tb) {
                snap.amplitudes = state.amplitudes;
            } else {
                stepper.interpolate(times[next], buf);
                snap.amplitudes = buf;
            }
            run.snapshots.push_back(std::move(snap));
            ++next;
        }
    });
    while (next < times.size()) {
        AmplitudeState snap = state;
        snap.tau = times[next];
        run.snapshots.push_back(std::move(snap));
        ++next;
    }
    return run;
}

}  // namespace chirplock
