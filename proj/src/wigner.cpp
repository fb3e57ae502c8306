#include "chirplock/wigner.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "chirplock/errors.hpp"
#include "fft.hpp"

namespace chirplock::wigner {

using detail::AxisFft;
using detail::cplx;
using detail::Fft2d;
using detail::wavenumber;

const char* to_string(Frame f) { return f == Frame::Fixed ? "fixed" : "rotating"; }

Axis Axis::symmetric(double half_width, int points) { return Axis{-half_width, half_width, points}; }

PhaseSpaceField::PhaseSpaceField(Frame frame_, Axis x_, Axis p_, double time_)
    : frame(frame_), x(x_), p(p_), time(time_),
      values(static_cast<std::size_t>(x_.points) * static_cast<std::size_t>(p_.points), 0.0) {}

double PhaseSpaceField::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * cell_area();
}

double PhaseSpaceField::negativity() const {
    double s = 0.0;
    for (double v : values) s += std::max(-v, 0.0);
    return s * cell_area();
}

namespace {

double variance_along(const PhaseSpaceField& f, bool along_x) {
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = 0; i < f.x.points; ++i) {
        for (int j = 0; j < f.p.points; ++j) {
            const double c = along_x ? f.x.coord(i) : f.p.coord(j);
            const double v = f(i, j);
            m0 += v;
            m1 += v * c;
            m2 += v * c * c;
        }
    }
    const double mean = m1 / m0;
    return m2 / m0 - mean * mean;
}

void check_axis(const Axis& a, const char* name) {
    if (a.points < 8 || a.points % 2 != 0 || !(a.max > a.min)) {
        throw ConfigError(fmt::format("{} axis needs an even number (>= 8) of points over a "
                                      "non-empty interval",
                                      name));
    }
}

// Mass of a normal distribution N(centre, sigma^2) outside [lo, hi).
double tail_mass(double lo, double hi, double centre, double sigma) {
    const double s = sigma * std::numbers::sqrt2;
    return 1.0 - 0.5 * (std::erf((hi - centre) / s) - std::erf((lo - centre) / s));
}

PhaseSpaceField gaussian(Frame frame, const Axis& x, const Axis& p, double time, double x0,
                         double p0, double sigma2) {
    const double sigma = std::sqrt(sigma2);
    const double outside = 1.0 - (1.0 - tail_mass(x.min, x.max, x0, sigma)) *
                                     (1.0 - tail_mass(p.min, p.max, p0, sigma));
    if (outside > 1e-8) {
        throw GridTooSmall(fmt::format("initial Gaussian (sigma = {:.4g}) leaves {:.3e} of its mass "
                                       "outside the grid",
                                       sigma, outside));
    }
    PhaseSpaceField f(frame, x, p, time);
    for (int i = 0; i < x.points; ++i) {
        const double dx = x.coord(i) - x0;
        for (int j = 0; j < p.points; ++j) {
            const double dp = p.coord(j) - p0;
            f(i, j) = std::exp(-(dx * dx + dp * dp) / (2.0 * sigma2)) /
                      (2.0 * std::numbers::pi * sigma2);
        }
    }
    const double norm = f.integral();
    for (double& v : f.values) v /= norm;
    return f;
}

// Per-axis absorbing profile: 0 inside, rising quadratically to 1 at the edge.
std::vector<double> edge_profile(const Axis& a, double fraction) {
    std::vector<double> prof(static_cast<std::size_t>(a.points), 0.0);
    const double band = fraction * a.period();
    if (band <= 0.0) return prof;
    for (int i = 0; i < a.points; ++i) {
        const double c = a.coord(i);
        const double depth = std::max(a.min + band - c, c - (a.max - band));
        if (depth > 0.0) {
            const double r = depth / band;
            prof[static_cast<std::size_t>(i)] = r * r;
        }
    }
    return prof;
}

// Shifts and phase multiplications of a field through batched axis FFTs.
class SpectralOps {
public:
    SpectralOps(const Axis& x, const Axis& p)
        : x_(x), p_(p), fx_(x.points, p.points, 0), fp_(x.points, p.points, 1) {
        kx_.resize(static_cast<std::size_t>(fx_.modes()));
        for (int m = 0; m < fx_.modes(); ++m) kx_[static_cast<std::size_t>(m)] = wavenumber(m, x.points, x.period());
        kp_.resize(static_cast<std::size_t>(fp_.modes()));
        for (int m = 0; m < fp_.modes(); ++m) kp_[static_cast<std::size_t>(m)] = wavenumber(m, p.points, p.period());
    }

    // f(x, p) <- f(x - a p, p)
    void shear_x(std::vector<double>& f, double a) {
        fx_.forward(f.data());
        cplx* s = fx_.spectrum();
        const int nyq = x_.points / 2;
        for (int m = 0; m < fx_.modes(); ++m) {
            const double k = kx_[static_cast<std::size_t>(m)];
            for (int j = 0; j < p_.points; ++j) {
                const double phase = -k * a * p_.coord(j);
                cplx& z = s[fx_.index(m, j)];
                z *= (m == nyq) ? cplx(std::cos(phase), 0.0) : std::polar(1.0, phase);
            }
        }
        fx_.backward(f.data());
    }

    // In the p-spectrum of each x row: multiply by exp(i phase(i, k)).
    template <class Phase>
    void p_phase(std::vector<double>& f, Phase&& phase) {
        fp_.forward(f.data());
        cplx* s = fp_.spectrum();
        const int nyq = p_.points / 2;
        for (int i = 0; i < x_.points; ++i) {
            for (int m = 0; m < fp_.modes(); ++m) {
                const double ph = phase(i, kp_[static_cast<std::size_t>(m)]);
                cplx& z = s[fp_.index(m, i)];
                z *= (m == nyq) ? cplx(std::cos(ph), 0.0) : std::polar(1.0, ph);
            }
        }
        fp_.backward(f.data());
    }

    // In the x-spectrum of each p column: multiply by exp(i phase(j, k)).
    template <class Phase>
    void x_phase(std::vector<double>& f, Phase&& phase) {
        fx_.forward(f.data());
        cplx* s = fx_.spectrum();
        const int nyq = x_.points / 2;
        for (int m = 0; m < fx_.modes(); ++m) {
            for (int j = 0; j < p_.points; ++j) {
                const double ph = phase(j, kx_[static_cast<std::size_t>(m)]);
                cplx& z = s[fx_.index(m, j)];
                z *= (m == nyq) ? cplx(std::cos(ph), 0.0) : std::polar(1.0, ph);
            }
        }
        fx_.backward(f.data());
    }

    // f(x, p) <- f(x, p - b x)
    void shear_p(std::vector<double>& f, double b) {
        p_phase(f, [&](int i, double k) { return -k * b * x_.coord(i); });
    }

private:
    Axis x_, p_;
    AxisFft fx_, fp_;
    std::vector<double> kx_, kp_;
};

void rotate_in_place(SpectralOps& ops, std::vector<double>& f, double theta) {
    ops.shear_x(f, std::tan(0.5 * theta));
    ops.shear_p(f, -std::sin(theta));
    ops.shear_x(f, std::tan(0.5 * theta));
}

bool is_symmetric(const Axis& a) { return std::abs(a.min + a.max) <= 1e-12 * a.period(); }

std::vector<double> sorted_outputs(std::vector<double> times, double start, const char* name) {
    std::sort(times.begin(), times.end());
    for (double t : times) {
        if (t < start - 1e-12) {
            throw ConfigError(fmt::format("{} {} precedes the start time {}", name, t, start));
        }
    }
    return times;
}

void record(WignerDiagnostics& d, double t, const std::vector<double>& f, double area,
            double absorbed, double mass0) {
    double mass = 0.0, neg = 0.0;
    for (double v : f) {
        mass += v;
        neg += std::max(-v, 0.0);
    }
    mass *= area;
    neg *= area;
    d.series.push_back({t, mass, absorbed, neg});
    d.max_norm_drift = std::max(d.max_norm_drift, std::abs(mass + absorbed - mass0));
}

void check_field(const PhaseSpaceField& f0, Frame frame, const Axis& x, const Axis& p) {
    if (f0.frame != frame) {
        throw ConfigError(fmt::format("initial field is in the {} frame, expected {}",
                                      to_string(f0.frame), to_string(frame)));
    }
    if (f0.x.points != x.points || f0.p.points != p.points || f0.x.min != x.min ||
        f0.x.max != x.max || f0.p.min != p.min || f0.p.max != p.max) {
        throw ConfigError("initial field grid differs from the configured grid");
    }
}

}  // namespace

double PhaseSpaceField::variance_x() const { return variance_along(*this, true); }
double PhaseSpaceField::variance_p() const { return variance_along(*this, false); }

double PhaseSpaceField::mass_outside(double radius) const {
    double s = 0.0;
    const double r2 = radius * radius;
    for (int i = 0; i < x.points; ++i) {
        const double xi = x.coord(i);
        for (int j = 0; j < p.points; ++j) {
            const double pj = p.coord(j);
            if (xi * xi + pj * pj > r2) s += (*this)(i, j);
        }
    }
    return s * cell_area();
}

double fixed_time(double tau, double alpha_bar) {
    if (!(alpha_bar > 0.0)) {
        throw ConfigError("alpha_bar must be positive to convert slow time");
    }
    return tau / std::sqrt(alpha_bar);
}

PhaseSpaceField initial_thermal(const FixedFrameConfig& c) {
    check_axis(c.x, "x");
    check_axis(c.u, "u");
    return gaussian(Frame::Fixed, c.x, c.u, c.t0, c.x_offset, c.u_offset, 1.0);
}

PhaseSpaceField initial_thermal(const RotatingFrameConfig& c) {
    check_axis(c.q, "Q");
    check_axis(c.p, "P");
    if (!(c.lambda > 0.0) || c.sigma2 < 0.5 * c.lambda * (1.0 - 1e-12)) {
        throw ConfigError(fmt::format("need lambda > 0 and sigma2 >= lambda/2 (lambda = {}, sigma2 = {})",
                                      c.lambda, c.sigma2));
    }
    return gaussian(Frame::Rotating, c.q, c.p, c.tau0, c.q_offset, c.p_offset, c.sigma2);
}

RotatingFrameConfig RotatingFrameConfig::from_params(const DimensionlessParams& d, double tau0,
                                                     std::vector<double> output_taus) {
    RotatingFrameConfig c;
    c.mu = d.mu();
    c.lambda = d.lambda();
    c.sigma2 = d.sigma2();
    c.tau0 = tau0;
    c.output_taus = std::move(output_taus);
    return c;
}

// ---------------------------------------------------------------------------
// Fixed frame

namespace {
const double kYoshidaOuter = 1.0 / (2.0 - std::cbrt(2.0));
const double kYoshidaMiddle = 1.0 - 2.0 * kYoshidaOuter;
}  // namespace

double fixed_step_bound(const FixedFrameConfig& c) {
    const double xmax = std::max(std::abs(c.x.min), std::abs(c.x.max));
    const double umax = std::max(std::abs(c.u.min), std::abs(c.u.max));
    const double force = xmax + c.scaling.beta_bar * xmax * xmax * xmax + c.scaling.eps_bar;
    // Per-substep phase-space displacement stays below half the grid, and the
    // oscillator period is resolved by at least 10 substeps.
    const double sub = std::min({2.0 * std::numbers::pi / 10.0, 0.5 * c.x.period() / umax,
                                 0.5 * c.u.period() / force});
    return c.splitting_order == 4 ? sub / std::abs(kYoshidaMiddle) : sub;
}

namespace {

// Strang-split step for the fixed frame. The harmonic flow is the exact rotation
// Sx(a) Su(b) Sx(a), a = tan(h/2), b = -sin h; the u-shear shares its FFT pass
// with the anharmonic and drive kick. Trailing and leading x-shears of
// consecutive steps are fused, so the field is only "complete" after flush().
class FixedStepper {
public:
    FixedStepper(const FixedFrameConfig& c)
        : c_(c), nx_(c.x.points), nu_(c.u.points), fx_(nx_, nu_, 0), fu_(nx_, nu_, 1) {
        for (int m = 0; m < fx_.modes(); ++m) kx_.push_back(wavenumber(m, nx_, c.x.period()));
        for (int m = 0; m < fu_.modes(); ++m) ku_.push_back(wavenumber(m, nu_, c.u.period()));
    }

    void step(std::vector<double>& f, double h, double drive) {
        shear_x(f, pending_ + std::tan(0.5 * h));
        pending_ = std::tan(0.5 * h);
        kick(f, h, drive);
    }

    void flush(std::vector<double>& f) {
        if (pending_ != 0.0) shear_x(f, pending_);
        pending_ = 0.0;
    }

private:
    struct ShearTable {
        double a = std::numeric_limits<double>::quiet_NaN();
        std::vector<cplx> phase;
    };

    const std::vector<cplx>& shear_table(double a) {
        for (auto& t : shear_cache_) {
            if (t.a == a) return t.phase;
        }
        auto& t = shear_cache_[next_slot_];
        next_slot_ = (next_slot_ + 1) % shear_cache_.size();
        t.a = a;
        t.phase.resize(static_cast<std::size_t>(fx_.modes()) * static_cast<std::size_t>(nu_));
        const int nyq = nx_ / 2;
        for (int m = 0; m < fx_.modes(); ++m) {
            for (int j = 0; j < nu_; ++j) {
                const double ph = -kx_[static_cast<std::size_t>(m)] * a * c_.u.coord(j);
                t.phase[fx_.index(m, j)] = m == nyq ? cplx(std::cos(ph), 0.0) : std::polar(1.0, ph);
            }
        }
        return t.phase;
    }

    // f(x, u) <- f(x - a u, u)
    void shear_x(std::vector<double>& f, double a) {
        const auto& tab = shear_table(a);
        fx_.forward(f.data());
        cplx* s = fx_.spectrum();
        for (std::size_t k = 0; k < tab.size(); ++k) s[k] *= tab[k];
        fx_.backward(f.data());
    }

    // Time-independent part of the u-pass phase for step h:
    // -k b x - (2 h beta / gamma)(x^3 y + x y^3), y = gamma k / 2.
    struct KickTable {
        double h = std::numeric_limits<double>::quiet_NaN();
        std::vector<double> phase;
        std::vector<cplx> factor;
    };

    void select_kick(double h) {
        for (std::size_t k = 0; k < kick_cache_.size(); ++k) {
            if (kick_cache_[k].h == h) {
                kick_ = &kick_cache_[k];
                return;
            }
        }
        kick_ = &kick_cache_[next_kick_];
        next_kick_ = (next_kick_ + 1) % kick_cache_.size();
        build_kick(h);
    }

    void build_kick(double h) {
        auto& kick_phase_ = kick_->phase;
        auto& kick_table_ = kick_->factor;
        kick_->h = h;
        const double b = -std::sin(h);
        const double g = c_.scaling.gamma;
        const double beta = c_.scaling.beta_bar;
        kick_phase_.resize(static_cast<std::size_t>(fu_.modes()) * static_cast<std::size_t>(nx_));
        for (int m = 0; m < fu_.modes(); ++m) {
            const double k = ku_[static_cast<std::size_t>(m)];
            const double y = 0.5 * g * k;
            for (int i = 0; i < nx_; ++i) {
                const double x = c_.x.coord(i);
                kick_phase_[fu_.index(m, i)] =
                    -k * b * x - 2.0 * h * beta * (x * x * x * y + x * y * y * y) / g;
            }
        }
        kick_table_.resize(kick_phase_.size());
        for (std::size_t k = 0; k < kick_phase_.size(); ++k) kick_table_[k] = std::polar(1.0, kick_phase_[k]);
    }

    void kick(std::vector<double>& f, double h, double drive) {
        select_kick(h);
        fu_.forward(f.data());
        cplx* s = fu_.spectrum();
        const int nyq = nu_ / 2;
        const int modes = fu_.modes();
        // drive part: h * 2 drive y / gamma = h drive k
        drive_.resize(static_cast<std::size_t>(modes));
        for (int m = 0; m < modes; ++m) drive_[static_cast<std::size_t>(m)] = std::polar(1.0, h * drive * ku_[static_cast<std::size_t>(m)]);
        for (int i = 0; i < nx_; ++i) {
            for (int m = 0; m < modes; ++m) {
                const std::size_t k = fu_.index(m, i);
                if (m == nyq) {
                    s[k] *= std::cos(kick_->phase[k] + h * drive * ku_[static_cast<std::size_t>(m)]);
                } else {
                    s[k] *= kick_->factor[k] * drive_[static_cast<std::size_t>(m)];
                }
            }
        }
        fu_.backward(f.data());
    }

    FixedFrameConfig c_;
    int nx_, nu_;
    AxisFft fx_, fu_;
    std::vector<double> kx_, ku_;
    std::array<ShearTable, 6> shear_cache_{};
    std::size_t next_slot_ = 0;
    double pending_ = 0.0;
    std::array<KickTable, 4> kick_cache_{};
    KickTable* kick_ = nullptr;
    std::size_t next_kick_ = 0;
    std::vector<cplx> drive_;
};

}  // namespace

WignerRun evolve_fixed(const FixedFrameConfig& c, const PhaseSpaceField& f0) {
    check_axis(c.x, "x");
    check_axis(c.u, "u");
    check_field(f0, Frame::Fixed, c.x, c.u);
    const auto& s = c.scaling;
    if (!(s.gamma > 0.0 && s.gamma <= 2.0)) {
        throw ConfigError(fmt::format("gamma must lie in (0, 2] (got {})", s.gamma));
    }
    if (s.beta_bar < 0.0 || s.alpha_bar < 0.0 || s.eps_bar < 0.0) {
        throw ConfigError("alpha_bar, beta_bar and eps_bar must be non-negative");
    }
    if (!(c.dt > 0.0)) {
        throw ConfigError("dt must be positive");
    }
    if (c.splitting_order != 2 && c.splitting_order != 4) {
        throw ConfigError(fmt::format("splitting_order must be 2 or 4 (got {})", c.splitting_order));
    }
    const double bound = fixed_step_bound(c);
    if (c.dt > bound) {
        throw CFLViolation(fmt::format("dt = {} exceeds the admissible step {:.6g}", c.dt, bound), bound);
    }
    const auto outputs = sorted_outputs(c.output_times, c.t0, "output time");

    WignerRun run;
    auto& diag = run.diagnostics;
    diag.step = c.dt;
    diag.step_bound = bound;

    std::vector<double> f = f0.values;
    const double area = f0.cell_area();
    double mass0 = 0.0;
    for (double v : f) mass0 += v;
    mass0 *= area;

    FixedStepper stepper(c);
    const auto prof_x = edge_profile(c.x, c.sponge_fraction);
    const auto prof_u = edge_profile(c.u, c.sponge_fraction);
    const int nx = c.x.points;
    const int nu = c.u.points;
    const bool sponge = c.sponge_fraction > 0.0 && c.sponge_rate > 0.0;
    auto drive_phase = [&](double t) { return t - 0.5 * s.alpha_bar * t * t; };

    double t = c.t0;
    double absorbed = 0.0;
    std::size_t next = 0;
    auto emit = [&] {
        if (next >= outputs.size() || outputs[next] > t + 1e-9) return;
        stepper.flush(f);
        while (next < outputs.size() && outputs[next] <= t + 1e-9) {
            PhaseSpaceField snap(Frame::Fixed, c.x, c.u, outputs[next]);
            snap.values = f;
            run.snapshots.push_back(std::move(snap));
            record(diag, outputs[next], f, area, absorbed, mass0);
            ++next;
        }
    };
    emit();

    std::vector<double> mask(f.size());
    double mask_dt = -1.0;
    long step = 0;
    while (next < outputs.size()) {
        double h = c.dt;
        const double remaining = outputs[next] - t;
        if (remaining < h * (1.0 + 1e-9)) h = remaining;

        if (c.splitting_order == 4) {
            double ts = t;
            for (double w : {kYoshidaOuter, kYoshidaMiddle, kYoshidaOuter}) {
                stepper.step(f, w * h, s.eps_bar * std::cos(drive_phase(ts + 0.5 * w * h)));
                ts += w * h;
            }
        } else {
            stepper.step(f, h, s.eps_bar * std::cos(drive_phase(t + 0.5 * h)));
        }

        if (sponge) {
            if (h != mask_dt) {
                for (int i = 0; i < nx; ++i)
                    for (int j = 0; j < nu; ++j)
                        mask[static_cast<std::size_t>(i * nu + j)] =
                            std::exp(-c.sponge_rate * h *
                                     (prof_x[static_cast<std::size_t>(i)] + prof_u[static_cast<std::size_t>(j)]));
                mask_dt = h;
            }
            double removed = 0.0;
            for (std::size_t k = 0; k < f.size(); ++k) {
                removed += f[k] * (1.0 - mask[k]);
                f[k] *= mask[k];
            }
            absorbed += removed * area;
        }

        t += h;
        ++step;
        if (std::abs(t - outputs[next]) < 1e-9 * std::max(1.0, std::abs(t))) t = outputs[next];
        if (c.series_every > 0 && step % c.series_every == 0) {
            // interior mass is insensitive to the pending x-shear only up to wrap-around,
            // so sample the completed field
            stepper.flush(f);
            record(diag, t, f, area, absorbed, mass0);
        }
        emit();
    }
    diag.steps = step;
    diag.absorbed_mass = absorbed;
    return run;
}

// ---------------------------------------------------------------------------
// Rotating frame

namespace {

// -R^4/4 = -(Q^4 + P^4 + s^4 + d^4)/6 with (s, -d) the coordinates rotated by
// pi/4, so the quartic flow splits into one-axis kicks, each exact including
// the quantum correction (effective hbar = lambda).
class RotatingStepper {
public:
    RotatingStepper(const RotatingFrameConfig& c) : c_(c), ops_(c.q, c.p) {}

    void step(std::vector<double>& f, double h, double tau_mid) {
        const double theta = tau_mid * h;
        kick_q(f, pending_ + 0.25 * h, c_.mu);
        kick_p(f, 0.5 * h);
        kick_q(f, 0.25 * h, c_.mu);
        rotate_in_place(ops_, f, 0.5 * theta + kQuarter);
        kick_q(f, 0.5 * h, 0.0);
        kick_p(f, h);
        kick_q(f, 0.5 * h, 0.0);
        rotate_in_place(ops_, f, 0.5 * theta - kQuarter);
        kick_q(f, 0.25 * h, c_.mu);
        kick_p(f, 0.5 * h);
        pending_ = 0.25 * h;
    }

    void flush(std::vector<double>& f) {
        if (pending_ != 0.0) kick_q(f, pending_, c_.mu);
        pending_ = 0.0;
    }

private:
    static constexpr double kQuarter = 0.25 * std::numbers::pi;

    // Potential -Q^4/6 + mu Q acting for time h: phase h [V(Q+y) - V(Q-y)] / hbar.
    void kick_q(std::vector<double>& f, double h, double mu) {
        const double hb = c_.lambda;
        ops_.p_phase(f, [&](int i, double k) {
            const double q = c_.q.coord(i);
            const double y = 0.5 * hb * k;
            return h * (-(4.0 / 3.0) * (q * q * q * y + q * y * y * y) + 2.0 * mu * y) / hb;
        });
    }

    // Kinetic-like term -P^4/6: phase -h [K(P+y) - K(P-y)] / hbar.
    void kick_p(std::vector<double>& f, double h) {
        const double hb = c_.lambda;
        ops_.x_phase(f, [&](int j, double k) {
            const double p = c_.p.coord(j);
            const double y = 0.5 * hb * k;
            return h * (4.0 / 3.0) * (p * p * p * y + p * y * y * y) / hb;
        });
    }

    RotatingFrameConfig c_;
    SpectralOps ops_;
    double pending_ = 0.0;
};

double max_abs_tau(const RotatingFrameConfig& c) {
    double m = std::abs(c.tau0);
    for (double t : c.output_taus) m = std::max(m, std::abs(t));
    return m;
}

}  // namespace

double rotating_step_bound(const RotatingFrameConfig& c) {
    check_axis(c.q, "Q");
    check_axis(c.p, "P");
    const double half = std::max({std::abs(c.q.min), std::abs(c.q.max), std::abs(c.p.min), std::abs(c.p.max)});
    // Per-step rotation of the harmonic part and of the quartic twist at the grid
    // edge stays below pi/8.
    return 0.125 * std::numbers::pi / std::max({max_abs_tau(c), half * half, 1.0});
}

WignerRun evolve_rotating(const RotatingFrameConfig& c, const PhaseSpaceField& f0) {
    check_axis(c.q, "Q");
    check_axis(c.p, "P");
    check_field(f0, Frame::Rotating, c.q, c.p);
    if (!is_symmetric(c.q) || c.q.min != c.p.min || c.q.max != c.p.max || c.q.points != c.p.points) {
        throw ConfigError("rotating-frame Q and P axes must be identical and symmetric about zero");
    }
    if (!(c.lambda > 0.0) || !(c.mu >= 0.0)) {
        throw ConfigError("need lambda > 0 and mu >= 0");
    }
    if (!(c.sponge_fraction >= 0.0 && c.sponge_fraction < 0.5)) {
        throw ConfigError("sponge_fraction must lie in [0, 0.5)");
    }
    if (c.splitting_order != 2 && c.splitting_order != 4) {
        throw ConfigError(fmt::format("splitting_order must be 2 or 4 (got {})", c.splitting_order));
    }
    const auto outputs = sorted_outputs(c.output_taus, c.tau0, "output tau");
    const double bound = rotating_step_bound(c);
    const double dt = c.dt > 0.0 ? c.dt : 0.5 * bound;
    const double largest_sub = c.splitting_order == 4 ? dt * std::abs(kYoshidaMiddle) : dt;
    if (largest_sub > bound) {
        throw CFLViolation(fmt::format("dt = {} exceeds the admissible step {:.6g}", dt, bound),
                           c.splitting_order == 4 ? bound / std::abs(kYoshidaMiddle) : bound);
    }

    WignerRun run;
    auto& diag = run.diagnostics;
    diag.step = dt;
    diag.step_bound = bound;

    std::vector<double> g = f0.values;
    const double area = f0.cell_area();
    double mass0 = 0.0;
    for (double v : g) mass0 += v;
    mass0 *= area;

    // Radial sponge beyond (1 - sponge_fraction) of the half-width.
    const double half = c.q.max;
    const double r_inner = (1.0 - c.sponge_fraction) * half;
    std::vector<double> damp(g.size(), 0.0);
    if (c.sponge_fraction > 0.0) {
        for (int i = 0; i < c.q.points; ++i) {
            for (int j = 0; j < c.p.points; ++j) {
                const double r = std::hypot(c.q.coord(i), c.p.coord(j));
                if (r > r_inner) {
                    const double s = (r - r_inner) / (half - r_inner);
                    damp[static_cast<std::size_t>(i * c.p.points + j)] = c.sponge_rate * s * s;
                }
            }
        }
    }

    RotatingStepper stepper(c);
    double tau = c.tau0;
    double absorbed = 0.0;
    std::size_t next = 0;
    auto emit = [&] {
        if (next >= outputs.size() || outputs[next] > tau + 1e-9) return;
        stepper.flush(g);
        while (next < outputs.size() && outputs[next] <= tau + 1e-9) {
            PhaseSpaceField snap(Frame::Rotating, c.q, c.p, outputs[next]);
            snap.values = g;
            run.snapshots.push_back(std::move(snap));
            record(diag, outputs[next], g, area, absorbed, mass0);
            ++next;
        }
    };
    emit();

    long step = 0;
    while (next < outputs.size()) {
        double h = dt;
        const double remaining = outputs[next] - tau;
        if (remaining < h * (1.0 + 1e-9)) h = remaining;

        if (c.splitting_order == 4) {
            double ts = tau;
            for (double w : {kYoshidaOuter, kYoshidaMiddle, kYoshidaOuter}) {
                stepper.step(g, w * h, ts + 0.5 * w * h);
                ts += w * h;
            }
        } else {
            stepper.step(g, h, tau + 0.5 * h);
        }
        if (c.sponge_fraction > 0.0 && c.sponge_rate > 0.0) {
            double removed = 0.0;
            for (std::size_t k = 0; k < g.size(); ++k) {
                if (damp[k] > 0.0) {
                    const double m = std::exp(-damp[k] * h);
                    removed += g[k] * (1.0 - m);
                    g[k] *= m;
                }
            }
            absorbed += removed * area;
        }

        tau += h;
        ++step;
        if (std::abs(tau - outputs[next]) < 1e-9 * std::max(1.0, std::abs(tau))) tau = outputs[next];
        if (c.series_every > 0 && step % c.series_every == 0) {
            stepper.flush(g);
            record(diag, tau, g, area, absorbed, mass0);
        }
        emit();
    }
    diag.steps = step;
    diag.absorbed_mass = absorbed;
    return run;
}

PhaseSpaceField apply_quantum_operator(const PhaseSpaceField& f) {
    const int nq = f.x.points, np = f.p.points;
    const int modes = np / 2 + 1;
    Fft2d fft(nq, np);
    std::vector<double> lap(f.values.size()), out(f.values.size());
    std::vector<double> kq(static_cast<std::size_t>(nq)), kp(static_cast<std::size_t>(modes));
    for (int a = 0; a < nq; ++a) kq[static_cast<std::size_t>(a)] = wavenumber(a, nq, f.x.period());
    for (int m = 0; m < modes; ++m) kp[static_cast<std::size_t>(m)] = wavenumber(m, np, f.p.period());
    auto idx = [&](int a, int m) { return static_cast<std::size_t>(a * modes + m); };

    fft.forward(f.values.data());
    cplx* s = fft.spectrum();
    for (int a = 0; a < nq; ++a)
        for (int m = 0; m < modes; ++m)
            s[idx(a, m)] *= -(kq[static_cast<std::size_t>(a)] * kq[static_cast<std::size_t>(a)] +
                              kp[static_cast<std::size_t>(m)] * kp[static_cast<std::size_t>(m)]);
    fft.backward(lap.data());

    // D f = d/dP (Q L) - d/dQ (P L)
    std::vector<double> ql(lap.size()), pl(lap.size());
    for (int i = 0; i < nq; ++i)
        for (int j = 0; j < np; ++j) {
            const std::size_t k = static_cast<std::size_t>(i * np + j);
            ql[k] = f.x.coord(i) * lap[k];
            pl[k] = f.p.coord(j) * lap[k];
        }
    fft.forward(pl.data());
    std::vector<cplx> spec_pl(fft.spectrum(), fft.spectrum() + static_cast<std::size_t>(nq * modes));
    fft.forward(ql.data());
    s = fft.spectrum();
    for (int a = 0; a < nq; ++a) {
        const double kqa = a == nq / 2 ? 0.0 : kq[static_cast<std::size_t>(a)];
        for (int m = 0; m < modes; ++m) {
            const double kpm = m == np / 2 ? 0.0 : kp[static_cast<std::size_t>(m)];
            const std::size_t k = idx(a, m);
            s[k] = cplx(0.0, 1.0) * (kpm * s[k] - kqa * spec_pl[k]);
        }
    }
    fft.backward(out.data());
    PhaseSpaceField r(f.frame, f.x, f.p, f.time);
    r.values = std::move(out);
    return r;
}

PhaseSpaceField rotate(const PhaseSpaceField& f, double theta) {
    PhaseSpaceField out = f;
    SpectralOps ops(f.x, f.p);
    double th = std::remainder(theta, 2.0 * std::numbers::pi);
    if (std::abs(th) > 0.5 * std::numbers::pi) {
        rotate_in_place(ops, out.values, 0.5 * th);
        rotate_in_place(ops, out.values, 0.5 * th);
    } else {
        rotate_in_place(ops, out.values, th);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Separatrix and coarse graining

std::vector<Polyline> separatrix(double beta_bar, int points, double xi_max) {
    if (!(beta_bar > 0.0)) {
        throw ConfigError(fmt::format("beta_bar must be positive (got {})", beta_bar));
    }
    if (points < 3) {
        throw ConfigError("separatrix needs at least 3 points per branch");
    }
    const double k = 1.0 / std::numbers::sqrt2;
    auto ups = [k](double xi) { return k * (1.0 - xi * xi); };
    std::vector<Polyline> out;

    Polyline loop;
    for (int i = 0; i < points; ++i) {
        const double xi = -1.0 + 2.0 * i / (points - 1);
        loop.push_back({xi, ups(xi)});
    }
    for (int i = 1; i < points; ++i) {
        const double xi = 1.0 - 2.0 * i / (points - 1);
        loop.push_back({xi, -ups(xi)});
    }
    out.push_back(std::move(loop));

    if (xi_max > 1.0) {
        for (double side : {1.0, -1.0}) {
            for (double sign : {1.0, -1.0}) {
                Polyline branch;
                for (int i = 0; i < points; ++i) {
                    const double xi = side * (1.0 + (xi_max - 1.0) * i / (points - 1));
                    branch.push_back({xi, sign * ups(xi)});
                }
                out.push_back(std::move(branch));
            }
        }
    }
    return out;
}

CoarseGrained coarse_grain(const PhaseSpaceField& f, double cell) {
    if (!(cell >= f.x.spacing() * (1.0 - 1e-9))) {
        throw ConfigError(fmt::format("cell {} is smaller than the grid spacing {}", cell, f.x.spacing()));
    }
    const int bx = std::max(1, static_cast<int>(std::lround(cell / f.x.spacing())));
    const int bp = std::max(1, static_cast<int>(std::lround(cell / f.p.spacing())));
    CoarseGrained r;
    r.block = bx;
    r.negativity_before = f.negativity();
    r.field = f;
    for (int i0 = 0; i0 < f.x.points; i0 += bx) {
        const int i1 = std::min(f.x.points, i0 + bx);
        for (int j0 = 0; j0 < f.p.points; j0 += bp) {
            const int j1 = std::min(f.p.points, j0 + bp);
            double sum = 0.0;
            for (int i = i0; i < i1; ++i)
                for (int j = j0; j < j1; ++j) sum += f(i, j);
            const double mean = sum / ((i1 - i0) * (j1 - j0));
            for (int i = i0; i < i1; ++i)
                for (int j = j0; j < j1; ++j) r.field(i, j) = mean;
        }
    }
    r.negativity_after = r.field.negativity();
    return r;
}

// ---------------------------------------------------------------------------
// Quartic-well eigenstates and level populations

Eigenstates quartic_eigenstates(const Axis& x, double beta_bar, double gamma, int count) {
    check_axis(x, "x");
    if (beta_bar < 0.0 || !(gamma > 0.0) || count < 1) {
        throw ConfigError("eigenstates need beta_bar >= 0, gamma > 0 and count >= 1");
    }
    Eigenstates out;
    out.fine = Axis{x.min, x.max, 2 * x.points};
    const double d = out.fine.spacing();
    // Inside the barrier at |x| = 1/sqrt(beta) only; outside, states are zero.
    const double wall = beta_bar > 0.0 ? 1.0 / std::sqrt(beta_bar) : std::numeric_limits<double>::infinity();
    std::vector<int> inside;
    for (int k = 0; k < out.fine.points; ++k) {
        if (std::abs(out.fine.coord(k)) < wall) inside.push_back(k);
    }
    const int n = static_cast<int>(inside.size());
    if (count > n) {
        throw ConfigError("more eigenstates requested than grid points inside the well");
    }
    Eigen::MatrixXd h(n, n);
    const double tscale = 0.5 * gamma * gamma / (d * d);
    const double pi2 = std::numbers::pi * std::numbers::pi;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const int diff = inside[static_cast<std::size_t>(a)] - inside[static_cast<std::size_t>(b)];
            h(a, b) = diff == 0 ? tscale * pi2 / 3.0
                                : tscale * 2.0 * ((diff % 2 == 0) ? 1.0 : -1.0) / (diff * diff);
        }
        const double xv = out.fine.coord(inside[static_cast<std::size_t>(a)]);
        h(a, a) += 0.5 * xv * xv - 0.25 * beta_bar * xv * xv * xv * xv;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) {
        throw Error("eigenvalue solver failed");
    }
    for (int s = 0; s < count; ++s) {
        out.energies.push_back(solver.eigenvalues()(s));
        std::vector<double> psi(static_cast<std::size_t>(out.fine.points), 0.0);
        double norm = 0.0;
        for (int a = 0; a < n; ++a) {
            const double v = solver.eigenvectors()(a, s);
            psi[static_cast<std::size_t>(inside[static_cast<std::size_t>(a)])] = v;
            norm += v * v;
        }
        // Fix the sign so the state is positive to the right of the well centre.
        double orient = 0.0;
        for (int k = 0; k < out.fine.points; ++k) orient += psi[static_cast<std::size_t>(k)] * (out.fine.coord(k) + 1e-3);
        const double scale = (orient < 0.0 ? -1.0 : 1.0) / std::sqrt(norm * d);
        for (double& v : psi) v *= scale;
        out.states.push_back(std::move(psi));
    }
    return out;
}

std::vector<double> project_populations(const PhaseSpaceField& f, const Eigenstates& st, double gamma) {
    if (st.fine.points != 2 * f.x.points || std::abs(st.fine.min - f.x.min) > 1e-12 ||
        std::abs(st.fine.max - f.x.max) > 1e-12) {
        throw ConfigError("eigenstates were computed on a different x grid");
    }
    const int nx = f.x.points, np = f.p.points, nf = st.fine.points;
    const double d = st.fine.spacing();
    const int mmax = nf;
    // F_i(m) = sum_j f_ij cos(2 u_j m d / gamma)
    std::vector<double> fm(static_cast<std::size_t>(nx) * static_cast<std::size_t>(mmax), 0.0);
    for (int i = 0; i < nx; ++i) {
        const int centre = 2 * i;
        const int reach = std::min(centre, nf - 1 - centre);
        for (int m = 0; m <= reach; ++m) {
            double acc = 0.0;
            for (int j = 0; j < np; ++j) acc += f(i, j) * std::cos(2.0 * f.p.coord(j) * m * d / gamma);
            fm[static_cast<std::size_t>(i) * static_cast<std::size_t>(mmax) + static_cast<std::size_t>(m)] = acc;
        }
    }
    std::vector<double> pops;
    const double pref = 2.0 * f.cell_area() * d;
    for (const auto& psi : st.states) {
        double s = 0.0;
        for (int i = 0; i < nx; ++i) {
            const int centre = 2 * i;
            const int reach = std::min(centre, nf - 1 - centre);
            const double* row = &fm[static_cast<std::size_t>(i) * static_cast<std::size_t>(mmax)];
            double acc = psi[static_cast<std::size_t>(centre)] * psi[static_cast<std::size_t>(centre)] * row[0];
            for (int m = 1; m <= reach; ++m) {
                acc += 2.0 * psi[static_cast<std::size_t>(centre + m)] * psi[static_cast<std::size_t>(centre - m)] * row[m];
            }
            s += acc;
        }
        pops.push_back(pref * s);
    }
    return pops;
}

}  // namespace chirplock::wigner
