#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <vector>

#include "chirplock/errors.hpp"
#include "chirplock/wigner.hpp"

using namespace chirplock;
using namespace chirplock::wigner;

namespace {

double sup_diff(const PhaseSpaceField& a, const PhaseSpaceField& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.values.size(); ++k) {
        m = std::max(m, std::abs(a.values[k] - b.values[k]));
    }
    return m;
}

double mean_x(const PhaseSpaceField& f) {
    double acc = 0.0;
    for (int i = 0; i < f.x.points; ++i)
        for (int j = 0; j < f.p.points; ++j) acc += f(i, j) * f.x.coord(i);
    return acc * f.cell_area();
}

double mean_p(const PhaseSpaceField& f) {
    double acc = 0.0;
    for (int i = 0; i < f.x.points; ++i)
        for (int j = 0; j < f.p.points; ++j) acc += f(i, j) * f.p.coord(j);
    return acc * f.cell_area();
}

PhaseSpaceField fill(const Axis& a, double (*fn)(double, double)) {
    PhaseSpaceField f(Frame::Rotating, a, a);
    for (int i = 0; i < a.points; ++i)
        for (int j = 0; j < a.points; ++j) f(i, j) = fn(a.coord(i), a.coord(j));
    return f;
}

FixedFrameConfig harmonic(double x_offset) {
    FixedFrameConfig c;
    c.scaling = {0.0, 0.0, 0.0, 2.0};
    c.x_offset = x_offset;
    c.sponge_fraction = 0.0;
    return c;
}

// Classical characteristics of the rotating-frame Liouville part:
// dQ/dtau = G_P, dP/dtau = -G_Q with G = (tau/2) R^2 - R^4/4 + mu Q.
struct Classical {
    double mu;
    void rhs(double tau, double q, double p, double& dq, double& dp) const {
        const double r2 = q * q + p * p;
        dq = (tau - r2) * p;
        dp = -((tau - r2) * q + mu);
    }
    void step(double tau, double h, double& q, double& p) const {
        double k1q, k1p, k2q, k2p, k3q, k3p, k4q, k4p;
        rhs(tau, q, p, k1q, k1p);
        rhs(tau + h / 2, q + h / 2 * k1q, p + h / 2 * k1p, k2q, k2p);
        rhs(tau + h / 2, q + h / 2 * k2q, p + h / 2 * k2p, k3q, k3p);
        rhs(tau + h, q + h * k3q, p + h * k3p, k4q, k4p);
        q += h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q);
        p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    }
};

}  // namespace

TEST_SUITE("wigner") {
    TEST_CASE("thermal initial states") {
        FixedFrameConfig fc;
        const auto f = initial_thermal(fc);
        CHECK(f.integral() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(f.variance_x() == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(f.variance_p() == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(f.negativity() == 0.0);

        RotatingFrameConfig rc;
        rc.lambda = 0.2;
        rc.sigma2 = 0.3;
        const auto g = initial_thermal(rc);
        CHECK(g.variance_x() == doctest::Approx(0.3).epsilon(1e-8));
        CHECK(g.frame == Frame::Rotating);

        fc.x = Axis::symmetric(3.0, 32);
        CHECK_THROWS_AS(initial_thermal(fc), GridTooSmall);
        rc.sigma2 = 0.05;  // below the uncertainty floor lambda / 2
        CHECK_THROWS_AS(initial_thermal(rc), ConfigError);
    }

    TEST_CASE("harmonic evolution is a rigid rotation") {
        auto c = harmonic(3.0);
        c.output_times = {std::numbers::pi / 2, 2 * std::numbers::pi};
        const auto f0 = initial_thermal(c);
        const auto run = evolve_fixed(c, f0);
        // a packet at x = 3 reaches u = -3 after a quarter period
        CHECK(mean_x(run.snapshots[0]) == doctest::Approx(0.0).epsilon(1e-8));
        CHECK(mean_p(run.snapshots[0]) == doctest::Approx(-3.0).epsilon(1e-8));
        CHECK(sup_diff(run.snapshots[1], f0) <= 1e-4);
        CHECK(sup_diff(run.snapshots[0], rotate(f0, std::numbers::pi / 2)) <= 1e-4);
        CHECK(run.diagnostics.max_norm_drift <= 1e-12);
    }

    TEST_CASE("time steps above the stability bound are rejected") {
        auto c = harmonic(0.0);
        c.scaling = {1e-4, 0.0067, 0.02, 2.0};
        c.output_times = {1.0};
        c.dt = 10.0 * fixed_step_bound(c);
        CHECK_THROWS_AS(evolve_fixed(c, initial_thermal(c)), CFLViolation);

        RotatingFrameConfig rc;
        rc.lambda = 0.1;
        rc.sigma2 = 0.1;
        rc.tau0 = -1.0;
        rc.output_taus = {0.0};
        rc.dt = 3.0 * rotating_step_bound(rc);
        CHECK_THROWS_AS(evolve_rotating(rc, initial_thermal(rc)), CFLViolation);
    }

    TEST_CASE("the quantum operator annihilates radial functions") {
        const auto a = Axis::symmetric(8.0, 96);
        const auto radial = fill(a, [](double q, double p) { return std::exp(-(q * q + p * p)); });
        const auto d0 = apply_quantum_operator(radial);
        CHECK(*std::max_element(d0.values.begin(), d0.values.end()) < 1e-9);
        CHECK(*std::min_element(d0.values.begin(), d0.values.end()) > -1e-9);

        // D [Q exp(-R^2/2)] = P (4 - R^2) exp(-R^2/2)
        const auto f = fill(a, [](double q, double p) { return q * std::exp(-(q * q + p * p) / 2); });
        const auto expect = fill(a, [](double q, double p) {
            const double r2 = q * q + p * p;
            return p * (4.0 - r2) * std::exp(-r2 / 2);
        });
        CHECK(sup_diff(apply_quantum_operator(f), expect) < 1e-8);
    }

    TEST_CASE("without drive the rotating-frame evolution commutes with rotations") {
        RotatingFrameConfig rc;
        rc.lambda = 0.1;
        rc.sigma2 = 0.1;
        rc.q_offset = 1.2;
        rc.tau0 = -2.0;
        rc.output_taus = {1.0};
        rc.q = rc.p = Axis::symmetric(4.0, 128);
        rc.sponge_fraction = 0.0;
        const auto f0 = initial_thermal(rc);
        const double theta = 0.7;
        auto mismatch = [&](double dt) {
            rc.dt = dt;
            const auto a = evolve_rotating(rc, rotate(f0, theta)).snapshots[0];
            CHECK(a.integral() == doctest::Approx(1.0).epsilon(1e-10));
            return sup_diff(a, rotate(evolve_rotating(rc, f0).snapshots[0], theta));
        };
        // Only the splitting error breaks the symmetry, so it shrinks with the step.
        const double coarse = mismatch(0.5 * rotating_step_bound(rc));
        const double fine = mismatch(0.25 * rotating_step_bound(rc));
        CHECK(coarse < 2e-3);
        CHECK(fine < 0.6 * coarse);
    }

    TEST_CASE("small lambda follows classical characteristics") {
        RotatingFrameConfig rc;
        rc.mu = 0.3;
        rc.lambda = 0.01;
        rc.sigma2 = 0.01;
        rc.q_offset = 0.8;
        rc.tau0 = -1.0;
        rc.output_taus = {1.0};
        rc.q = rc.p = Axis::symmetric(2.5, 160);
        rc.sponge_fraction = 0.0;
        const auto f0 = initial_thermal(rc);
        const auto f1 = evolve_rotating(rc, f0).snapshots[0];

        // Liouville transport of the same grid weights along exact characteristics.
        const Classical cl{rc.mu};
        const int steps = 400;
        const double h = 2.0 / steps;
        double mq = 0.0, mp = 0.0;
        for (int i = 0; i < f0.x.points; ++i) {
            for (int j = 0; j < f0.p.points; ++j) {
                const double w = f0(i, j);
                if (w < 1e-12) continue;
                double q = f0.x.coord(i), p = f0.p.coord(j);
                for (int s = 0; s < steps; ++s) cl.step(rc.tau0 + s * h, h, q, p);
                mq += w * q;
                mp += w * p;
            }
        }
        mq *= f0.cell_area();
        mp *= f0.cell_area();
        CHECK(mean_x(f1) == doctest::Approx(mq).epsilon(2e-3));
        CHECK(mean_p(f1) == doctest::Approx(mp).epsilon(2e-3));
    }

    TEST_CASE("separatrix geometry") {
        const auto branches = separatrix(0.01, 201, 1.5);
        REQUIRE(branches.size() == 5);
        const auto& loop = branches[0];
        double top = 0.0, right = 0.0, left = 0.0;
        for (const auto& pt : loop) {
            top = std::max(top, pt.upsilon);
            right = std::max(right, pt.xi);
            left = std::min(left, pt.xi);
            CHECK(std::abs(pt.upsilon) == doctest::Approx((1.0 - pt.xi * pt.xi) / std::sqrt(2.0)).epsilon(1e-12));
        }
        CHECK(top == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(right == doctest::Approx(1.0));
        CHECK(left == doctest::Approx(-1.0));
        CHECK_THROWS_AS(separatrix(0.0), ConfigError);
    }

    TEST_CASE("coarse graining preserves mass") {
        FixedFrameConfig c;
        const auto f = initial_thermal(c);
        const auto same = coarse_grain(f, f.x.spacing());
        CHECK(same.block == 1);
        CHECK(sup_diff(same.field, f) == 0.0);
        const auto cg = coarse_grain(f, 1.0);
        CHECK(cg.block == 5);
        CHECK(cg.field.integral() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(cg.negativity_after == 0.0);
        CHECK_THROWS_AS(coarse_grain(f, 0.01), ConfigError);
    }

    TEST_CASE("harmonic eigenstates and their projections") {
        const auto x = Axis::symmetric(12.0, 128);
        const auto es = quartic_eigenstates(x, 0.0, 2.0, 6);
        for (int n = 0; n < 6; ++n) {
            CHECK(es.energies[static_cast<std::size_t>(n)] == doctest::Approx(2.0 * (n + 0.5)).epsilon(1e-8));
        }
        FixedFrameConfig c;
        const auto pops = project_populations(initial_thermal(c), es, 2.0);
        CHECK(pops[0] == doctest::Approx(1.0).epsilon(1e-6));
        for (std::size_t n = 1; n < pops.size(); ++n) {
            CHECK(std::abs(pops[n]) < 1e-6);
        }
        // a displaced ground state is a coherent state with Poisson statistics
        c.x_offset = 2.0;
        const auto coh = project_populations(initial_thermal(c), es, 2.0);
        const double nbar = 1.0;  // |alpha|^2 = x0^2 / (2 hbar) with hbar = gamma = 2
        CHECK(coh[0] == doctest::Approx(std::exp(-nbar)).epsilon(1e-5));
        CHECK(coh[1] == doctest::Approx(nbar * std::exp(-nbar)).epsilon(1e-5));
    }

    TEST_CASE("quartic eigenvalues sit below the harmonic ones") {
        const auto x = Axis::symmetric(12.0, 128);
        const auto es = quartic_eigenstates(x, 0.004, 2.0, 10);
        for (int n = 1; n < 10; ++n) {
            CHECK(es.energies[static_cast<std::size_t>(n)] < 2.0 * (n + 0.5));
            const double gap = es.energies[static_cast<std::size_t>(n)] - es.energies[static_cast<std::size_t>(n - 1)];
            CHECK(gap < 2.0);
        }
    }
}
