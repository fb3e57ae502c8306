#include <doctest.h>

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <vector>

#include "chirplock/errors.hpp"
#include "chirplock/ladder.hpp"

using namespace chirplock;

namespace {

LadderSettings two_level() {
    LadderSettings s;
    s.basis_size = 2;
    s.guard_levels = 0;
    return s;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

}  // namespace

TEST_SUITE("ladder") {
    TEST_CASE("level detunings and the resonant level") {
        CHECK(gamma_n(0, 3.0, 2.0) == 0.0);
        CHECK(gamma_n(2, 5.0, 2.0) == doctest::Approx(2.0 * (5.0 - 3.0)));
        // Gamma_n = Gamma_{n-1} exactly when tau = n P2
        CHECK(gamma_n(4, 4 * 1.5, 1.5) == doctest::Approx(gamma_n(3, 4 * 1.5, 1.5)));
        CHECK(resonant_level(-3.0, 1.0) == 0);
        CHECK(resonant_level(29.0, 8.0) == 4);
        CHECK(default_basis_size(30.0, 8.0, 0.8) == 4 + 20);
    }

    TEST_CASE("zero drive leaves the ground state in place") {
        const auto d = DimensionlessParams::make(0.0, 1.0);
        const std::vector<double> times{5.0};
        const auto run = integrate(d, -5.0, 5.0, times);
        const auto pops = run.at(5.0).populations();
        CHECK(pops[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(run.diagnostics.max_norm_drift <= 1e-12);
    }

    TEST_CASE("two levels reproduce the Landau-Zener formula") {
        for (double p1 : {0.3, 0.8, 1.5}) {
            const auto d = DimensionlessParams::make(p1, 1.0);
            const std::vector<double> times{300.0};
            const auto run = integrate(d, -300.0, 300.0, times, two_level());
            const double expected = 1.0 - std::exp(-std::numbers::pi * p1 * p1 / 2.0);
            CHECK(run.at(300.0).populations()[1] == doctest::Approx(expected).epsilon(1e-2));
        }
    }

    TEST_CASE("interaction picture and plain integration agree") {
        const auto d = DimensionlessParams::make(0.9, 1.0);
        const std::vector<double> times{0.0, 6.0};
        LadderSettings plain;
        plain.interaction_picture = false;
        const auto a = integrate(d, -8.0, 6.0, times);
        const auto b = integrate(d, -8.0, 6.0, times, plain);
        CHECK(max_diff(a.at(6.0).populations(), b.at(6.0).populations()) < 1e-7);
        CHECK(a.diagnostics.max_norm_drift <= 1e-8);
        CHECK(b.diagnostics.max_norm_drift <= 1e-8);
    }

    TEST_CASE("propagation is reversible") {
        const auto d = DimensionlessParams::make(1.1, 2.0);
        LadderSettings s;
        const auto start = ground_state(25, -4.0);
        const auto there = propagate(d, start, 9.0, s);
        const auto back = propagate(d, there, -4.0, s);
        CHECK(back.populations()[0] == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(there.tau == 9.0);
    }

    TEST_CASE("truncation overflow and invalid requests") {
        const auto d = DimensionlessParams::make(2.0, 0.2);
        LadderSettings s;
        s.basis_size = 8;
        s.guard_levels = 2;
        const std::vector<double> times{10.0};
        CHECK_THROWS_AS(integrate(d, -10.0, 10.0, times, s), TruncationOverflow);
        CHECK_THROWS_AS(integrate(d, 1.0, 0.0, std::vector<double>{}), ConfigError);
        CHECK_THROWS_AS(integrate(d, 0.0, 1.0, std::vector<double>{2.0}), ConfigError);
        CHECK_THROWS_AS(ground_state(1, 0.0), ConfigError);
    }
}
