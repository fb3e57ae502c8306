#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "chirplock/errors.hpp"
#include "chirplock/params.hpp"

using namespace chirplock;

TEST_SUITE("params") {
    TEST_CASE("derived quantities of a ground-state parameter set") {
        const auto d = DimensionlessParams::make(0.8, 8.0);
        CHECK(d.mu() == doctest::Approx(0.5 * 0.8 * std::sqrt(8.0)));
        CHECK(d.lambda() == doctest::Approx(4.0));
        CHECK(d.gamma() == doctest::Approx(2.0));
        // sigma^2 = lambda * k_B T_eff / hbar w0 = lambda / 2 at zero temperature
        CHECK(d.sigma2() == doctest::Approx(2.0));
    }

    TEST_CASE("effective temperature follows coth and approaches T when hot") {
        CHECK(effective_temperature_ratio(0.0) == 0.5);
        CHECK(effective_temperature_ratio(1e-3) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(effective_temperature_ratio(100.0) == doctest::Approx(100.0).epsilon(1e-5));
        CHECK(coth(1e-8) == doctest::Approx(1e8).epsilon(1e-6));
        CHECK(coth(INFINITY) == 1.0);
        CHECK(effective_temperature(2.0, 0.0) == doctest::Approx(1.0));
        const auto hot = DimensionlessParams::make(1.0, 1.0, 2.0);
        CHECK(hot.gamma() < 2.0);
        CHECK(hot.sigma2() > 0.25);
    }

    TEST_CASE("physical inputs map to P1 and P2") {
        PhysicalParams p;
        p.mass = 2.0;
        p.omega0 = 3.0;
        p.hbar = 0.5;
        p.chirp = 0.04;
        p.beta = 0.1;
        p.drive = 0.3;
        const auto d = from_physical(p);
        CHECK(d.p1() == doctest::Approx(0.3 / std::sqrt(2.0 * 2.0 * 0.5 * 3.0 * 0.04)));
        CHECK(d.p2() == doctest::Approx(3.0 * 0.5 * 0.1 / (4.0 * 2.0 * 0.2)));
    }

    TEST_CASE("invalid values raise ConfigError") {
        CHECK_THROWS_AS(DimensionlessParams::make(-1.0, 1.0), ConfigError);
        CHECK_THROWS_AS(DimensionlessParams::make(1.0, 0.0), ConfigError);
        CHECK_THROWS_AS(DimensionlessParams::make(1.0, NAN), ConfigError);
        PhysicalParams p;
        p.chirp = 0.0;
        p.beta = 1.0;
        CHECK_THROWS_WITH_AS(validate(p), doctest::Contains("chirp"), ConfigError);
    }

    TEST_CASE("fixed-frame scaling round-trips") {
        for (double gamma_ratio : {0.0, 0.7}) {
            const auto d = DimensionlessParams::make(1.3, 0.6, gamma_ratio);
            const auto s = fixed_frame_from_dimensionless(d, 2.5e-4);
            const auto back = dimensionless_from_fixed_frame(s);
            CHECK(back.p1() == doctest::Approx(d.p1()).epsilon(1e-12));
            CHECK(back.p2() == doctest::Approx(d.p2()).epsilon(1e-12));
            CHECK(back.gamma() == doctest::Approx(d.gamma()).epsilon(1e-12));
        }
        // hbar = gamma L^2 puts the ground-state example at P2 ~ 1, P1 ~ 1
        FixedFrameScaling s{1e-4, 0.0067, 0.02, 2.0};
        const auto d = dimensionless_from_fixed_frame(s);
        CHECK(d.p2() == doctest::Approx(1.005));
        CHECK(d.p1() == doctest::Approx(1.0));
    }
}
