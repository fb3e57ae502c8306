#include <doctest.h>

#include <cmath>
#include <vector>

#include "chirplock/errors.hpp"
#include "chirplock/interp.hpp"

using namespace chirplock;

TEST_SUITE("interp") {
    TEST_CASE("pool adjacent violators") {
        const std::vector<double> y{1.0, 3.0, 2.0, 4.0};
        CHECK(isotonic_fit(y) == std::vector<double>{1.0, 2.5, 2.5, 4.0});
        const std::vector<double> down{3.0, 2.0, 1.0};
        CHECK(isotonic_fit(down) == std::vector<double>{2.0, 2.0, 2.0});
        const std::vector<double> sorted{0.0, 0.1, 0.1, 0.7};
        CHECK(isotonic_fit(sorted) == sorted);
    }

    TEST_CASE("linear data is reproduced exactly") {
        const std::vector<double> x{0.0, 0.5, 1.5, 2.0};
        const std::vector<double> y{1.0, 2.0, 4.0, 5.0};
        const MonotoneCubic c(x, y);
        for (double t : {0.1, 0.7, 1.2, 1.9}) {
            CHECK(c.value(t) == doctest::Approx(1.0 + 2.0 * t));
            CHECK(c.derivative(t) == doctest::Approx(2.0));
        }
        CHECK(c.solve(3.0) == doctest::Approx(1.0));
        CHECK(c.segment(1.2) == 1);
    }

    TEST_CASE("monotone data stays monotone and flat runs stay flat") {
        const std::vector<double> x{0, 1, 2, 3, 4, 5};
        const std::vector<double> y{0.0, 0.0, 0.05, 0.9, 1.0, 1.0};
        const MonotoneCubic c(x, y);
        double prev = c.value(0.0);
        for (int k = 1; k <= 500; ++k) {
            const double v = c.value(k * 0.01);
            CHECK(v >= prev - 1e-15);
            prev = v;
        }
        CHECK(c.value(0.5) == 0.0);
        CHECK(c.value(4.5) == 1.0);
        CHECK(c.value(c.solve(0.5)) == doctest::Approx(0.5).epsilon(1e-12));
    }

    TEST_CASE("levels outside the data range miss the bracket") {
        const std::vector<double> x{0.0, 1.0, 2.0};
        const std::vector<double> y{0.1, 0.2, 0.4};
        const MonotoneCubic c(x, y);
        CHECK_THROWS_AS((void)c.solve(0.5), BracketMiss);
    }
}
