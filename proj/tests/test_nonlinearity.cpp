#include <cmath>

#include "cfront/errors.hpp"
#include "cfront/nonlinearity.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cfront;
using doctest::Approx;

TEST_CASE("nonlinearity values") {
    auto nl = make_combustion(0.3, 1, 2, 0.1);
    CHECK(nl.f(0.65) == Approx(0.042875).epsilon(1e-14));
    CHECK(nl.fprime(0.95) == Approx(-0.3575).epsilon(1e-14));
    CHECK(nl.f(0.2) == 0.0);
    CHECK(nl.f(0.3) == 0.0);
    CHECK(nl.f(1.0) == 0.0);
    CHECK(nl.f(0.0) == 0.0);
    CHECK(nl.fprime_at_one() == Approx(-0.49));
    CHECK(nl.f(1.05) < 0);
}

TEST_CASE("nonlinearity matches the written-out formula") {
    auto nl = make_combustion(0.3, 1, 2, 0.1);
    for (int i = 0; i <= 1000; ++i) {
        double u = i / 1000.0;
        CHECK(nl.f(u) == Approx(oracle::f(u, 0.3)).epsilon(1e-13));
    }
}

TEST_CASE("gamma star") {
    auto nl = make_combustion(0.3, 1, 2, 0.1);
    double g = nl.gamma_star();
    CHECK(g == Approx(0.025).epsilon(1e-8));
    // dense check of the derivative sandwich on [1 - 2g, 1 + 2g]
    double fp1 = nl.fprime_at_one();
    for (int i = 0; i <= 2000; ++i) {
        double u = 1 - 2 * g + 4 * g * i / 2000.0;
        CHECK(nl.fprime(u) >= 1.5 * fp1 - 1e-12);
        CHECK(nl.fprime(u) <= 0.5 * fp1 + 1e-12);
    }
}

TEST_CASE("nonlinearity derivative by differences") {
    auto nl = make_combustion(0.2, 1.3, 2.5, 0.1);
    for (double u : {0.25, 0.4, 0.6, 0.8, 0.97, 1.03}) {
        double h = 1e-6;
        double fd = (nl.f(u + h) - nl.f(u - h)) / (2 * h);
        CHECK(nl.fprime(u) == Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("nonlinearity rejects bad parameters") {
    CHECK_THROWS_AS(make_combustion(0.0, 1, 2, 0.1), ValidationError);
    CHECK_THROWS_AS(make_combustion(1.0, 1, 2, 0.1), ValidationError);
    CHECK_THROWS_AS(make_combustion(0.3, -1, 2, 0.1), ValidationError);
    CHECK_THROWS_AS(make_combustion(0.3, 1, 0.5, 0.1), ValidationError);
    CHECK_THROWS_AS(make_combustion(0.3, 1, 2, 0.0), ValidationError);
}

TEST_CASE("scaled family") {
    auto nl = make_combustion(0.3, 1, 2, 0.1);
    auto k = nl.scaled(4);
    CHECK(k.f(0.65) == Approx(4 * nl.f(0.65)));
    CHECK(k.theta() == nl.theta());
}
