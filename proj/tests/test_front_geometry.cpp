#include <cmath>
#include <numbers>
#include <random>

#include "cfront/errors.hpp"
#include "cfront/front_geometry.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cfront;
using doctest::Approx;

namespace {
constexpr double kC = 0.263436171681677;
const double kPi3 = std::numbers::pi / 3;
}

TEST_CASE("facet directions are unit vectors") {
    auto cfg = FrontConfiguration::symmetric(3, 4, 1.1, kC);
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const Point& e = cfg.direction(i);
        CHECK(e[0] * e[0] + e[1] * e[1] + e[2] * e[2] == Approx(1.0).epsilon(1e-14));
        CHECK(e[2] == Approx(std::sin(1.1)));
    }
}

TEST_CASE("q values and min") {
    auto cfg = FrontConfiguration::symmetric(2, 2, kPi3, kC);
    Point z{0.7, -1.2, 0};
    auto q = q_values(cfg, 2.0, z);
    REQUIRE(q.q.size() == 2);
    double s = std::sin(kPi3), co = std::cos(kPi3);
    double q0 = cfg.facet(0).nu[0] * 0.7 * co - 1.2 * s - kC * 2.0;
    double q1 = cfg.facet(1).nu[0] * 0.7 * co - 1.2 * s - kC * 2.0;
    CHECK(q.min == Approx(std::min(q0, q1)).epsilon(1e-14));
    CHECK(min_q(cfg, 2.0, z) == q.min);
}

TEST_CASE("ridge distance above the apex") {
    auto cfg = FrontConfiguration::symmetric(2, 2, kPi3, kC);
    Point z{0, 1, 0};
    double ex = 1 / std::sqrt(1 + std::pow(kC / std::sin(kPi3), 2));
    CHECK(ridge_distance(cfg, 0, z) == Approx(ex).epsilon(1e-12));
    // the ridge moves along y at c / sin(theta); check a few other times
    for (double t : {-3.0, 0.5, 7.0})
        for (double y : {-2.0, 0.3, 4.0}) {
            Point p{0, y, 0};
            CHECK(ridge_distance(cfg, t, p) == Approx(oracle::line_distance(t, y, kC / std::sin(kPi3))).epsilon(1e-12));
        }
}

TEST_CASE("planar boundary distance") {
    std::vector<Facet> f{{{1.0}, std::numbers::pi / 2, 0.0}};
    FrontConfiguration cfg(2, f, kC);
    for (double s : {-3.0, -0.1, 0.0, 2.5}) {
        // q = y - c t; the point (t = 0, y = s) has q = s
        Point z{0.4, s, 0};
        CHECK(boundary_distance(cfg, 0, z) == Approx(std::abs(s) / std::sqrt(1 + kC * kC)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(ridge_distance(cfg, 0, Point{0, 0, 0}), DomainError);
}

TEST_CASE("boundary distance is never above the ridge distance") {
    auto cfg = FrontConfiguration::symmetric(3, 3, kPi3, kC);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-5, 5);
    for (int k = 0; k < 500; ++k) {
        double t = U(rng);
        Point z{U(rng), U(rng), U(rng)};
        auto d = distances(cfg, t, z);
        CHECK(d.boundary <= d.ridge + 1e-12);
        CHECK(d.boundary >= 0);
        CHECK(slice_boundary_distance(cfg, t, z) >= d.boundary - 1e-12);
    }
}

TEST_CASE("boundary distance against brute force in 2D") {
    // slice distance to {min q = 0}: scan the two rays of the V
    auto cfg = FrontConfiguration::symmetric(2, 2, kPi3, kC);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-4, 4);
    for (int k = 0; k < 100; ++k) {
        double t = U(rng);
        Point z{U(rng), U(rng), 0};
        double best = 1e300;
        for (int i = -200000; i <= 200000; ++i) {
            double x = i * 1e-4;
            // interface y(x) = (c t + |x| cos) / sin
            double y = (kC * t + std::abs(x) * std::cos(kPi3)) / std::sin(kPi3);
            best = std::min(best, std::hypot(x - z[0], y - z[1]));
        }
        CHECK(slice_boundary_distance(cfg, t, z) == Approx(best).epsilon(1e-6));
    }
}

TEST_CASE("region classification") {
    auto cfg = FrontConfiguration::symmetric(2, 2, kPi3, kC);
    CHECK(classify_region(cfg, 0, Point{0, -1, 0}) == Region::Burned);
    CHECK(classify_region(cfg, 0, Point{0, 1, 0}) == Region::Unburned);
    CHECK(classify_region(cfg, 0, Point{0, 0, 0}) == Region::Interface);
    CHECK(std::string(region_name(Region::Burned)) == "burned");
}

TEST_CASE("configuration validation") {
    CHECK_THROWS_AS(FrontConfiguration::symmetric(2, 2, 0.0, kC), ValidationError);
    CHECK_THROWS_AS(FrontConfiguration::symmetric(4, 2, kPi3, kC), ValidationError);
    std::vector<Facet> bad{{{0.5}, kPi3, 0.0}, {{-1.0}, kPi3, 0.0}};
    CHECK_THROWS_AS(FrontConfiguration(2, bad, kC), ValidationError);
}
