#include <cmath>

#include "cfront/wave_profile.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cfront;
using doctest::Approx;

namespace {
// RK4 in w, bisection to 1e-18 width, then frozen
constexpr double kSpeed03 = 0.263436171681677;
constexpr double kSpeed02 = 0.3669938065538;
constexpr double kSpeed05 = 0.1215106163593;
}

TEST_CASE("wave speed against the independent shooting oracle") {
    for (double th : {0.2, 0.3, 0.5}) {
        auto nl = make_combustion(th, 1, 2, 0.1);
        double c = find_wave_speed(nl);
        double ref = oracle::wave_speed(th);
        CHECK(c == Approx(ref).epsilon(1e-6));
    }
}

TEST_CASE("frozen wave speeds") {
    CHECK(find_wave_speed(make_combustion(0.3, 1, 2, 0.1)) == Approx(kSpeed03).epsilon(1e-9));
    CHECK(find_wave_speed(make_combustion(0.2, 1, 2, 0.1)) == Approx(kSpeed02).epsilon(1e-9));
    CHECK(find_wave_speed(make_combustion(0.5, 1, 2, 0.1)) == Approx(kSpeed05).epsilon(1e-9));
}

TEST_CASE("speed decreases with the ignition threshold") {
    CHECK(kSpeed05 < kSpeed03);
    CHECK(kSpeed03 < kSpeed02);
}

TEST_CASE("shooting without reaction") {
    // f = 0: p' = c along U, so p(theta) = c (1 - theta) up to the seed offset
    auto nl = CombustionNonlinearity::inert(0.3, 0.1);
    auto r = shoot_p(nl, 1.0);
    CHECK(r.status == ShootStatus::Reached);
    CHECK(r.p_theta == Approx(0.7).epsilon(2e-6));
}

TEST_CASE("shooting function changes sign once") {
    auto nl = make_combustion(0.3, 1, 2, 0.1);
    int changes = 0;
    double prev = shooting_function(nl, 0.02);
    for (int i = 1; i < 32; ++i) {
        double c = 0.02 + 0.9 * i / 31.0;
        double s = shooting_function(nl, c);
        if ((s > 0) != (prev > 0)) ++changes;
        prev = s;
    }
    CHECK(changes == 1);
}

TEST_CASE("profile anchor and monotonicity") {
    auto nl = make_combustion(0.3, 1, 2, 0.1);
    auto pr = build_profile(nl, kSpeed03);
    CHECK(pr(0.0) == Approx(0.3).epsilon(1e-12));
    double prev = 1.0;
    for (int i = -4000; i <= 4000; ++i) {
        double u = pr(i * 0.01);
        CHECK(u <= prev + 1e-15);
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        prev = u;
    }
    CHECK(pr.inverse(0.5) < 0);
    CHECK(pr(pr.inverse(0.5)) == Approx(0.5).epsilon(1e-10));
}

TEST_CASE("profile right tail is exact") {
    auto nl = make_combustion(0.3, 1, 2, 0.1);
    auto pr = build_profile(nl, kSpeed03);
    for (double D : {0.0, 1.0, 5.0, 20.0, 50.0}) {
        double ex = 0.3 * std::exp(-kSpeed03 * D);
        CHECK(std::abs(pr(D) / ex - 1) < 1e-8);
    }
}

TEST_CASE("profile checks") {
    auto nl = make_combustion(0.3, 1, 2, 0.1);
    auto pr = build_profile(nl, kSpeed03);
    auto pc = check_profile(pr, nl);
    CHECK(pc.ode_residual <= 1e-6);
    CHECK(pc.tail_error <= 1e-8);
    CHECK(pc.beta0_rel_error <= 0.01);
    double mu = 0.5 * (-kSpeed03 + std::sqrt(kSpeed03 * kSpeed03 + 4 * 0.49));
    CHECK(pc.char_root == Approx(mu).epsilon(1e-12));
    CHECK(characteristic_root(nl, kSpeed03) == Approx(mu).epsilon(1e-12));
}

TEST_CASE("profile derivatives agree with differences") {
    auto nl = make_combustion(0.3, 1, 2, 0.1);
    auto pr = build_profile(nl, kSpeed03);
    for (double D : {-12.0, -3.0, -0.7, 0.4, 6.0}) {
        double h = 1e-4;
        auto s = pr.eval(D);
        double d1 = (pr(D + h) - pr(D - h)) / (2 * h);
        CHECK(s.du == Approx(d1).epsilon(1e-5));
        CHECK(s.log_u == Approx(std::log(s.u)).epsilon(1e-12));
        CHECK(s.w == Approx(1 - s.u).epsilon(1e-10));
    }
}

TEST_CASE("scaling symmetry") {
    auto nl = make_combustion(0.3, 1, 2, 0.1);
    auto sc = check_scaling(nl, 2);
    CHECK(std::abs(sc.speed_ratio - 2) <= 0.01);
    CHECK(sc.profile_error <= 1e-6);
}
