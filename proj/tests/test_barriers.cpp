#include <cmath>
#include <numbers>
#include <random>

#include "cfront/barriers.hpp"
#include "doctest.h"

using namespace cfront;
using doctest::Approx;

namespace {
const double kPi3 = std::numbers::pi / 3;

struct Fixture {
    CombustionNonlinearity nl = make_combustion(0.3, 1, 2, 0.1);
    double c = find_wave_speed(nl);
    WaveProfile pr = build_profile(nl, c);
    FrontConfiguration cfg = FrontConfiguration::symmetric(2, 2, kPi3, c);
};

// output of the automatic schedule for the theta = 0.3 V at pi/3, frozen
// (fitted derivative constant c1_hat = 15.18)
BarrierParams certified() {
    BarrierParams p;
    p.alpha = 0.0078125;
    p.epsilon = 0.003125;
    p.delta = 0.003125;
    p.beta = 1.0024e-3;
    p.lambda = 2.17e-6;
    p.varrho = 5.5e7;
    return p;
}
}

TEST_CASE("mollifier") {
    CHECK(mollifier_omega(-1).w == 0.0);
    CHECK(mollifier_omega(-3).w == 0.0);
    CHECK(mollifier_omega(1).w == 1.0);
    CHECK(mollifier_omega(2).w == 1.0);
    CHECK(mollifier_omega(0).w == Approx(0.5).epsilon(1e-15));
    double prev = 0;
    for (int i = -1000; i <= 1000; ++i) {
        double s = i / 1000.0;
        auto m = mollifier_omega(s);
        CHECK(m.w >= prev);
        CHECK(m.dw >= 0);
        // symmetry w(s) + w(-s) = 1
        CHECK(m.w + mollifier_omega(-s).w == Approx(1.0).epsilon(1e-14));
        prev = m.w;
    }
    double h = 1e-6;
    for (double s : {-0.7, -0.2, 0.1, 0.6}) {
        auto m = mollifier_omega(s);
        CHECK(m.dw == Approx((mollifier_omega(s + h).w - mollifier_omega(s - h).w) / (2 * h)).epsilon(1e-6));
        CHECK(m.d2w == Approx((mollifier_omega(s + h).dw - mollifier_omega(s - h).dw) / (2 * h)).epsilon(1e-5));
    }
}

TEST_CASE("eta vanishes on the scaled surface") {
    Fixture F;
    BarrierParams p = certified();
    Barriers b(F.cfg, F.pr, F.nl, p);
    for (double t : {-100.0, 0.0, 250.0})
        for (double x : {-300.0, 0.0, 40.0}) {
            double y = b.surface().solve_phi(p.alpha * t, XVec{p.alpha * x, 0}) / p.alpha;
            auto xe = b.xi_eta(t, Point{x, y, 0});
            CHECK(std::abs(xe.eta) <= 1e-9);
            CHECK(std::abs(xe.xi) <= 1e-9);
        }
}

TEST_CASE("time barrier with delta = 0 is the plain supersolution") {
    Fixture F;
    BarrierParams p = certified();
    p.delta = 0;
    Barriers b(F.cfg, F.pr, F.nl, p);
    CHECK(b.time_shift(0) == 0.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-60, 60);
    for (int k = 0; k < 200; ++k) {
        double t = std::abs(U(rng));
        Point z{U(rng), U(rng), 0};
        CHECK(b.time_upper(t, z) == b.upper(t, z));
    }
}

TEST_CASE("time shift") {
    Fixture F;
    Barriers b(F.cfg, F.pr, F.nl, certified());
    CHECK(b.time_shift(0) == 0.0);
    CHECK(b.time_shift(1.0) > 1.0);
}

TEST_CASE("upper stays above lower") {
    Fixture F;
    Barriers b(F.cfg, F.pr, F.nl, certified());
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(-80, 80);
    for (int k = 0; k < 2000; ++k) {
        double t = U(rng);
        Point z{U(rng), U(rng), 0};
        double lo = b.lower(t, z), up = b.upper(t, z);
        CHECK(up >= lo);
        CHECK(up <= 1.0);
        CHECK(lo >= 0.0);
    }
}

TEST_CASE("exact residuals agree with differences") {
    Fixture F;
    BarrierParams p;
    p.alpha = 0.5;
    p.epsilon = 0.01;
    p.beta = 0.05;
    p.delta = 0.01;
    p.lambda = 0.01;
    p.varrho = 10;
    Barriers b(F.cfg, F.pr, F.nl, p);
    for (double y : {-1.0, 0.5, 2.0, 4.0}) {
        Point z{0.8, y, 0};
        auto a = b.upper_residual(0.3, z);
        auto d = b.upper_residual_fd(0.3, z, 1e-4);
        if (a.clamped) continue;
        CHECK(a.value == Approx(d.value).epsilon(1e-12));
        CHECK(std::abs(a.residual - d.residual) <= 1e-5);
        auto at = b.time_upper_residual(0.3, z);
        auto dt = b.time_upper_residual_fd(0.3, z, 1e-4);
        CHECK(std::abs(at.residual - dt.residual) <= 1e-5);
    }
}

TEST_CASE("certified parameters pass a sampled validation") {
    Fixture F;
    Barriers b(F.cfg, F.pr, F.nl, certified());
    SampleSpec spec;
    spec.count = 20000;
    spec.seed = 17;
    auto r = validate_parameters(b, spec, 15.18);
    CHECK(r.upper_pass);
    CHECK(r.time_pass);
    CHECK(r.margin_violations == 0);
    for (const auto& cs : r.upper) CHECK(cs.min_residual >= kResidualTolerance);
    CHECK(r.v_star > 0);
    CHECK(r.v_star < 0.5 * certified().alpha * F.pr.beta0());
}

TEST_CASE("alpha = 10 fails the validation") {
    Fixture F;
    BarrierParams p = certified();
    p.alpha = 10;
    Barriers b(F.cfg, F.pr, F.nl, p);
    SampleSpec spec;
    spec.count = 20000;
    auto r = validate_parameters(b, spec, 15.18, false);
    CHECK_FALSE(r.upper_pass);
    double worst = 0;
    for (const auto& cs : r.upper) worst = std::min(worst, cs.min_residual);
    CHECK(worst < kResidualTolerance);
}

TEST_CASE("validation is independent of the thread count") {
    Fixture F;
    Barriers b(F.cfg, F.pr, F.nl, certified());
    SampleSpec spec;
    spec.count = 5000;
    spec.threads = 1;
    auto r1 = validate_parameters(b, spec, 15.18);
    spec.threads = 4;
    auto r4 = validate_parameters(b, spec, 15.18);
    CHECK(r1.to_json().dump() == r4.to_json().dump());
}
