#include <cmath>
#include <numbers>
#include <random>

#include "cfront/hypersurface.hpp"
#include "doctest.h"

using namespace cfront;
using doctest::Approx;

namespace {
constexpr double kC = 0.263436171681677;
const double kPi3 = std::numbers::pi / 3;
}

TEST_CASE("symmetric apex closed form") {
    auto cfg = FrontConfiguration::symmetric(2, 2, kPi3, kC);
    ScaledSurface S(cfg, 1.0);
    double phi = S.solve_phi(0, XVec{0, 0});
    CHECK(std::abs(phi - std::log(2.0) / std::sin(kPi3)) <= 1e-12);
    CHECK(phi == Approx(0.800377).epsilon(1e-6));
    auto fl = S.flatness(0, XVec{0, 0});
    CHECK(fl.pair_sum == Approx(0.5).epsilon(1e-12));
    CHECK(fl.identity == Approx(0.5).epsilon(1e-12));
    CHECK(S.psi(0, XVec{0, 0}) == Approx(0.0).epsilon(1e-14));
}

TEST_CASE("pyramid apex closed form") {
    auto cfg = FrontConfiguration::symmetric(3, 3, kPi3, kC);
    ScaledSurface S(cfg, 1.0);
    CHECK(std::abs(S.solve_phi(0, XVec{0, 0}) - std::log(3.0) / std::sin(kPi3)) <= 1e-12);
    // h = 1 - 3 / 9
    CHECK(S.flatness(0, XVec{0, 0}).identity == Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("single facet is a plane") {
    std::vector<Facet> f{{{1.0}, std::numbers::pi / 2, 0.0}};
    FrontConfiguration cfg(2, f, kC);
    ScaledSurface S(cfg, 1.0);
    for (double t : {-2.0, 0.0, 3.0})
        for (double x : {-5.0, 1.0}) {
            XVec X{x, 0};
            CHECK(S.solve_phi(t, X) == Approx(S.psi(t, X)).epsilon(1e-13));
            CHECK(std::abs(S.flatness(t, X).pair_sum) <= 1e-15);
        }
}

TEST_CASE("pair sum equals the identity form of h") {
    auto cfg = FrontConfiguration::symmetric(3, 4, 1.0, kC);
    ScaledSurface S(cfg, 0.5);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-6, 6);
    for (int k = 0; k < 300; ++k) {
        XVec X{U(rng), U(rng)};
        double t = U(rng);
        auto fl = S.flatness(t, X);
        CHECK(fl.pair_sum == Approx(fl.identity).epsilon(1e-10));
        double y = S.solve_phi(t, X);
        CHECK(std::abs(S.residual(t, X, y)) <= 1e-12);
        CHECK(y >= S.psi(t, X));
    }
}

TEST_CASE("surface check 2D") {
    auto cfg = FrontConfiguration::symmetric(2, 2, kPi3, kC);
    auto r = check_surface(cfg, 1.0, 100000, 10, 1);
    CHECK(r.count == 100000);
    CHECK(r.max_residual <= 1e-12);
    CHECK(r.min_gap >= 0);
    CHECK(r.max_fd_error <= 1e-6);
    CHECK(r.holdout_ratio <= r.c_hat * (1 + 1e-9));
    // 2D V: sup (phi - psi) / h is attained near the apex, ln 2 / sin / (1/2) would be the apex ratio
    CHECK(r.c_hat == Approx(1.6007).epsilon(1e-3));
}

TEST_CASE("jets match the double derivatives") {
    auto cfg = FrontConfiguration::symmetric(3, 3, 1.2, kC);
    ScaledSurface S(cfg, 0.7);
    XVec X{0.3, -0.8};
    double t = 1.3;
    auto d = S.derivatives(t, X);
    // seed x_0, then t
    std::array<Jet, 2> jx{Jet::variable(X[0]), Jet(X[1])};
    auto sx = S.evaluate(Jet(t), jx);
    CHECK(sx.phi.v == Approx(d.phi).epsilon(1e-13));
    CHECK(sx.phi.d == Approx(d.grad[0]).epsilon(1e-10));
    CHECK(sx.phi.dd == Approx(d.hess[0][0]).epsilon(1e-8));
    auto st = S.evaluate(Jet::variable(t), std::array<Jet, 2>{Jet(X[0]), Jet(X[1])});
    CHECK(st.phi.d == Approx(d.phi_t).epsilon(1e-10));
    CHECK(st.phi.dd == Approx(d.phi_tt).epsilon(1e-8));
}
