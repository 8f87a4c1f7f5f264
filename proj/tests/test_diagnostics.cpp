#include <cmath>
#include <numbers>

#include "cfront/diagnostics.hpp"
#include "doctest.h"

using namespace cfront;
using doctest::Approx;

namespace {
const auto kNl = make_combustion(0.3, 1, 2, 0.1);
constexpr double kC = 0.263436171681677;
const double kPi3 = std::numbers::pi / 3;

FrontConfiguration planar() {
    std::vector<Facet> f{{{1.0}, std::numbers::pi / 2, 0.0}};
    return FrontConfiguration(2, f, kC);
}

Grid strip(double dx) {
    Grid g;
    g.dim = 2;
    g.dx = dx;
    g.n = {16, static_cast<std::size_t>(200 / dx), 1};
    g.origin = {0, -100, 0};
    return g;
}

BarrierParams certified() {
    BarrierParams p;
    p.alpha = 0.0078125;
    p.epsilon = p.delta = 0.003125;
    p.beta = 1.0024e-3;
    p.lambda = 2.17e-6;
    p.varrho = 5.5e7;
    return p;
}
}

TEST_CASE("M_eps of an indicator field is zero") {
    auto cfg = FrontConfiguration::symmetric(2, 2, kPi3, kC);
    Grid g;
    g.dim = 2;
    g.dx = 0.5;
    g.n = {64, 64, 1};
    g.origin = {-16, -16, 0};
    Field u(g, 3.0);
    for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = min_q(cfg, 3.0, g.point(i)) < 0 ? 1.0 : 0.0;
    auto t = extract_interface_and_Meps(u, cfg, {0.1, 0.01, 0.001});
    for (const auto& r : t.rows) {
        CHECK(r.m == 0.0);
        CHECK_FALSE(r.censored);
    }
    CHECK(t.monotone);
}

TEST_CASE("M_eps of a planar profile matches the profile quantiles") {
    auto pr = build_profile(kNl, kC);
    auto cfg = planar();
    Grid g = strip(0.25);
    Field u(g, 0.0);
    for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = pr(g.point(i)[1]);
    std::vector<double> eps{0.1, 0.01, 0.001};
    auto t = extract_interface_and_Meps(u, cfg, eps);
    REQUIRE(t.rows.size() == 3);
    for (std::size_t k = 0; k < eps.size(); ++k) {
        double ex = std::max(-pr.inverse(1 - eps[k]), pr.inverse(eps[k]));
        CHECK(std::abs(t.rows[k].m - ex) <= 2 * g.dx);
        CHECK_FALSE(t.rows[k].censored);
    }
    CHECK(t.monotone);
}

TEST_CASE("mean speed of exact interfaces") {
    std::vector<double> times;
    for (int k = 0; k < 12; ++k) times.push_back(k * 2 / kC);
    auto r1 = mean_speed_estimate(planar(), times, 20, 10 / kC, 2000);
    CHECK(r1.gamma_hat == Approx(kC).epsilon(1e-10));
    CHECK(r1.pass);
    auto r2 = mean_speed_estimate(FrontConfiguration::symmetric(2, 2, kPi3, kC), times, 30, 10 / kC, 2000);
    CHECK(r2.rel_error <= 0.02);
    CHECK(r2.pass);
    // too short a time span is refused
    CHECK_THROWS(mean_speed_estimate(planar(), {0, 1, 2}, 20, 10 / kC, 100));
}

TEST_CASE("level set of the subsolution field") {
    auto pr = build_profile(kNl, kC);
    auto cfg = FrontConfiguration::symmetric(2, 2, kPi3, kC);
    Grid g;
    g.dim = 2;
    g.dx = 0.2 / kC;
    g.n = {128, 128, 1};
    g.origin = {-64 * g.dx, -64 * g.dx, 0};
    Field u(g, 0.0);
    for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = subsolution_lower(cfg, pr, 0.0, g.point(i));
    auto r = level_set_discrepancy(u, cfg, pr, 0.5, 5 / kC);
    CHECK(r.points > 0);
    CHECK(r.max_discrepancy <= 0.5 * g.dx);
    CHECK(r.within_2dx);
}

TEST_CASE("weighted gap and sandwich of the subsolution itself") {
    auto pr = build_profile(kNl, kC);
    auto cfg = FrontConfiguration::symmetric(2, 2, kPi3, kC);
    Barriers b(cfg, pr, kNl, certified());
    Grid g = make_box(2, 48, 0.3 / kC);
    std::vector<Field> traj;
    for (int k = 0; k < 5; ++k) {
        double t = k * 0.25 / kC;
        Field u(g, t);
        u.grid.origin[1] += std::round(t * kC / std::sin(kPi3) / g.dx) * g.dx;
        for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] = b.lower(t, u.grid.point(i));
        traj.push_back(std::move(u));
    }
    auto wg = weighted_gap_report(traj, b, 1e-3);
    for (const auto& bin : wg.bins) CHECK(bin.sup_ratio == 0.0);
    CHECK(wg.pass);
    auto sw = sandwich_and_monotonicity(traj, b, {1 / kC, 2 / kC});
    CHECK(sw.lower_violation == 0.0);
    CHECK(sw.upper_violation == 0.0);
    // V_lower increases in t
    CHECK(sw.min_dt >= 0.0);
    for (const auto& f : sw.floors) CHECK(f.k_hat > 0);
}

TEST_CASE("unperturbed stability run stays on V_hat") {
    auto pr = build_profile(kNl, kC);
    auto cfg = FrontConfiguration::symmetric(2, 2, kPi3, kC);
    Barriers b(cfg, pr, kNl, certified());
    SolverConfig sc;
    sc.frame_speed = kC / std::sin(kPi3);
    Grid g = make_box(2, 48, 0.3 / kC);
    PerturbationSpec ps;
    ps.height = 0;
    ps.admissibility_samples = 100;
    auto r = stability_run(b, kNl, sc, g, 1 / kC, ps, 2 / kC);
    REQUIRE(!r.sup_diff.empty());
    for (double d : r.sup_diff) CHECK(d == 0.0);
    CHECK(r.decays);
}
