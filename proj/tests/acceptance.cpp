// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
// Usage: acceptance [config.json] [--only 1,5,...]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "cfront/cli_io.hpp"
#include "cfront/diagnostics.hpp"
#include "cfront/hypersurface.hpp"
#include "cfront/parallel.hpp"

using namespace cfront;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

json g_report = json::object();
int g_failed = 0;

void verdict(int k, bool ok, const std::string& detail, json j) {
    std::printf("criterion %d: %s  %s\n", k, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    j["pass"] = ok;
    g_report[std::to_string(k)] = std::move(j);
    if (!ok) ++g_failed;
}

std::string fmt(const char* f, auto... a) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a...);
    return buf;
}

void crit1() {
    bool ok = true;
    std::string d;
    json rows = json::array();
    for (double th : {0.2, 0.3, 0.5}) {
        auto nl = make_combustion(th, 1, 2, 0.1);
        double c = find_wave_speed(nl);
        auto t0 = Clock::now();
        auto est = measure_speed_1d(nl, SpeedConfig{});
        double secs = since(t0);
        double rel = est.speed / c - 1;
        bool good = std::abs(rel) <= 0.01 && secs <= 30;
        ok = ok && good;
        d += fmt("theta=%.1f rel=%+.2e (%.1fs) ", th, rel, secs);
        rows.push_back({{"theta", th}, {"c_shooting", c}, {"c_pde", est.speed}, {"rel", rel}, {"seconds", secs}});
    }
    verdict(1, ok, d, {{"families", rows}});
}

void crit2() {
    bool ok = true;
    std::string d;
    json rows = json::array();
    for (double th : {0.2, 0.3, 0.5}) {
        auto nl = make_combustion(th, 1, 2, 0.1);
        double c = find_wave_speed(nl);
        auto pc = check_profile(build_profile(nl, c), nl);
        bool good = pc.ode_residual <= 1e-6 && pc.tail_error <= 1e-8 && pc.beta0_rel_error <= 0.01;
        ok = ok && good;
        d += fmt("theta=%.1f ode=%.1e tail=%.1e beta0=%.1e; ", th, pc.ode_residual, pc.tail_error,
                 pc.beta0_rel_error);
        rows.push_back({{"theta", th},
                        {"ode_residual", pc.ode_residual},
                        {"tail_error", pc.tail_error},
                        {"beta0_rel_error", pc.beta0_rel_error},
                        {"char_root", pc.char_root}});
    }
    verdict(2, ok, d, {{"families", rows}});
}

void crit3() {
    auto nl = make_combustion(0.3, 1, 2, 0.1);
    auto sc = check_scaling(nl, 2);
    double rel = std::abs(sc.speed_ratio / 2 - 1);
    bool ok = rel <= 0.005 && sc.profile_error <= 1e-6;
    verdict(3, ok, fmt("speed ratio=%.12f profile err=%.2e", sc.speed_ratio, sc.profile_error),
            {{"speed_ratio", sc.speed_ratio}, {"profile_error", sc.profile_error}});
}

void crit4(double c) {
    const double th = std::numbers::pi / 3;
    bool ok = true;
    std::string d;
    json j;
    for (int N : {2, 3}) {
        auto cfg = FrontConfiguration::symmetric(N, N == 2 ? 2 : 3, th, c);
        auto s = check_surface(cfg, 1.0, 100000, 10, 1);
        bool good = s.max_residual <= 1e-12 && s.min_gap >= 0 && s.max_fd_error <= 1e-6 &&
                    s.holdout_ratio <= s.c_hat;
        ok = ok && good;
        d += fmt("N=%d res=%.1e min(phi-psi)=%.1e fd=%.1e C=%.4f holdout=%.4f; ", N, s.max_residual, s.min_gap,
                 s.max_fd_error, s.c_hat, s.holdout_ratio);
        j[std::to_string(N) + "D"] = {{"max_residual", s.max_residual}, {"min_gap", s.min_gap},
                                      {"max_fd_error", s.max_fd_error}, {"c_hat", s.c_hat},
                                      {"holdout_ratio", s.holdout_ratio}};
    }
    ScaledSurface S(FrontConfiguration::symmetric(2, 2, th, c), 1.0);
    double apex = S.solve_phi(0, XVec{0, 0});
    double err = std::abs(apex - std::log(2.0) / std::sin(th));
    ok = ok && err <= 1e-12 && std::abs(apex - 0.800377) < 5e-7;
    d += fmt("apex=%.9f err=%.1e", apex, err);
    j["apex"] = apex;
    j["apex_error"] = err;
    verdict(4, ok, d, j);
}

void crit5(const Setup& s) {
    const ValidationReport& r = s.schedule->report;
    double mu = INFINITY, mt = INFINITY;
    for (const auto& cs : r.upper) mu = std::min(mu, cs.min_residual);
    for (const auto& cs : r.time_upper) mt = std::min(mt, cs.min_residual);
    // designed failure: same schedule, alpha = 10
    BarrierParams p = s.params;
    p.alpha = 10;
    Barriers bad(s.front, s.profile, s.nl, p);
    SampleSpec spec;
    spec.count = 100000;
    ValidationReport rf = validate_parameters(bad, spec, s.schedule->constants.c1_hat, false);
    double mf = 0;
    for (const auto& cs : rf.upper) mf = std::min(mf, cs.min_residual);
    bool ok = r.upper_pass && r.time_pass && r.margin_violations == 0 && mf < kResidualTolerance;
    verdict(5, ok,
            fmt("alpha=%g min L(upper)=%.2e min L(W)=%.2e margin violations=%zu; alpha=10 min residual=%.2e",
                s.params.alpha, mu, mt, r.margin_violations, mf),
            {{"schedule", s.schedule->to_json()}, {"designed_failure_min_residual", mf}});
}

struct Entire {
    EntireResult res;
};

Entire crit6(const RunConfig& rc, const Setup& s, const Barriers& b) {
    std::vector<double> offs;
    for (double n : rc.solver.offsets) offs.push_back(n * s.unit);
    auto t0 = Clock::now();
    Entire e{entire_solution(b, s.nl, s.solver, s.box, offs, rc.solver.T * s.unit)};
    double secs = since(t0);
    const EntireReport& r = e.res.report;
    bool mp = r.min_value_seen >= -1e-12 && r.max_value_seen <= 1 + 1e-12;
    bool ok = r.monotone && r.increments_decay && r.min_above_lower > 0 && r.max_value <= 1 && mp && secs <= 600;
    std::string inc;
    for (const auto& m : r.increments) inc += fmt("[min %.1e sup %.3f] ", m.min_increment, m.sup_increment);
    verdict(6, ok,
            fmt("%zux%zu increments %smin(Vhat-Vlower)=%.2e max Vhat=%.17g (%zu cells at 1) %.0fs", s.box.n[0],
                s.box.n[1], inc.c_str(), r.min_above_lower, r.max_value, r.equal_to_one, secs),
            r.to_json());
    return e;
}

void crit7(const Setup& s, const Barriers& b, const std::vector<Field>& window) {
    const double cf = s.speed;
    std::vector<double> eps{0.5, 0.25, 0.1, 0.05, 0.01};
    MEpsTable m0 = extract_interface_and_Meps(window.front(), s.front, eps);
    MEpsTable m1 = extract_interface_and_Meps(window.back(), s.front, eps);
    std::vector<double> times;
    std::size_t stride = std::max<std::size_t>(1, window.size() / 12);
    for (std::size_t k = 0; k < window.size(); k += stride) times.push_back(window[k].time);
    double half = 0.5 * window.front().grid.dx * static_cast<double>(window.front().grid.n[0] - 1);
    MeanSpeedReport ms = mean_speed_estimate(s.front, times, half, 10 / cf * (1 - 1e-9));
    std::vector<Field> sub;
    std::size_t gs = std::max<std::size_t>(1, window.size() / 6);
    for (std::size_t k = 0; k < window.size(); k += gs) sub.push_back(window[k]);
    WeightedGapReport wg = weighted_gap_report(sub, b, s.v_star);
    std::string curve;
    for (const auto& bn : wg.bins) curve += fmt("%.1e ", bn.sup_ratio);
    bool ok = m0.monotone && m1.monotone && ms.pass && wg.pass;
    verdict(7, ok,
            fmt("M_eps monotone=%d/%d mean speed rel=%.1e gap curve [%s] decreasing=%d far=%.1e",
                int(m0.monotone), int(m1.monotone), ms.rel_error, curve.c_str(), int(wg.decreasing), wg.far_value),
            {{"M_eps", {m0.to_json(), m1.to_json()}}, {"mean_speed", ms.to_json()}, {"weighted_gap", wg.to_json()}});
}

void crit8(const RunConfig& rc, const Setup& s, const Barriers& b) {
    PerturbationSpec ps;
    ps.radius = 3 * s.unit;
    auto t0 = Clock::now();
    StabilityReport r = stability_run(b, s.nl, s.solver, s.box, rc.solver.offsets.back() * s.unit, ps, 40 * s.unit);
    double secs = since(t0);
    bool ok = r.pass() && secs <= 600;
    verdict(8, ok,
            fmt("height=%.4f admissible=%d final diff=%.2e decays=%d eventually decreasing=%d (upticks %zu) "
                "W dominates=%d %.0fs",
                r.height, int(r.admissible), r.final_diff, int(r.decays), int(r.eventually_decreasing), r.upticks,
                int(r.dominated), secs),
            r.to_json());
}

void crit9(const Setup& s, const Barriers& b) {
    // reduced box, same pipeline; snapshots and diagnostics compared bit for bit
    Grid box = make_box(2, 96, s.box.dx);
    std::vector<std::vector<double>> ref;
    std::string ref_diag;
    bool ok = true;
    for (int th : {1, 4, 8}) {
        SolverConfig sc = s.solver;
        sc.threads = th;
        auto er = entire_solution(b, s.nl, sc, box, {2 * s.unit, 4 * s.unit}, 2 * s.unit);
        std::vector<std::vector<double>> vals;
        for (const Field& f : er.window) vals.push_back(f.values);
        std::string diag = sandwich_and_monotonicity(er.window, b, {2 * s.unit}, th).to_json().dump();
        if (ref.empty()) {
            ref = vals;
            ref_diag = diag;
        } else {
            ok = ok && vals == ref && diag == ref_diag;
        }
    }
    verdict(9, ok, fmt("96x96 entire run, %zu snapshots, workers 1/4/8 %s", ref.size(), ok ? "identical" : "differ"),
            {{"snapshots", ref.size()}});
}

} // namespace

int main(int argc, char** argv) {
    std::string config = CFRONT_DEFAULT_CONFIG;
    std::set<int> only;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) only.insert(std::stoi(tok));
        } else {
            config = a;
        }
    }
    auto want = [&](int k) { return only.empty() || only.count(k); };
    auto t0 = Clock::now();
    try {
        if (want(1)) crit1();
        if (want(2)) crit2();
        if (want(3)) crit3();
        auto nl03 = make_combustion(0.3, 1, 2, 0.1);
        if (want(4)) crit4(find_wave_speed(nl03));
        if (want(5) || want(6) || want(7) || want(8) || want(9)) {
            RunConfig rc = load_run_config(config);
            SetupOptions opt;
            opt.validation_samples = static_cast<std::size_t>(rc.exp_number("samples", 100000));
            Setup s = build_setup(rc, opt);
            Barriers b(s.front, s.profile, s.nl, s.params);
            if (want(5)) crit5(s);
            if (want(6) || want(7)) {
                Entire e = crit6(rc, s, b);
                if (want(7)) crit7(s, b, e.res.window);
            }
            if (want(8)) crit8(rc, s, b);
            if (want(9)) crit9(s, b);
        }
    } catch (const std::exception& e) {
        std::printf("acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("acceptance: %d failed, %.0fs total\n", g_failed, since(t0));
    std::ofstream("acceptance_report.json") << g_report.dump(2) << '\n';
    return g_failed ? 1 : 0;
}
