// cfront: batch front-end. Every subcommand writes into its own run directory
// and exits 0 (all checks pass), 2 (bad config) or 3 (numerical failure or a
// failed check).
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iomanip>

#include "CLI11.hpp"
#include "cfront/cli_io.hpp"
#include "cfront/diagnostics.hpp"
#include "cfront/errors.hpp"
#include "cfront/parallel.hpp"
#include "cfront/snapshot.hpp"

using namespace cfront;
using nlohmann::json;

namespace {

struct Outcome {
    json report;
    bool pass = false;
};

struct Ctx {
    RunConfig rc;
    RunDirectory* dir;
    std::uint64_t seed;
    int threads;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string snap_name(const char* stem, std::size_t k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%04zu.cflb", stem, k);
    return buf;
}

void write_mid_slice(Ctx& c, const Field& u, const std::string& name) {
    std::array<std::size_t, 3> mid{u.grid.n[0] / 2, u.grid.n[1] / 2, u.grid.n[2] / 2};
    write_slice_csv(u, u.grid.dim - 1, mid, c.dir->file(name).string());
}

SetupOptions options(const Ctx& c, bool barriers) {
    SetupOptions o;
    o.barriers = barriers;
    o.seed = c.seed;
    o.threads = c.threads;
    o.validation_samples = static_cast<std::size_t>(c.rc.exp_number("samples", 100000));
    return o;
}

json profile_json(const Setup& s) {
    ProfileCheck pc = check_profile(s.profile, s.nl);
    TailRates tr = tail_rates(s.profile, s.nl);
    return {{"c_f", s.speed},
            {"beta0", s.profile.beta0()},
            {"characteristic_root", pc.char_root},
            {"fitted_left_rate", tr.fitted_left_rate},
            {"fitted_right_rate", tr.fitted_right_rate},
            {"gamma_star", s.nl.gamma_star()},
            {"ode_residual", pc.ode_residual},
            {"tail_relative_error", pc.tail_error},
            {"beta0_relative_error", pc.beta0_rel_error},
            {"pass", pc.ode_residual <= 1e-6 && pc.tail_error <= 1e-8 && pc.beta0_rel_error <= 0.01}};
}

Outcome cmd_profile(Ctx& c) {
    Setup s = build_setup(c.rc, options(c, false));
    WaveProfile p = build_profile(s.nl, s.speed, c.rc.exp_number("half_width", 60), c.rc.exp_number("step", 0.01));
    {
        std::ofstream os(c.dir->file("profile.csv"));
        p.write_csv(os);
    }
    json j = profile_json(s);
    return {j, j["pass"].get<bool>()};
}

json surface_json(const Ctx& c, const Setup& s, double alpha) {
    auto count = static_cast<std::size_t>(c.rc.exp_number("samples", 100000));
    double box = c.rc.exp_number("box", 10);
    SurfaceCheck sc = check_surface(s.front, alpha, count, box, c.seed, 1000, c.threads);
    SurfaceConstants k = fit_surface_constants(s.front, box, 20000, c.seed, c.threads);
    ScaledSurface S(s.front, alpha);
    bool pass = sc.max_residual <= 1e-12 && sc.min_gap >= 0 && sc.max_fd_error <= 1e-6 &&
                sc.holdout_ratio <= sc.c_hat;
    return {{"alpha", alpha},
            {"samples", sc.count},
            {"max_implicit_residual", sc.max_residual},
            {"min_phi_minus_psi", sc.min_gap},
            {"c_hat", sc.c_hat},
            {"holdout_ratio", sc.holdout_ratio},
            {"max_fd_error", sc.max_fd_error},
            {"fd_points", sc.fd_points},
            {"c1_hat", k.c1_hat},
            {"dt_log_h_range", {k.dt_log_h_min, k.dt_log_h_max}},
            {"two_c_f", 2 * s.speed},
            {"phi_at_origin", S.solve_phi(0, {0, 0})},
            {"h_at_origin", S.flatness(0, {0, 0}).pair_sum},
            {"pass", pass}};
}

Outcome cmd_surface(Ctx& c) {
    Setup s = build_setup(c.rc, options(c, false));
    double alpha = c.rc.barrier.alpha.value_or(1.0);
    json j = surface_json(c, s, alpha);
    ScaledSurface S(s.front, alpha);
    std::ofstream os(c.dir->file("surface_slice.csv"));
    os << std::setprecision(17) << "x,phi,psi,h\n";
    if (s.front.dimension() >= 2)
        for (int k = -200; k <= 200; ++k) {
            XVec x{0.05 * k, 0};
            os << x[0] << ',' << S.solve_phi(0, x) << ',' << S.psi(0, x) << ',' << S.flatness(0, x).pair_sum << '\n';
        }
    return {j, j["pass"].get<bool>()};
}

SampleSpec sample_spec(const Ctx& c) {
    SampleSpec sp;
    sp.count = static_cast<std::size_t>(c.rc.exp_number("samples", 100000));
    sp.box = c.rc.exp_number("box", 10);
    sp.x_prime = c.rc.exp_number("x_prime", 2);
    sp.x_dprime = c.rc.exp_number("x_dprime", 2);
    sp.eta_span = c.rc.exp_number("eta_span", 40);
    sp.seed = c.seed;
    sp.threads = c.threads;
    return sp;
}

json barrier_json(const Ctx& c, const Setup& s, bool* pass) {
    json j;
    if (s.schedule) {
        j = s.schedule->to_json();
        *pass = s.schedule->report.pass();
    } else {
        SampleSpec sp = sample_spec(c);
        SurfaceConstants k = fit_surface_constants(s.front, sp.box, 20000, sp.seed, c.threads);
        Barriers b(s.front, s.profile, s.nl, s.params);
        ValidationReport r = validate_parameters(b, sp, k.c1_hat, true);
        j["validation"] = r.to_json();
        *pass = r.pass();
    }
    j["v_star"] = s.v_star;
    return j;
}

Outcome cmd_barriers(Ctx& c) {
    SetupOptions o = options(c, true);
    Setup s = build_setup(c.rc, o);
    bool pass = false;
    json j = barrier_json(c, s, &pass);
    j["pass"] = pass;
    return {j, pass};
}

Outcome cmd_simulate(Ctx& c) {
    Setup s = build_setup(c.rc, options(c, true));
    Barriers b(s.front, s.profile, s.nl, s.params);
    BoundaryFn bc = make_boundary(s.solver.boundary, b);
    std::string init = c.rc.experiment.value("init", std::string("lower"));
    Field u0;
    if (init == "lower" || init == "upper" || init == "planar") {
        BoundaryPolicy pol = init == "lower"   ? BoundaryPolicy::Lower
                             : init == "upper" ? BoundaryPolicy::Upper
                                               : BoundaryPolicy::ExactPlanar;
        Stepper st(s.box, s.nl, s.solver, bc);
        u0 = st.sample(0.0, make_boundary(pol, b));
    } else {
        u0 = read_snapshot(init);
    }
    const double T = c.rc.solver.T * s.unit;
    const double iv = s.solver.snapshot_interval;
    const auto save_every = static_cast<std::size_t>(c.rc.exp_number("save_every", 4));
    std::vector<Field> kept;
    std::size_t k = 0;
    auto t0 = std::chrono::steady_clock::now();
    Trajectory tr = solve_cauchy(u0, s.nl, s.solver, bc, T, iv, [&](const Field& f) {
        if (k % save_every == 0) {
            write_snapshot(f, c.dir->file(snap_name("u", k)).string());
            kept.push_back(f);
        }
        ++k;
    });
    json j;
    j["snapshots"] = k;
    j["dt"] = tr.dt;
    j["value_range"] = {tr.min_value, tr.max_value};
    bool mp = tr.min_value >= -1e-12 && tr.max_value <= 1 + 1e-12;
    j["maximum_principle"] = mp;
    SandwichReport sw = sandwich_and_monotonicity(kept, b, {}, c.threads);
    j["sandwich"] = sw.to_json();
    j["seconds"] = seconds_since(t0);
    bool pass = mp && (init != "lower" || sw.lower_violation <= 1e-8);
    write_mid_slice(c, kept.back(), "final_slice.csv");
    j["pass"] = pass;
    return {j, pass};
}

struct EntireRun {
    EntireResult res;
    bool pass = false;
    json report;
};

EntireRun run_entire(Ctx& c, const Setup& s, const Barriers& b) {
    std::vector<double> offsets;
    for (double n : c.rc.solver.offsets) offsets.push_back(n * s.unit);
    const double T = c.rc.solver.T * s.unit;
    EntireRun out;
    out.res = entire_solution(b, s.nl, s.solver, s.box, offsets, T);
    const EntireReport& r = out.res.report;
    out.report = r.to_json();
    out.report["dt"] = out.res.dt;
    bool mp = r.min_value_seen >= -1e-12 && r.max_value_seen <= 1 + 1e-12;
    out.report["maximum_principle"] = mp;
    out.pass = r.monotone && r.increments_decay && r.min_above_lower >= 0 && r.max_value <= 1 && mp;
    auto save_every = static_cast<std::size_t>(c.rc.exp_number("save_every", 8));
    for (std::size_t k = 0; k < out.res.window.size(); ++k)
        if (k % save_every == 0 || k + 1 == out.res.window.size())
            write_snapshot(out.res.window[k], c.dir->file(snap_name("vhat", k)).string());
    write_mid_slice(c, out.res.window.front(), "vhat_t0_slice.csv");
    {
        std::ofstream os(c.dir->file("increments.csv"));
        os << std::setprecision(17) << "n_lo,n_hi,min_increment,sup_increment\n";
        for (std::size_t k = 0; k < r.increments.size(); ++k)
            os << offsets[k] << ',' << offsets[k + 1] << ',' << r.increments[k].min_increment << ','
               << r.increments[k].sup_increment << '\n';
    }
    return out;
}

json structure_json(Ctx& c, const Setup& s, const Barriers& b, const std::vector<Field>& window, bool* pass) {
    json j;
    const double cf = s.speed;
    std::vector<double> eps{0.5, 0.25, 0.1, 0.05, 0.01};
    MEpsTable m0 = extract_interface_and_Meps(window.front(), s.front, eps, c.threads);
    MEpsTable m1 = extract_interface_and_Meps(window.back(), s.front, eps, c.threads);
    j["M_eps"] = {m0.to_json(), m1.to_json()};
    {
        std::ofstream os(c.dir->file("m_eps.csv"));
        os << "time,eps,M_eps,censored\n";
        for (const auto* m : {&m0, &m1})
            for (const auto& r : m->rows) os << m->time << ',' << r.eps << ',' << r.m << ',' << r.censored << '\n';
    }
    std::vector<double> times;
    std::size_t stride = std::max<std::size_t>(1, window.size() / 12);
    for (std::size_t k = 0; k < window.size(); k += stride) times.push_back(window[k].time);
    double half = 0.5 * window.front().grid.dx * static_cast<double>(window.front().grid.n[0] - 1);
    MeanSpeedReport ms = mean_speed_estimate(s.front, times, half, 10 / cf * (1 - 1e-9), 10000, c.threads);
    j["mean_speed"] = ms.to_json();
    j["mean_speed"]["c_f"] = cf;
    {
        std::ofstream os(c.dir->file("mean_speed.csv"));
        os << std::setprecision(17) << "gap,distance,ratio\n";
        for (const auto& r : ms.table) os << r[0] << ',' << r[1] << ',' << r[2] << '\n';
    }
    LevelSetReport ls = level_set_discrepancy(window.back(), s.front, s.profile, 0.5, 10 / cf);
    j["level_set_crosscheck"] = ls.to_json();
    std::vector<Field> sub;
    std::size_t gstride = std::max<std::size_t>(1, window.size() / 6);
    for (std::size_t k = 0; k < window.size(); k += gstride) sub.push_back(window[k]);
    WeightedGapReport wg = weighted_gap_report(sub, b, s.v_star, 10, c.threads);
    j["weighted_gap"] = wg.to_json();
    {
        std::ofstream os(c.dir->file("weighted_gap.csv"));
        os << std::setprecision(17) << "d_lo,d_hi,sup_ratio,count\n";
        for (const auto& bn : wg.bins) os << bn.d_lo << ',' << bn.d_hi << ',' << bn.sup_ratio << ',' << bn.count << '\n';
    }
    SandwichReport sw = sandwich_and_monotonicity(window, b, {2 / cf, 5 / cf, 10 / cf}, c.threads);
    j["sandwich"] = sw.to_json();
    if (c.rc.experiment.value("tau_check", false)) {
        double n = c.rc.solver.offsets.back() * s.unit;
        TauContinuity tc = tau_continuity(s.front, s.profile, s.nl, s.params, s.solver, s.box, n,
                                          c.rc.solver.T * s.unit, 1e-2, 0);
        j["tau_continuity"] = tc.to_json();
    }
    *pass = m0.monotone && m1.monotone && ms.pass && wg.pass;
    j["pass"] = *pass;
    return j;
}

Outcome cmd_entire(Ctx& c) {
    Setup s = build_setup(c.rc, options(c, true));
    Barriers b(s.front, s.profile, s.nl, s.params);
    EntireRun e = run_entire(c, s, b);
    json j;
    j["entire"] = e.report;
    SandwichReport sw = sandwich_and_monotonicity(e.res.window, b, {2 / s.speed, 5 / s.speed, 10 / s.speed}, c.threads);
    j["sandwich"] = sw.to_json();
    j["pass"] = e.pass;
    return {j, e.pass};
}

Outcome cmd_verify(Ctx& c) {
    // the mean-speed check needs snapshots spanning 10/c_f
    if (c.rc.solver.scaled ? c.rc.solver.T < 10 : false)
        throw ValidationError("solver.T: verify needs T >= 10 (units of 1/c_f)");
    Setup s = build_setup(c.rc, options(c, true));
    if (c.rc.solver.T * s.unit < 10 / s.speed) throw ValidationError("solver.T: verify needs T >= 10/c_f");
    json j;
    j["profile"] = profile_json(s);
    j["surface"] = surface_json(c, s, 1.0);
    bool bpass = false;
    j["barriers"] = barrier_json(c, s, &bpass);
    Barriers b(s.front, s.profile, s.nl, s.params);
    EntireRun e = run_entire(c, s, b);
    j["entire"] = e.report;
    bool spass = false;
    j["structure"] = structure_json(c, s, b, e.res.window, &spass);
    bool pass = j["profile"]["pass"].get<bool>() && j["surface"]["pass"].get<bool>() && bpass && e.pass && spass;
    j["pass"] = pass;
    return {j, pass};
}

Outcome cmd_speed(Ctx& c) {
    std::vector<double> thetas{0.2, 0.3, 0.5};
    if (c.rc.experiment.contains("thetas")) thetas = c.rc.experiment["thetas"].get<std::vector<double>>();
    SpeedConfig sc;
    sc.dx = c.rc.exp_number("dx", sc.dx);
    sc.length = c.rc.exp_number("length", sc.length);
    json rows = json::array();
    bool pass = true;
    std::ofstream os(c.dir->file("speed.csv"));
    os << std::setprecision(12) << "theta,c_shooting,c_measured,stderr,rel_error,seconds\n";
    for (double th : thetas) {
        auto nl = make_combustion(th, c.rc.amplitude, c.rc.exponent, c.rc.sigma);
        double cs = find_wave_speed(nl);
        auto t0 = std::chrono::steady_clock::now();
        SpeedEstimate e = measure_speed_1d(nl, sc);
        double secs = seconds_since(t0);
        double rel = std::abs(e.speed / cs - 1);
        bool ok = rel <= 0.01 && secs <= 30;
        pass = pass && ok;
        rows.push_back({{"theta", th},
                        {"c_shooting", cs},
                        {"c_measured", e.speed},
                        {"stderr", e.stderr_},
                        {"relative_error", rel},
                        {"seconds", secs},
                        {"pass", ok}});
        os << th << ',' << cs << ',' << e.speed << ',' << e.stderr_ << ',' << rel << ',' << secs << '\n';
    }
    return {{{"families", rows}, {"pass", pass}}, pass};
}

Outcome cmd_stability(Ctx& c) {
    Setup s = build_setup(c.rc, options(c, true));
    Barriers b(s.front, s.profile, s.nl, s.params);
    PerturbationSpec ps;
    ps.height = c.rc.exp_number("height", -1);
    ps.radius = c.rc.exp_number("radius", 3) * s.unit;
    ps.base_vhat = c.rc.experiment.value("base", std::string("vhat")) != "lower";
    ps.seed = c.seed;
    double T = c.rc.exp_number("T", 40) * s.unit;
    double off = c.rc.exp_number("vhat_offset", c.rc.solver.offsets.back()) * s.unit;
    StabilityReport r = stability_run(b, s.nl, s.solver, s.box, off, ps, T);
    std::ofstream os(c.dir->file("stability.csv"));
    os << std::setprecision(17) << "t,sup_diff,excess_over_W,envelope\n";
    for (std::size_t k = 0; k < r.times.size(); ++k)
        os << r.times[k] << ',' << r.sup_diff[k] << ',' << r.w_excess[k] << ',' << r.envelope[k] << '\n';
    json j = r.to_json();
    return {j, r.pass()};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cfront: curved combustion fronts, barriers and entire solutions"};
    app.require_subcommand(1);
    std::string config_path, out_dir = "runs";
    int threads = 0;
    std::uint64_t seed = 1;
    app.add_option("--config", config_path, "run configuration (JSON)")->required();
    app.add_option("--out", out_dir, "parent directory for run directories");
    app.add_option("--threads", threads, "worker threads (default: CFL_THREADS or 1)")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "seed for random sample placement");
    app.fallthrough();
    for (const auto& name : kSubcommands) app.add_subcommand(name);
    CLI11_PARSE(app, argc, argv);
    std::string sub = app.get_subcommands().front()->get_name();

    if (threads > 0) set_threads(threads);
    RunConfig rc;
    try {
        rc = load_run_config(config_path);
    } catch (const ValidationError& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        return 2;
    }
    std::string hash = config_hash(rc.source);
    RunDirectory dir(out_dir, sub, hash);
    {
        std::ofstream os(dir.file("config.json"));
        os << rc.source.dump(2) << '\n';
    }
    Ctx ctx{rc, &dir, seed, default_threads()};
    json meta = {{"subcommand", sub}, {"config_hash", hash}, {"seed", seed}, {"threads", ctx.threads}};
    int code = 0;
    auto t0 = std::chrono::steady_clock::now();
    try {
        Outcome o;
        if (sub == "profile") o = cmd_profile(ctx);
        else if (sub == "surface") o = cmd_surface(ctx);
        else if (sub == "barriers-validate") o = cmd_barriers(ctx);
        else if (sub == "simulate") o = cmd_simulate(ctx);
        else if (sub == "entire") o = cmd_entire(ctx);
        else if (sub == "verify") o = cmd_verify(ctx);
        else if (sub == "speed") o = cmd_speed(ctx);
        else o = cmd_stability(ctx);
        o.report["seconds"] = seconds_since(t0);
        dir.write_json("report.json", o.report);
        code = o.pass ? 0 : 3;
        meta["status"] = o.pass ? "pass" : "fail";
    } catch (const ValidationError& e) {
        std::cerr << "invalid config: " << e.what() << '\n';
        dir.write_json("error.json", {{"kind", "validation"}, {"message", e.what()}});
        code = 2;
        meta["status"] = "invalid";
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\ndiagnostics: " << (dir.path() / "error.json").string()
                  << '\n';
        dir.write_json("error.json", {{"kind", "numerical"}, {"message", e.what()}});
        code = 3;
        meta["status"] = "error";
    }
    meta["exit_code"] = code;
    dir.write_manifest(meta);
    std::cout << dir.path().string() << '\n';
    if (code == 3) std::cerr << "checks failed; see " << (dir.path() / "report.json").string() << '\n';
    return code;
}
