#include "cfront/rd_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "cfront/barriers.hpp"
#include "cfront/errors.hpp"
#include "cfront/parallel.hpp"

namespace cfront {

std::size_t Grid::stride(int k) const {
    std::size_t s = 1;
    for (int j = dim - 1; j > k; --j) s *= n[j];
    return s;
}

std::array<std::size_t, 3> Grid::multi(std::size_t idx) const {
    std::array<std::size_t, 3> m{0, 0, 0};
    for (int k = dim - 1; k >= 0; --k) {
        m[k] = idx % n[k];
        idx /= n[k];
    }
    return m;
}

Point Grid::point(std::size_t idx) const {
    auto m = multi(idx);
    Point p{0, 0, 0};
    for (int k = 0; k < dim; ++k) p[k] = origin[k] + dx * static_cast<double>(m[k]);
    return p;
}

bool Grid::on_boundary(std::size_t idx) const {
    auto m = multi(idx);
    for (int k = 0; k < dim; ++k)
        if (m[k] == 0 || m[k] + 1 == n[k]) return true;
    return false;
}

Scheme parse_scheme(const std::string& s) {
    if (s == "explicit-euler" || s == "euler") return Scheme::Euler;
    if (s == "rk2") return Scheme::RK2;
    throw ValidationError("solver.scheme: expected explicit-euler or rk2, got '" + s + "'");
}

BoundaryPolicy parse_boundary(const std::string& s) {
    if (s == "dirichlet-lower") return BoundaryPolicy::Lower;
    if (s == "dirichlet-upper") return BoundaryPolicy::Upper;
    if (s == "dirichlet-exact-planar") return BoundaryPolicy::ExactPlanar;
    throw ValidationError("solver.boundary: expected dirichlet-lower, dirichlet-upper or dirichlet-exact-planar, got '" +
                          s + "'");
}

std::string to_string(Scheme s) { return s == Scheme::Euler ? "explicit-euler" : "rk2"; }

std::string to_string(BoundaryPolicy b) {
    switch (b) {
    case BoundaryPolicy::Lower: return "dirichlet-lower";
    case BoundaryPolicy::Upper: return "dirichlet-upper";
    case BoundaryPolicy::ExactPlanar: return "dirichlet-exact-planar";
    }
    return "?";
}

BoundaryFn make_boundary(BoundaryPolicy policy, const Barriers& b) {
    switch (policy) {
    case BoundaryPolicy::Lower: return [&b](double t, const Point& z) { return b.lower(t, z); };
    case BoundaryPolicy::Upper: return [&b](double t, const Point& z) { return b.upper(t, z); };
    case BoundaryPolicy::ExactPlanar:
        // planar front of the first facet
        return [&b](double t, const Point& z) {
            const auto& cfg = b.config();
            const Point& e = cfg.direction(0);
            double q = cfg.facet(0).shift - cfg.speed() * t;
            for (int k = 0; k < cfg.dimension(); ++k) q += e[k] * z[k];
            return b.profile()(q);
        };
    }
    throw ValidationError("unknown boundary policy");
}

double choose_dt(const Grid& g, const SolverConfig& cfg, double interval) {
    if (!(cfg.cfl_safety > 0 && cfg.cfl_safety < 1)) throw ValidationError("solver.cfl_safety: must lie in (0, 1)");
    double dt_max = cfg.cfl_safety * g.dx * g.dx / (2.0 * g.dim);
    if (cfg.dt > 0) {
        if (cfg.dt > dt_max * (1 + 1e-12)) {
            std::ostringstream os;
            os << "solver.dt: " << cfg.dt << " violates the CFL bound " << dt_max;
            throw ValidationError(os.str());
        }
        return cfg.dt;
    }
    if (interval > 0) return interval / std::ceil(interval / dt_max);
    return dt_max;
}

Stepper::Stepper(const Grid& reference, const CombustionNonlinearity& nl, const SolverConfig& cfg, BoundaryFn boundary)
    : ref_(reference), nl_(nl), cfg_(cfg), bc_(std::move(boundary)) {
    for (int k = 0; k < ref_.dim; ++k)
        if (ref_.n[k] < 16) throw ValidationError("grid: need at least 16 cells per axis");
    if (!(ref_.dx > 0)) throw ValidationError("grid: dx must be positive");
    dt_ = choose_dt(ref_, cfg_, cfg_.snapshot_interval);
    threads_ = cfg_.threads > 0 ? cfg_.threads : default_threads();
    for (std::size_t i = 0; i < ref_.size(); ++i)
        if (ref_.on_boundary(i)) boundary_idx_.push_back(i);
    k1_.assign(ref_.size(), 0.0);
    k2_.assign(ref_.size(), 0.0);
    tmp_.assign(ref_.size(), 0.0);
}

Grid Stepper::grid_at(double t) const {
    Grid g = ref_;
    if (cfg_.frame_speed != 0) {
        double cells = std::floor(cfg_.frame_speed * t / ref_.dx + 0.5);
        g.origin[g.dim - 1] = ref_.origin[g.dim - 1] + ref_.dx * cells;
    }
    return g;
}

Field Stepper::sample(double t, const BoundaryFn& fn) const {
    Field u(grid_at(t), t);
    parallel_for(u.values.size(), 4096, threads_, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) u.values[i] = fn(t, u.grid.point(i));
    });
    return u;
}

void Stepper::apply_boundary(Field& u) const {
    for (std::size_t i : boundary_idx_) u.values[i] = bc_(u.time, u.grid.point(i));
}

void Stepper::shift_window(Field& u, double t_new) {
    Grid g = grid_at(t_new);
    const int ya = g.dim - 1;
    double d = (g.origin[ya] - u.grid.origin[ya]) / g.dx;
    long s = std::lround(d);
    if (s == 0) return;
    // move values by s rows along y; cells entering the window are boundary
    // cells after this step and get overwritten by the boundary data
    const std::size_t ny = g.n[ya];
    const std::size_t lines = g.size() / ny;
    std::vector<double>& v = u.values;
    for (std::size_t l = 0; l < lines; ++l) {
        double* row = v.data() + l * ny;
        if (s > 0) {
            std::size_t sh = std::min<std::size_t>(static_cast<std::size_t>(s), ny);
            std::copy(row + sh, row + ny, row);
            std::fill(row + ny - sh, row + ny, row[ny - sh - (sh < ny ? 1 : 0)]);
        } else {
            std::size_t sh = std::min<std::size_t>(static_cast<std::size_t>(-s), ny);
            std::copy_backward(row, row + ny - sh, row + ny);
            std::fill(row, row + sh, row[sh]);
        }
    }
    u.grid.origin = g.origin;
}

void Stepper::rhs(const std::vector<double>& u, std::vector<double>& out) const {
    const Grid& g = ref_;
    const double inv = 1.0 / (g.dx * g.dx);
    const int D = g.dim;
    const std::size_t ny = g.n[D - 1];
    const std::size_t lines = g.size() / ny;
    std::array<std::size_t, 3> st{g.stride(0), g.stride(1), g.stride(2)};
    parallel_for(lines, 16, threads_, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t l = lo; l < hi; ++l) {
            // skip lines lying on the boundary in a transverse axis
            std::size_t rem = l;
            bool edge = false;
            for (int k = D - 2; k >= 0; --k) {
                std::size_t m = rem % g.n[k];
                rem /= g.n[k];
                if (m == 0 || m + 1 == g.n[k]) edge = true;
            }
            std::size_t base = l * ny;
            if (edge) {
                for (std::size_t j = 0; j < ny; ++j) out[base + j] = 0;
                continue;
            }
            out[base] = out[base + ny - 1] = 0;
            for (std::size_t j = 1; j + 1 < ny; ++j) {
                std::size_t i = base + j;
                double c = u[i];
                double lap = u[i - 1] + u[i + 1] - 2 * c;
                for (int k = 0; k < D - 1; ++k) lap += u[i - st[k]] + u[i + st[k]] - 2 * c;
                out[i] = lap * inv + nl_.f(c);
            }
        }
    });
}

void Stepper::step(Field& u) {
    if (!u.grid.same_layout(ref_)) throw ValidationError("step: field grid does not match the stepper grid");
    const double t1 = u.time + dt_;
    const std::size_t n = u.values.size();
    rhs(u.values, k1_);
    if (cfg_.scheme == Scheme::Euler) {
        parallel_for(n, 65536, threads_, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) u.values[i] += dt_ * k1_[i];
        });
    } else {
        parallel_for(n, 65536, threads_, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) tmp_[i] = u.values[i] + dt_ * k1_[i];
        });
        Field stage;
        stage.grid = u.grid;
        stage.time = t1;
        stage.values.swap(tmp_);
        apply_boundary(stage);
        rhs(stage.values, k2_);
        stage.values.swap(tmp_);
        parallel_for(n, 65536, threads_, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) u.values[i] += 0.5 * dt_ * (k1_[i] + k2_[i]);
        });
    }
    u.time = t1;
    shift_window(u, t1);
    apply_boundary(u);
    ++steps_;
    struct MM {
        double lo, hi;
    };
    MM mm = blocked_reduce(
        n, 65536, threads_, MM{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()},
        [&](std::size_t i) { return MM{u.values[i], u.values[i]}; },
        [](MM a, MM b) { return MM{std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; });
    min_seen_ = std::min(min_seen_, mm.lo);
    max_seen_ = std::max(max_seen_, mm.hi);
    if (!(mm.lo >= -2 && mm.hi <= 2)) {
        std::ostringstream os;
        os << "solver blow-up at t=" << u.time << ": values in [" << mm.lo << ", " << mm.hi << "]";
        throw NumericalError(os.str());
    }
}

void Stepper::advance_to(Field& u, double t_target) {
    double k = (t_target - u.time) / dt_;
    long steps = std::lround(k);
    if (steps < 0 || std::abs(k - static_cast<double>(steps)) > 1e-6)
        throw ValidationError("advance_to: target time is not a whole number of steps ahead");
    for (long s = 0; s < steps; ++s) step(u);
    u.time = t_target;
}

Field step(const Field& u, const CombustionNonlinearity& nl, const SolverConfig& cfg, const BoundaryFn& boundary) {
    Grid ref = u.grid;
    Stepper st(ref, nl, cfg, boundary);
    Field v = u;
    st.step(v);
    return v;
}

Trajectory solve_cauchy(const Field& u0, const CombustionNonlinearity& nl, const SolverConfig& cfg,
                        const BoundaryFn& boundary, double T, double interval,
                        const std::function<void(const Field&)>& observer) {
    for (double v : u0.values)
        if (!(v >= -1e-12 && v <= 1 + 1e-12)) throw ValidationError("solve_cauchy: initial data outside [0, 1]");
    SolverConfig c = cfg;
    c.snapshot_interval = interval;
    // reference grid = the window at time 0
    Grid ref = u0.grid;
    if (c.frame_speed != 0) {
        double cells = std::floor(c.frame_speed * u0.time / ref.dx + 0.5);
        ref.origin[ref.dim - 1] -= ref.dx * cells;
    }
    Stepper st(ref, nl, c, boundary);
    Trajectory tr;
    tr.dt = st.dt();
    Field u = u0;
    st.apply_boundary(u);
    auto emit = [&](const Field& f) {
        if (observer)
            observer(f);
        else
            tr.snapshots.push_back(f);
    };
    emit(u);
    long k = 1;
    for (;;) {
        double tk = u0.time + static_cast<double>(k) * interval;
        if (tk > T + 1e-9 * interval) break;
        st.advance_to(u, tk);
        emit(u);
        ++k;
    }
    tr.min_value = st.min_seen();
    tr.max_value = st.max_seen();
    return tr;
}

Grid make_box(int dim, std::size_t cells, double dx, double y_center) {
    Grid g;
    g.dim = dim;
    g.dx = dx;
    for (int k = 0; k < dim; ++k) {
        g.n[k] = cells;
        g.origin[k] = -0.5 * dx * static_cast<double>(cells - 1);
    }
    g.origin[dim - 1] += y_center;
    return g;
}

nlohmann::json EntireReport::to_json() const {
    nlohmann::json j;
    j["offsets"] = offsets;
    nlohmann::json inc = nlohmann::json::array();
    for (const auto& m : increments)
        inc.push_back({{"min_increment", m.min_increment},
                       {"sup_increment", m.sup_increment},
                       {"time", m.time},
                       {"where", {m.where[0], m.where[1], m.where[2]}}});
    j["increments"] = inc;
    j["monotone_in_n"] = monotone;
    j["increments_decay"] = increments_decay;
    j["min_vhat_minus_lower"] = min_above_lower;
    j["max_vhat"] = max_value;
    j["points_equal_lower"] = equal_to_lower;
    j["points_equal_one"] = equal_to_one;
    j["min_discrete_dt"] = min_time_derivative;
    j["value_range"] = {min_value_seen, max_value_seen};
    j["seconds"] = seconds;
    return j;
}

EntireResult entire_solution(const Barriers& barriers, const CombustionNonlinearity& nl, const SolverConfig& cfg,
                             const Grid& box, const std::vector<double>& offsets, double T) {
    if (offsets.empty()) throw ValidationError("entire_solution: empty offset list");
    for (std::size_t k = 1; k < offsets.size(); ++k)
        if (!(offsets[k] > offsets[k - 1])) throw ValidationError("entire_solution: offsets must increase");
    auto t0 = std::chrono::steady_clock::now();
    const double c = barriers.config().speed();
    SolverConfig sc = cfg;
    if (sc.snapshot_interval <= 0) sc.snapshot_interval = 1.0 / (4 * c);
    const double iv = sc.snapshot_interval;
    const int threads = sc.threads > 0 ? sc.threads : default_threads();
    BoundaryFn bc = make_boundary(sc.boundary, barriers);
    BoundaryFn lower = make_boundary(BoundaryPolicy::Lower, barriers);

    EntireResult res;
    EntireReport& rep = res.report;
    rep.offsets = offsets;
    rep.min_value_seen = std::numeric_limits<double>::infinity();
    rep.max_value_seen = -std::numeric_limits<double>::infinity();
    std::vector<Field> prev;
    for (double n : offsets) {
        Stepper st(box, nl, sc, bc);
        res.dt = st.dt();
        // start times are snapped onto the snapshot lattice so all runs share it
        double start = -iv * std::round(n / iv);
        Field u = st.sample(start, lower);
        st.apply_boundary(u);
        std::vector<Field> cur;
        if (start >= 0) cur.push_back(u);
        for (long k = static_cast<long>(std::round(start / iv)) + 1;; ++k) {
            double tk = static_cast<double>(k) * iv;
            if (tk > T + 1e-9 * iv) break;
            st.advance_to(u, tk);
            if (tk >= -1e-12) cur.push_back(u);
        }
        rep.min_value_seen = std::min(rep.min_value_seen, st.min_seen());
        rep.max_value_seen = std::max(rep.max_value_seen, st.max_seen());
        if (!prev.empty()) {
            MonotoneCheck mc;
            mc.min_increment = std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < cur.size() && s < prev.size(); ++s) {
                const auto& a = cur[s].values;
                const auto& b = prev[s].values;
                MinLoc lo = blocked_reduce(a.size(), 65536, threads, MinLoc{},
                                           [&](std::size_t i) { return MinLoc{a[i] - b[i], i}; }, min_loc);
                double sup = blocked_reduce(a.size(), 65536, threads, 0.0,
                                            [&](std::size_t i) { return std::abs(a[i] - b[i]); },
                                            [](double x, double y) { return std::max(x, y); });
                mc.sup_increment = std::max(mc.sup_increment, sup);
                if (lo.value < mc.min_increment) {
                    mc.min_increment = lo.value;
                    mc.time = cur[s].time;
                    mc.where = cur[s].grid.point(lo.index);
                }
            }
            rep.increments.push_back(mc);
        }
        prev = std::move(cur);
    }
    res.window = std::move(prev);

    rep.monotone = true;
    for (const auto& m : rep.increments)
        if (m.min_increment < -1e-10) rep.monotone = false;
    rep.increments_decay = true;
    for (std::size_t k = 1; k < rep.increments.size(); ++k)
        if (rep.increments[k].sup_increment > 2 * rep.increments[k - 1].sup_increment) rep.increments_decay = false;

    rep.min_above_lower = std::numeric_limits<double>::infinity();
    rep.max_value = -std::numeric_limits<double>::infinity();
    rep.min_time_derivative = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < res.window.size(); ++s) {
        const Field& f = res.window[s];
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            double vl = barriers.lower(f.time, f.grid.point(i));
            double d = f.values[i] - vl;
            rep.min_above_lower = std::min(rep.min_above_lower, d);
            rep.max_value = std::max(rep.max_value, f.values[i]);
            if (!f.grid.on_boundary(i)) {
                if (d == 0 && vl < 1) ++rep.equal_to_lower;
                if (f.values[i] >= 1) ++rep.equal_to_one;
            }
        }
        if (s > 0) {
            const Field& g = res.window[s - 1];
            long shift = std::lround((f.grid.origin[f.grid.dim - 1] - g.grid.origin[g.grid.dim - 1]) / f.grid.dx);
            const std::size_t ny = f.grid.n[f.grid.dim - 1];
            for (std::size_t i = 0; i < f.values.size(); ++i) {
                long j = static_cast<long>(i % ny) + shift;
                if (j < 0 || j >= static_cast<long>(ny)) continue;
                std::size_t ig = i - (i % ny) + static_cast<std::size_t>(j);
                rep.min_time_derivative =
                    std::min(rep.min_time_derivative, (f.values[i] - g.values[ig]) / (f.time - g.time));
            }
        }
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

SpeedEstimate measure_speed_1d(const CombustionNonlinearity& nl, const SpeedConfig& cfg) {
    Grid g;
    g.dim = 1;
    g.dx = cfg.dx;
    g.n[0] = static_cast<std::size_t>(std::llround(cfg.length / cfg.dx)) + 1;
    g.origin[0] = 0;
    if (g.n[0] < 64) throw ValidationError("measure_speed_1d: domain too short");
    const double h0 = cfg.init_height;
    SolverConfig sc;
    sc.cfl_safety = cfg.cfl_safety;
    BoundaryFn bc = [&](double, const Point& z) { return z[0] < 0.5 * cfg.length ? h0 : 0.0; };
    Stepper st(g, nl, sc, bc);
    Field u(g, 0.0);
    for (std::size_t i = 0; i < g.n[0]; ++i) u.values[i] = (g.point(i)[0] < 0.25 * cfg.length) ? h0 : 0.0;
    st.apply_boundary(u);

    auto level = [&](const Field& f) {
        // rightmost crossing of 1/2
        for (std::size_t i = f.values.size() - 1; i > 0; --i)
            if (f.values[i - 1] >= 0.5 && f.values[i] < 0.5) {
                double a = f.values[i - 1], b = f.values[i];
                return g.dx * (static_cast<double>(i - 1) + (a - 0.5) / (a - b));
            }
        return std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<double> ts, xs;
    double tmax = cfg.t_final > 0 ? cfg.t_final : 1e7;
    long per = std::max(1L, std::lround(cfg.sample_every / st.dt()));
    for (long k = 1;; ++k) {
        st.step(u);
        if (k % per) continue;
        double x = level(u);
        if (std::isnan(x)) throw NumericalError("measure_speed_1d: no front (level 1/2 not crossed)");
        ts.push_back(u.time);
        xs.push_back(x);
        if (x > 0.95 * cfg.length) throw DomainError("measure_speed_1d: level set left the domain, domain too short");
        if (cfg.t_final > 0 ? u.time >= tmax : x >= 0.75 * cfg.length) break;
        if (u.time > 1e6) throw NumericalError("measure_speed_1d: front does not advance");
    }
    // discard the first half, least squares on the rest
    std::size_t h = ts.size() / 2;
    std::vector<double> t(ts.begin() + static_cast<long>(h), ts.end()), x(xs.begin() + static_cast<long>(h), xs.end());
    if (t.size() < 8) throw NumericalError("measure_speed_1d: too few samples for a speed fit");
    double n = static_cast<double>(t.size()), mt = 0, mx = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        mt += t[i] / n;
        mx += x[i] / n;
    }
    double stt = 0, stx = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        stx += (t[i] - mt) * (x[i] - mx);
    }
    SpeedEstimate est;
    est.speed = stx / stt;
    double ss = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        double r = x[i] - mx - est.speed * (t[i] - mt);
        ss += r * r;
    }
    est.stderr_ = std::sqrt(ss / (n - 2) / stt);
    est.samples = t.size();
    est.t_final = u.time;
    if (!(est.speed > 1e-6)) throw NumericalError("measure_speed_1d: flat level-set trajectory, no propagating front");
    return est;
}

} // namespace cfront
