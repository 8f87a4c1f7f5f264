#include "cfront/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "cfront/errors.hpp"
#include "cfront/parallel.hpp"

namespace cfront {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kChunk = 8192;

int resolve(int threads) { return threads > 0 ? threads : default_threads(); }

// index in b of the cell of a at the same physical point, or npos; grids differ
// only by a whole-cell shift along the last axis
constexpr std::size_t npos = static_cast<std::size_t>(-1);

std::size_t aligned(const Grid& a, const Grid& b, std::size_t i) {
    const int ya = a.dim - 1;
    long shift = std::lround((a.origin[ya] - b.origin[ya]) / a.dx);
    const std::size_t ny = a.n[ya];
    long j = static_cast<long>(i % ny) + shift;
    if (j < 0 || j >= static_cast<long>(ny)) return npos;
    return i - (i % ny) + static_cast<std::size_t>(j);
}

void json_point(nlohmann::json& j, const Point& p) { j = {p[0], p[1], p[2]}; }

bool nonincreasing(const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k)
        if (v[k] > v[k - 1]) return false;
    return true;
}

} // namespace

// ---- sandwich and monotonicity ----

nlohmann::json SandwichReport::to_json() const {
    nlohmann::json j;
    j["lower_violation"] = lower_violation;
    j["upper_violation"] = upper_violation;
    j["lower_violation_time"] = lower_time;
    j["upper_violation_time"] = upper_time;
    json_point(j["lower_violation_where"], lower_where);
    json_point(j["upper_violation_where"], upper_where);
    j["min_discrete_dt"] = min_dt;
    nlohmann::json f = nlohmann::json::array();
    for (const auto& t : floors) f.push_back({{"rho", t.rho}, {"k_hat", t.k_hat}, {"points", t.points}});
    j["tube_floors"] = f;
    j["snapshots"] = snapshots;
    return j;
}

SandwichReport sandwich_and_monotonicity(const std::vector<Field>& traj, const Barriers& b,
                                         const std::vector<double>& rhos, int threads) {
    if (rhos.size() > 4) throw ValidationError("sandwich_and_monotonicity: at most 4 tube radii");
    const int th = resolve(threads);
    const auto& cfg = b.config();
    const bool ridge = cfg.size() >= 2;
    SandwichReport rep;
    rep.snapshots = traj.size();
    rep.min_dt = kInf;
    for (double r : rhos) rep.floors.push_back({r, kInf, 0});

    struct Acc {
        double lo = 0, up = 0;
        std::size_t lo_i = 0, up_i = 0;
        double dt = kInf;
        std::array<double, 4> k{kInf, kInf, kInf, kInf};
        std::array<std::size_t, 4> cnt{0, 0, 0, 0};
    };
    for (std::size_t s = 0; s < traj.size(); ++s) {
        const Field& u = traj[s];
        const Field* next = s + 1 < traj.size() ? &traj[s + 1] : nullptr;
        const double dt = next ? next->time - u.time : 0;
        Acc a = blocked_reduce(
            u.values.size(), kChunk, th, Acc{},
            [&](std::size_t i) {
                Acc r;
                if (u.grid.on_boundary(i)) return r;
                Point z = u.grid.point(i);
                r.lo = std::max(0.0, b.lower(u.time, z) - u.values[i]);
                r.up = std::max(0.0, u.values[i] - b.upper(u.time, z));
                r.lo_i = r.up_i = i;
                if (next) {
                    std::size_t j = aligned(u.grid, next->grid, i);
                    if (j != npos && !next->grid.on_boundary(j)) {
                        r.dt = (next->values[j] - u.values[i]) / dt;
                        if (ridge && !rhos.empty()) {
                            double d = ridge_distance(cfg, u.time, z);
                            for (std::size_t k = 0; k < rhos.size(); ++k)
                                if (d <= rhos[k]) {
                                    r.k[k] = r.dt;
                                    r.cnt[k] = 1;
                                }
                        }
                    }
                }
                return r;
            },
            [](Acc x, const Acc& y) {
                if (y.lo > x.lo) {
                    x.lo = y.lo;
                    x.lo_i = y.lo_i;
                }
                if (y.up > x.up) {
                    x.up = y.up;
                    x.up_i = y.up_i;
                }
                x.dt = std::min(x.dt, y.dt);
                for (int k = 0; k < 4; ++k) {
                    x.k[k] = std::min(x.k[k], y.k[k]);
                    x.cnt[k] += y.cnt[k];
                }
                return x;
            });
        if (a.lo > rep.lower_violation) {
            rep.lower_violation = a.lo;
            rep.lower_time = u.time;
            rep.lower_where = u.grid.point(a.lo_i);
        }
        if (a.up > rep.upper_violation) {
            rep.upper_violation = a.up;
            rep.upper_time = u.time;
            rep.upper_where = u.grid.point(a.up_i);
        }
        rep.min_dt = std::min(rep.min_dt, a.dt);
        for (std::size_t k = 0; k < rhos.size(); ++k) {
            rep.floors[k].k_hat = std::min(rep.floors[k].k_hat, a.k[k]);
            rep.floors[k].points += a.cnt[k];
        }
    }
    return rep;
}

// ---- M_eps ----

nlohmann::json MEpsTable::to_json() const {
    nlohmann::json j;
    j["time"] = time;
    j["max_distance"] = max_distance;
    j["monotone"] = monotone;
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : rows)
        rs.push_back({{"eps", r.eps}, {"M_eps", r.m}, {"censored", r.censored}, {"violators", r.violators}});
    j["rows"] = rs;
    return j;
}

MEpsTable extract_interface_and_Meps(const Field& u, const FrontConfiguration& cfg, const std::vector<double>& eps,
                                     int threads) {
    for (double e : eps)
        if (!(e > 0 && e < 1)) throw ValidationError("M_eps: eps must lie in (0, 1)");
    const int th = resolve(threads);
    const std::size_t n = u.values.size();
    std::vector<double> dist(n);
    std::vector<signed char> side(n);
    parallel_for(n, kChunk, th, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            Point z = u.grid.point(i);
            dist[i] = slice_boundary_distance(cfg, u.time, z);
            double q = min_q(cfg, u.time, z);
            side[i] = q < 0 ? 1 : (q > 0 ? -1 : 0);
        }
    });
    MEpsTable tab;
    tab.time = u.time;
    double dmax_plus = 0, dmax_minus = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (side[i] > 0) dmax_plus = std::max(dmax_plus, dist[i]);
        if (side[i] < 0) dmax_minus = std::max(dmax_minus, dist[i]);
    }
    tab.max_distance = std::max(dmax_plus, dmax_minus);
    // sort once by distance, descending; the first violator gives M_eps
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
    std::vector<double> sorted_eps = eps;
    for (double e : sorted_eps) {
        MEpsRow row;
        row.eps = e;
        bool found = false;
        for (std::size_t i : order) {
            bool bad = (side[i] > 0 && u.values[i] < 1 - e) || (side[i] < 0 && u.values[i] > e);
            if (!bad) continue;
            if (!found) {
                row.m = dist[i];
                found = true;
            }
            ++row.violators;
        }
        double margin = 2 * u.grid.dx;
        if (found) {
            // no sound point beyond the violator on the grid: M_eps is censored
            row.censored = row.m > std::min(dmax_plus, dmax_minus) - margin;
        }
        tab.rows.push_back(row);
    }
    tab.monotone = true;
    for (std::size_t a = 0; a < tab.rows.size(); ++a)
        for (std::size_t b = 0; b < tab.rows.size(); ++b)
            if (tab.rows[a].eps < tab.rows[b].eps && tab.rows[a].m < tab.rows[b].m) tab.monotone = false;
    return tab;
}

// ---- mean speed ----

nlohmann::json MeanSpeedReport::to_json() const {
    nlohmann::json j;
    j["gamma_hat"] = gamma_hat;
    j["slope_vs_inverse_gap"] = slope;
    j["relative_error"] = rel_error;
    j["fit_residual"] = fit_residual;
    j["pairs"] = pairs;
    j["samples_per_interface"] = samples_per_interface;
    j["half_width"] = half_width;
    j["pass"] = pass;
    return j;
}

namespace {

std::vector<Point> sample_interface(const FrontConfiguration& cfg, double t, double L, std::size_t samples) {
    const int N = cfg.dimension();
    auto height = [&](const Point& x) {
        double y = -kInf;
        for (std::size_t i = 0; i < cfg.size(); ++i) {
            const Point& e = cfg.direction(i);
            double v = cfg.speed() * t - cfg.facet(i).shift;
            for (int k = 0; k < N - 1; ++k) v -= e[k] * x[k];
            y = std::max(y, v / cfg.sin_angle(i));
        }
        return y;
    };
    std::vector<Point> pts;
    if (N == 1) {
        pts.push_back({height({0, 0, 0}), 0, 0});
        return pts;
    }
    std::size_t m = N == 2 ? samples : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(samples))));
    auto coord = [&](std::size_t k) { return -L + 2 * L * static_cast<double>(k) / static_cast<double>(m - 1); };
    if (N == 2) {
        for (std::size_t a = 0; a < m; ++a) {
            Point p{coord(a), 0, 0};
            p[1] = height(p);
            pts.push_back(p);
        }
    } else {
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) {
                Point p{coord(a), coord(b), 0};
                p[2] = height(p);
                pts.push_back(p);
            }
    }
    return pts;
}

} // namespace

MeanSpeedReport mean_speed_estimate(const FrontConfiguration& cfg, const std::vector<double>& times,
                                    double half_width, double min_gap, std::size_t samples, int threads) {
    const double c = cfg.speed();
    if (times.size() < 8) throw ValidationError("mean_speed_estimate: need at least 8 snapshot times");
    auto [tmin, tmax] = std::minmax_element(times.begin(), times.end());
    if (*tmax - *tmin < 10 / c * (1 - 1e-12))
        throw ValidationError("mean_speed_estimate: snapshot times must span at least 10/c_f");
    if (samples < 16) throw ValidationError("mean_speed_estimate: too few interface samples");
    const int th = resolve(threads);
    MeanSpeedReport rep;
    rep.half_width = half_width;
    std::vector<std::vector<Point>> gam;
    for (double t : times) gam.push_back(sample_interface(cfg, t, half_width, samples));
    rep.samples_per_interface = gam.front().size();
    auto one_way = [&](std::size_t a, std::size_t b) {
        const auto& P = gam[a];
        return blocked_reduce(P.size(), 256, th, kInf,
                              [&](std::size_t k) { return slice_boundary_distance(cfg, times[b], P[k]); },
                              [](double x, double y) { return std::min(x, y); });
    };
    std::vector<double> xs, ys;
    for (std::size_t a = 0; a < times.size(); ++a)
        for (std::size_t b = a + 1; b < times.size(); ++b) {
            double gap = std::abs(times[b] - times[a]);
            if (gap == 0 || gap < min_gap) continue;
            double d = std::min(one_way(a, b), one_way(b, a));
            rep.table.push_back({gap, d, d / gap});
            xs.push_back(1 / gap);
            ys.push_back(d / gap);
        }
    rep.pairs = xs.size();
    if (rep.pairs < 2) throw ValidationError("mean_speed_estimate: fewer than two usable pairs");
    double n = static_cast<double>(xs.size()), mx = 0, my = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k] / n;
        my += ys[k] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        sxx += (xs[k] - mx) * (xs[k] - mx);
        sxy += (xs[k] - mx) * (ys[k] - my);
    }
    rep.slope = sxx > 0 ? sxy / sxx : 0;
    rep.gamma_hat = my - rep.slope * mx;
    double ss = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        double r = ys[k] - rep.gamma_hat - rep.slope * xs[k];
        ss += r * r;
    }
    rep.fit_residual = std::sqrt(ss / n);
    rep.rel_error = std::abs(rep.gamma_hat / c - 1);
    rep.pass = rep.rel_error <= 0.02;
    return rep;
}

// ---- half-level cross-check ----

nlohmann::json LevelSetReport::to_json() const {
    return {{"level", level},
            {"profile_offset", profile_offset},
            {"points", points},
            {"max_discrepancy", max_discrepancy},
            {"mean_discrepancy", mean_discrepancy},
            {"ridge_exclusion", ridge_exclusion},
            {"dx", dx},
            {"within_2dx", within_2dx}};
}

LevelSetReport level_set_discrepancy(const Field& u, const FrontConfiguration& cfg, const WaveProfile& profile,
                                     double level, double ridge_exclusion) {
    LevelSetReport rep;
    rep.level = level;
    rep.profile_offset = profile.inverse(level);
    rep.ridge_exclusion = ridge_exclusion;
    rep.dx = u.grid.dx;
    const Grid& g = u.grid;
    const int ya = g.dim - 1;
    const std::size_t ny = g.n[ya];
    const std::size_t lines = g.size() / ny;
    double sum = 0;
    for (std::size_t l = 0; l < lines; ++l) {
        std::size_t base = l * ny;
        if (g.on_boundary(base + 1)) continue;
        for (std::size_t j = 0; j + 1 < ny; ++j) {
            double a = u.values[base + j], b = u.values[base + j + 1];
            if (!(a >= level && b < level)) continue;
            Point z = g.point(base + j);
            z[ya] += g.dx * (a - level) / (a - b);
            if (cfg.size() >= 2 && slice_ridge_distance(cfg, u.time, z) < ridge_exclusion) continue;
            double d = std::abs(min_q(cfg, u.time, z) - rep.profile_offset);
            rep.max_discrepancy = std::max(rep.max_discrepancy, d);
            sum += d;
            ++rep.points;
        }
    }
    if (rep.points) rep.mean_discrepancy = sum / static_cast<double>(rep.points);
    rep.within_2dx = rep.points > 0 && rep.max_discrepancy <= 2 * g.dx;
    return rep;
}

// ---- weighted gap ----

nlohmann::json WeightedGapReport::to_json() const {
    nlohmann::json j;
    j["v"] = v;
    nlohmann::json bs = nlohmann::json::array();
    for (const auto& bn : bins)
        bs.push_back({{"d_lo", bn.d_lo}, {"d_hi", bn.d_hi}, {"sup_ratio", bn.sup_ratio}, {"count", bn.count}});
    j["bins"] = bs;
    j["decreasing"] = decreasing;
    j["far_value"] = far_value;
    j["pass"] = pass;
    return j;
}

WeightedGapReport weighted_gap_report(const std::vector<Field>& fields, const Barriers& b, double v,
                                      std::size_t nbins, int threads) {
    if (nbins < 2) throw ValidationError("weighted_gap_report: need at least two bins");
    if (fields.empty()) throw ValidationError("weighted_gap_report: no fields");
    const auto& cfg = b.config();
    if (cfg.size() < 2) throw DomainError("weighted_gap_report: needs a ridge (two or more facets)");
    const int th = resolve(threads);
    double dmax = 0;
    for (const Field& f : fields)
        dmax = std::max(dmax, blocked_reduce(f.values.size(), kChunk, th, 0.0,
                                             [&](std::size_t i) {
                                                 return f.grid.on_boundary(i)
                                                            ? 0.0
                                                            : ridge_distance(cfg, f.time, f.grid.point(i));
                                             },
                                             [](double x, double y) { return std::max(x, y); }));
    const double w = dmax / static_cast<double>(nbins) * (1 + 1e-12);
    WeightedGapReport rep;
    rep.v = v;
    rep.bins.resize(nbins);
    for (std::size_t k = 0; k < nbins; ++k) {
        rep.bins[k].d_lo = w * static_cast<double>(k);
        rep.bins[k].d_hi = w * static_cast<double>(k + 1);
    }
    using Acc = std::vector<std::pair<double, std::size_t>>;
    for (const Field& f : fields) {
        Acc a = blocked_reduce(
            f.values.size(), kChunk, th, Acc(nbins, {0.0, 0}),
            [&](std::size_t i) {
                Acc r(nbins, {0.0, 0});
                if (f.grid.on_boundary(i)) return r;
                Point z = f.grid.point(i);
                double d = ridge_distance(cfg, f.time, z);
                double m = b.weight_exponent(f.time, z);
                double weight = std::min(1.0, std::exp(-v * m));
                double ratio = std::abs(f.values[i] - b.lower(f.time, z)) / weight;
                std::size_t k = std::min(nbins - 1, static_cast<std::size_t>(d / w));
                r[k] = {ratio, 1};
                return r;
            },
            [](Acc x, const Acc& y) {
                for (std::size_t k = 0; k < x.size(); ++k) {
                    x[k].first = std::max(x[k].first, y[k].first);
                    x[k].second += y[k].second;
                }
                return x;
            });
        for (std::size_t k = 0; k < nbins; ++k) {
            rep.bins[k].sup_ratio = std::max(rep.bins[k].sup_ratio, a[k].first);
            rep.bins[k].count += a[k].second;
        }
    }
    std::vector<double> curve;
    for (const auto& bn : rep.bins)
        if (bn.count) curve.push_back(bn.sup_ratio);
    rep.decreasing = nonincreasing(curve);
    rep.far_value = curve.empty() ? kInf : curve.back();
    rep.pass = rep.decreasing && rep.far_value <= 0.05;
    return rep;
}

// ---- stability ----

nlohmann::json StabilityReport::to_json() const {
    nlohmann::json j;
    j["height"] = height;
    j["radius"] = radius;
    j["admissible"] = admissible;
    j["min_u0_minus_lower"] = min_above_lower;
    j["admissibility_ratio"] = admissibility_ratio;
    j["initial_excess_over_W"] = initial_w_excess;
    j["final_sup_diff"] = final_diff;
    j["decays"] = decays;
    j["eventually_decreasing"] = eventually_decreasing;
    j["single_snapshot_upticks"] = upticks;
    j["dominated_by_W"] = dominated;
    j["max_excess_over_W"] = w_excess.empty() ? 0.0 : *std::max_element(w_excess.begin(), w_excess.end());
    j["seconds"] = seconds;
    j["pass"] = pass();
    return j;
}

StabilityReport stability_run(const Barriers& b, const CombustionNonlinearity& nl, const SolverConfig& cfg,
                              const Grid& box, double vhat_offset, const PerturbationSpec& pert, double T) {
    auto t0 = std::chrono::steady_clock::now();
    const auto& fc = b.config();
    const double c = fc.speed();
    if (!(T > 0)) throw ValidationError("stability: T must be positive");
    SolverConfig sc = cfg;
    if (sc.snapshot_interval <= 0) sc.snapshot_interval = 1.0 / (4 * c);
    const double iv = sc.snapshot_interval;
    const int th = resolve(sc.threads);
    BoundaryFn bc = make_boundary(sc.boundary, b);
    BoundaryFn lower = make_boundary(BoundaryPolicy::Lower, b);
    Stepper st(box, nl, sc, bc);

    StabilityReport rep;
    rep.height = pert.height < 0 ? nl.gamma_star() / 2 : pert.height;
    rep.radius = pert.radius > 0 ? pert.radius : 3 / c;
    if (rep.height < 0) throw ValidationError("stability: perturbation height must be >= 0");
    const double rho0 = pert.rho0 > 0 ? pert.rho0 : rep.radius;

    double start = -iv * std::round(vhat_offset / iv);
    Field vh = st.sample(start, lower);
    st.apply_boundary(vh);
    st.advance_to(vh, 0.0);
    Field u = pert.base_vhat ? vh : st.sample(0.0, lower);
    if (!pert.base_vhat) st.apply_boundary(u);

    // ridge point of the t = 0 slice above x = 0
    Point centre{0, 0, 0};
    {
        double y = -kInf;
        for (std::size_t i = 0; i < fc.size(); ++i) y = std::max(y, -fc.facet(i).shift / fc.sin_angle(i));
        centre[fc.dimension() - 1] = y;
    }
    auto bump = [&](const Point& z) {
        double r2 = 0;
        for (int k = 0; k < fc.dimension(); ++k) r2 += (z[k] - centre[k]) * (z[k] - centre[k]);
        double r = std::sqrt(r2);
        double p = 0;
        if (r < rep.radius) {
            double s = std::cos(0.5 * M_PI * r / rep.radius);
            p = rep.height * s * s;
        }
        if (pert.tail_amplitude > 0 && (fc.size() < 2 || slice_ridge_distance(fc, 0.0, z) <= rho0))
            p += pert.tail_amplitude * std::exp(-pert.tail_rate * std::max(0.0, b.weight_exponent(0.0, z)));
        return p;
    };
    std::vector<double> p0(u.values.size(), 0.0);
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        if (u.grid.on_boundary(i)) continue;
        p0[i] = std::min(bump(u.grid.point(i)), 1 - u.values[i]);
        u.values[i] += p0[i];
    }

    // admissibility: ordering, range, decay ratio beyond rho0 at random points
    rep.min_above_lower = kInf;
    double max_u0 = -kInf;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
        rep.min_above_lower = std::min(rep.min_above_lower, u.values[i] - b.lower(0.0, u.grid.point(i)));
        max_u0 = std::max(max_u0, u.values[i]);
    }
    {
        std::mt19937_64 rng(pert.seed);
        std::uniform_int_distribution<std::size_t> pick(0, u.values.size() - 1);
        for (std::size_t s = 0; s < pert.admissibility_samples; ++s) {
            std::size_t i = pick(rng);
            Point z = u.grid.point(i);
            if (fc.size() >= 2 && slice_ridge_distance(fc, 0.0, z) <= rho0) continue;
            double weight = std::min(1.0, std::exp(-pert.tail_rate * std::max(0.0, b.weight_exponent(0.0, z))));
            rep.admissibility_ratio = std::max(rep.admissibility_ratio, p0[i] / weight);
        }
    }
    // V_hat stands in for V, which lies above V_lower; the ordering is only
    // required of the explicit base V_lower(0)
    rep.admissible = max_u0 <= 1 + 1e-12 && rep.admissibility_ratio <= 0.1 &&
                     (pert.base_vhat || rep.min_above_lower >= -1e-12);

    const BarrierParams& bp = b.params();
    auto excess_over_w = [&](const Field& f) {
        return blocked_reduce(f.values.size(), kChunk, th, -kInf,
                              [&](std::size_t i) { return f.values[i] - b.time_upper(f.time, f.grid.point(i)); },
                              [](double x, double y) { return std::max(x, y); });
    };
    rep.initial_w_excess = excess_over_w(u);

    double sup_dt = 0;
    Field prev_vh;
    for (long k = 0;; ++k) {
        double tk = static_cast<double>(k) * iv;
        if (tk > T + 1e-9 * iv) break;
        if (k > 0) {
            prev_vh = vh;
            st.advance_to(vh, tk);
            st.advance_to(u, tk);
            sup_dt = std::max(sup_dt, blocked_reduce(vh.values.size(), kChunk, th, 0.0,
                                                     [&](std::size_t i) {
                                                         return std::abs(vh.values[i] - prev_vh.values[i]) / iv;
                                                     },
                                                     [](double x, double y) { return std::max(x, y); }));
        }
        double diff = blocked_reduce(u.values.size(), kChunk, th, 0.0,
                                     [&](std::size_t i) { return std::abs(u.values[i] - vh.values[i]); },
                                     [](double x, double y) { return std::max(x, y); });
        double shift = b.time_shift(tk);
        double gap = blocked_reduce(vh.values.size(), kChunk, th, 0.0,
                                    [&](std::size_t i) {
                                        return std::abs(b.upper(shift, vh.grid.point(i)) - vh.values[i]);
                                    },
                                    [](double x, double y) { return std::max(x, y); });
        rep.times.push_back(tk);
        rep.sup_diff.push_back(diff);
        rep.w_excess.push_back(excess_over_w(u));
        rep.envelope.push_back(bp.delta * std::exp(-bp.lambda * tk) + gap + bp.varrho * bp.delta * sup_dt);
    }
    rep.final_diff = rep.sup_diff.back();
    rep.decays = rep.final_diff <= 1e-2;
    // block maxima over 2/c_f on the second half; single-snapshot upticks come
    // from the whole-cell window shifts and are counted separately
    const std::size_t block = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(2 / (c * iv))));
    std::vector<double> maxima;
    for (std::size_t k = rep.sup_diff.size() / 2; k < rep.sup_diff.size(); k += block) {
        double m = 0;
        for (std::size_t j = k; j < std::min(k + block, rep.sup_diff.size()); ++j) m = std::max(m, rep.sup_diff[j]);
        maxima.push_back(m);
    }
    rep.eventually_decreasing = nonincreasing(maxima);
    for (std::size_t k = 1; k < rep.sup_diff.size(); ++k)
        if (rep.sup_diff[k] > rep.sup_diff[k - 1]) ++rep.upticks;
    rep.dominated = *std::max_element(rep.w_excess.begin(), rep.w_excess.end()) <= 0;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

// ---- tau continuity ----

nlohmann::json TauContinuity::to_json() const { return {{"facet", facet}, {"dtau", dtau}, {"sup_diff", sup_diff}}; }

TauContinuity tau_continuity(const FrontConfiguration& cfg, const WaveProfile& profile,
                             const CombustionNonlinearity& nl, const BarrierParams& params, const SolverConfig& sc,
                             const Grid& box, double offset, double T, double dtau, std::size_t facet) {
    if (facet >= cfg.size()) throw ValidationError("tau_continuity: facet index out of range");
    auto facets = cfg.facets();
    facets[facet].shift += dtau;
    FrontConfiguration moved(cfg.dimension(), facets, cfg.speed());
    Barriers b0(cfg, profile, nl, params), b1(moved, profile, nl, params);
    auto r0 = entire_solution(b0, nl, sc, box, {offset}, T);
    auto r1 = entire_solution(b1, nl, sc, box, {offset}, T);
    TauContinuity out;
    out.facet = facet;
    out.dtau = dtau;
    for (std::size_t s = 0; s < r0.window.size() && s < r1.window.size(); ++s)
        for (std::size_t i = 0; i < r0.window[s].values.size(); ++i)
            out.sup_diff = std::max(out.sup_diff, std::abs(r0.window[s].values[i] - r1.window[s].values[i]));
    return out;
}

} // namespace cfront
