#include "cfront/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "cfront/errors.hpp"
#include "cfront/parallel.hpp"

namespace cfront {

MollifierValue mollifier_omega(double s) {
    MollifierValue m;
    if (s <= -1) return m;
    if (s >= 1) {
        m.w = 1;
        return m;
    }
    // omega = rho(a) / (rho(a) + rho(b)) = 1 / (1 + exp(g)), g = 1/a - 1/b
    double a = 0.5 * (1 + s), b = 0.5 * (1 - s);
    double g = 1 / a - 1 / b;
    if (g > 700) return m;
    if (g < -700) {
        m.w = 1;
        return m;
    }
    double g1 = -0.5 / (a * a) - 0.5 / (b * b);
    double g2 = 0.5 / (a * a * a) - 0.5 / (b * b * b);
    double L = 1 / (1 + std::exp(g));
    double L1 = -L * (1 - L);
    double L2 = L * (1 - L) * (1 - 2 * L);
    m.w = L;
    m.dw = L1 * g1;
    m.d2w = L2 * g1 * g1 + L1 * g2;
    return m;
}

Barriers::Barriers(const FrontConfiguration& cfg, const WaveProfile& profile, const CombustionNonlinearity& nl,
                   const BarrierParams& params)
    : surface_(cfg, params.alpha), profile_(profile), nl_(nl), p_(params) {
    if (!(params.epsilon >= 0)) throw ValidationError("barrier.epsilon: must be >= 0");
    if (!(params.beta > 0 && params.beta <= 1)) throw ValidationError("barrier.beta: must lie in (0, 1]");
    if (!(params.delta >= 0)) throw ValidationError("barrier.delta: must be >= 0");
    if (!(params.lambda >= 0)) throw ValidationError("barrier.lambda: must be >= 0");
    if (!(params.varrho >= 0)) throw ValidationError("barrier.varrho: must be >= 0");
    if (std::abs(profile.speed() - cfg.speed()) > 1e-12 * cfg.speed())
        throw ValidationError("barrier: profile and front configuration disagree on c_f");
}

XiEta Barriers::xi_eta(double t, const Point& z) const {
    const int N = config().dimension();
    const double a = p_.alpha;
    XVec X{0, 0};
    for (int k = 0; k < N - 1; ++k) X[k] = a * z[k];
    PhiDerivatives D = surface_.derivatives(a * t, X);
    double g2 = 1;
    for (int k = 0; k < N - 1; ++k) g2 += D.grad[k] * D.grad[k];
    XiEta r;
    r.eta = z[N - 1] - D.phi / a;
    r.xi = r.eta / std::sqrt(g2);
    return r;
}

double Barriers::lower(double t, const Point& z) const { return subsolution_lower(config(), profile_, t, z); }

double Barriers::upper(double t, const Point& z) const {
    return std::min(upper_parts<double>(t, z).value, 1.0);
}

double Barriers::time_shift(double t) const {
    return t - p_.varrho * p_.delta * std::exp(-p_.lambda * t) + p_.varrho * p_.delta;
}

double Barriers::time_upper(double t, const Point& z) const { return std::min(time_upper_raw<double>(t, z), 1.0); }

double Barriers::weight_exponent(double t, const Point& z) const {
    QValues q = q_values(config(), t, z);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < q.q.size(); ++i) m = std::min(m, q.q[i] / config().sin_angle(i));
    return m;
}

template <class F>
Residual Barriers::residual_with(double t, const Point& z, F&& eval) const {
    const int N = config().dimension();
    std::array<Jet, 3> zj{Jet(z[0]), Jet(z[1]), Jet(z[2])};
    Residual R;
    Jet vt = eval(Jet::variable(t), zj);
    R.value = vt.v;
    R.dt = vt.d;
    if (R.value >= 1) {
        R.clamped = true;
        R.value = 1;
        return R;
    }
    for (int k = 0; k < N; ++k) {
        std::array<Jet, 3> zk = zj;
        zk[k] = Jet::variable(z[k]);
        R.laplacian += eval(Jet(t), zk).dd;
    }
    R.residual = R.dt - R.laplacian - nl_.f(R.value);
    return R;
}

Residual Barriers::upper_residual(double t, const Point& z) const {
    return residual_with(t, z, [&](const Jet& tt, const std::array<Jet, 3>& zz) { return upper_parts(tt, zz).value; });
}

Residual Barriers::time_upper_residual(double t, const Point& z) const {
    return residual_with(t, z, [&](const Jet& tt, const std::array<Jet, 3>& zz) { return time_upper_raw(tt, zz); });
}

namespace {

template <class F>
Residual fd_residual(const CombustionNonlinearity& nl, int N, double t, const Point& z, double h, F&& v) {
    Residual R;
    R.value = v(t, z);
    if (R.value >= 1) {
        R.clamped = true;
        R.value = 1;
        return R;
    }
    double ht = h * (1 + std::abs(t));
    R.dt = (v(t + ht, z) - v(t - ht, z)) / (2 * ht);
    for (int k = 0; k < N; ++k) {
        double hk = h * (1 + std::abs(z[k]));
        Point zp = z, zm = z;
        zp[k] += hk;
        zm[k] -= hk;
        R.laplacian += (v(t, zp) - 2 * R.value + v(t, zm)) / (hk * hk);
    }
    R.residual = R.dt - R.laplacian - nl.f(R.value);
    return R;
}

} // namespace

Residual Barriers::upper_residual_fd(double t, const Point& z, double h) const {
    return fd_residual(nl_, config().dimension(), t, z, h,
                       [&](double tt, const Point& zz) { return upper_parts<double>(tt, zz).value; });
}

Residual Barriers::time_upper_residual_fd(double t, const Point& z, double h) const {
    return fd_residual(nl_, config().dimension(), t, z, h,
                       [&](double tt, const Point& zz) { return time_upper_raw<double>(tt, zz); });
}

double v_star_schedule(const Barriers& b, double c1_hat) {
    const auto& cfg = b.config();
    const auto& p = b.params();
    double c = cfg.speed();
    double K = c1_hat + cfg.max_slope();
    double m = std::min({p.alpha * p.beta, p.alpha, p.alpha / std::sqrt(1 + K * K)});
    for (std::size_t i = 0; i < cfg.size(); ++i) m = std::min(m, cfg.sin_angle(i));
    double v = std::min(p.alpha * b.profile().beta0() / 2, 0.5 * c * m);
    return 0.5 * v;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// per-sample generator, so placement does not depend on the worker count
struct SampleRng {
    std::mt19937_64 g;
    SampleRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t k) : g(splitmix(seed ^ splitmix(stream * 0x100000001b3ULL + k))) {}
    double uniform(double a, double b) { return a + (b - a) * std::uniform_real_distribution<double>(0.0, 1.0)(g); }
};

double stratum_eta(SampleRng& r, int s, const SampleSpec& sp) {
    switch (s) {
    case 0: return r.uniform(sp.x_prime, sp.x_prime + sp.eta_span);
    case 1: return r.uniform(-sp.x_dprime - sp.eta_span, -sp.x_dprime);
    default: return r.uniform(-sp.x_dprime, sp.x_prime);
    }
}

struct Sample {
    int stratum = 0;
    double t = 0, eta = 0;
    Point z{};
    Residual R;
    double margin = 0, ridge = 0, weight = 0;
};

void reduce_cases(const std::vector<Sample>& S, std::array<CaseStats, 3>& out) {
    for (auto& c : out) c.min_residual = std::numeric_limits<double>::infinity();
    for (const Sample& s : S) {
        CaseStats& c = out[s.stratum];
        ++c.count;
        if (s.R.clamped) {
            ++c.excluded;
            continue;
        }
        if (s.R.residual < c.min_residual) {
            c.min_residual = s.R.residual;
            c.t = s.t;
            c.z = s.z;
            c.eta = s.eta;
        }
    }
}

bool cases_pass(const std::array<CaseStats, 3>& cs) {
    for (const auto& c : cs)
        if (c.count > c.excluded && !(c.min_residual >= kResidualTolerance)) return false;
    return true;
}

} // namespace

ValidationReport validate_parameters(const Barriers& b, const SampleSpec& spec, double c1_hat, bool check_time_barrier) {
    ValidationReport rep;
    rep.params = b.params();
    rep.spec = spec;
    const auto& cfg = b.config();
    const int N = cfg.dimension();
    const double a = b.params().alpha;
    const int threads = spec.threads > 0 ? spec.threads : default_threads();
    rep.v_star = v_star_schedule(b, c1_hat);
    double far = spec.far_distance > 0 ? spec.far_distance : 10.0 / cfg.speed();

    auto place = [&](SampleRng& r, Sample& s, bool timed) {
        XVec X{0, 0};
        for (int k = 0; k < N - 1; ++k) X[k] = r.uniform(-spec.box, spec.box);
        double T;
        if (timed) {
            double tmax = spec.t_max > 0 ? spec.t_max
                                         : std::max(b.params().lambda > 0 ? 5 / b.params().lambda : 0.0, spec.box / a);
            double u = r.uniform(0, 1);
            s.t = tmax * u * u;
            T = a * b.time_shift(s.t);
        } else {
            T = r.uniform(-spec.box, spec.box);
            s.t = T / a;
        }
        s.eta = stratum_eta(r, s.stratum, spec);
        for (int k = 0; k < N - 1; ++k) s.z[k] = X[k] / a;
        s.z[N - 1] = b.surface().solve_phi(T, X) / a + s.eta;
    };

    std::vector<Sample> S(spec.count);
    parallel_for(spec.count, 256, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            Sample& s = S[k];
            SampleRng r(spec.seed, 1, k);
            s.stratum = static_cast<int>(k % 3);
            place(r, s, false);
            s.R = b.upper_residual(s.t, s.z);
            s.margin = s.R.value - b.lower(s.t, s.z);
            if (cfg.size() >= 2) s.ridge = ridge_distance(cfg, s.t, s.z);
            s.weight = std::min(1.0, std::exp(-2 * rep.v_star * b.weight_exponent(s.t, s.z)));
        }
    });
    reduce_cases(S, rep.upper);
    rep.upper_pass = cases_pass(rep.upper);
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (const Sample& s : S) {
        rep.min_margin = std::min(rep.min_margin, s.margin);
        if (s.margin < kMarginTolerance) ++rep.margin_violations;
        if (cfg.size() < 2 || s.ridge >= far) {
            rep.far_gap_max = std::max(rep.far_gap_max, s.margin);
            if (b.params().epsilon > 0 && s.weight > 0)
                rep.c_star = std::max(rep.c_star, std::abs(s.margin) / s.weight / b.params().epsilon);
        }
    }
    rep.margin_pass = rep.margin_violations == 0;

    // finite-difference cross-check of the jet residuals on a few samples
    for (std::size_t k = 0, used = 0; k < S.size() && used < spec.fd_checks; ++k) {
        const Sample& s = S[k];
        if (s.R.clamped) continue;
        Residual f1 = b.upper_residual_fd(s.t, s.z, 1e-4);
        Residual f2 = b.upper_residual_fd(s.t, s.z, 5e-5);
        if (f1.clamped || f2.clamped) continue;
        rep.fd_error = std::max(rep.fd_error, std::abs(f1.residual - s.R.residual));
        rep.fd_error_half = std::max(rep.fd_error_half, std::abs(f2.residual - s.R.residual));
        ++used;
    }

    if (check_time_barrier) {
        std::vector<Sample> W(spec.count);
        parallel_for(spec.count, 256, threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k = lo; k < hi; ++k) {
                Sample& s = W[k];
                SampleRng r(spec.seed, 2, k);
                s.stratum = static_cast<int>(k % 3);
                place(r, s, true);
                s.R = b.time_upper_residual(s.t, s.z);
            }
        });
        reduce_cases(W, rep.time_upper);
        rep.time_pass = cases_pass(rep.time_upper);
    } else {
        rep.time_pass = true;
    }
    return rep;
}

namespace {

nlohmann::json cases_json(const std::array<CaseStats, 3>& cs) {
    static const char* names[3] = {"eta_above", "eta_below", "eta_middle"};
    nlohmann::json j = nlohmann::json::object();
    for (int i = 0; i < 3; ++i) {
        const CaseStats& c = cs[i];
        j[names[i]] = {{"count", c.count},
                       {"excluded_clamped", c.excluded},
                       {"min_residual", std::isfinite(c.min_residual) ? nlohmann::json(c.min_residual) : nlohmann::json()},
                       {"argmin", {{"t", c.t}, {"z", {c.z[0], c.z[1], c.z[2]}}, {"eta", c.eta}}}};
    }
    return j;
}

nlohmann::json params_json(const BarrierParams& p) {
    return {{"epsilon", p.epsilon}, {"alpha", p.alpha}, {"beta", p.beta},
            {"delta", p.delta},     {"lambda", p.lambda}, {"varrho", p.varrho}};
}

} // namespace

nlohmann::json ValidationReport::to_json() const {
    nlohmann::json j;
    j["params"] = params_json(params);
    j["samples"] = spec.count;
    j["seed"] = spec.seed;
    j["x_prime"] = spec.x_prime;
    j["x_dprime"] = spec.x_dprime;
    j["residual_tolerance"] = kResidualTolerance;
    j["upper"] = cases_json(upper);
    j["upper_pass"] = upper_pass;
    j["time_upper"] = cases_json(time_upper);
    j["time_upper_pass"] = time_pass;
    j["min_margin_upper_minus_lower"] = min_margin;
    j["margin_violations"] = margin_violations;
    j["far_gap_max"] = far_gap_max;
    j["v_star"] = v_star;
    j["c_star_fit"] = c_star;
    j["fd_crosscheck"] = {{"max_abs_diff_h", fd_error}, {"max_abs_diff_h_half", fd_error_half}};
    j["pass"] = pass();
    return j;
}

SurfaceConstants fit_surface_constants(const FrontConfiguration& cfg, double box, std::size_t count,
                                       std::uint64_t seed, int threads) {
    ScaledSurface S(cfg, 1.0);
    const int m = cfg.dimension() - 1;
    const double c = cfg.speed();
    if (threads <= 0) threads = default_threads();
    struct Row {
        double r0 = 0, r1 = 0, rlo = std::numeric_limits<double>::infinity(), rate = std::numeric_limits<double>::quiet_NaN();
    };
    std::vector<Row> rows(count);
    parallel_for(count, 256, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t k = lo; k < hi; ++k) {
            SampleRng r(seed, 3, k);
            double t = r.uniform(-box, box);
            XVec x{0, 0};
            for (int j = 0; j < m; ++j) x[j] = r.uniform(-box, box);
            PhiDerivatives D = S.derivatives(t, x);
            Flatness F = S.flatness(t, x);
            double h = F.pair_sum;
            if (h < 1e-12) continue;
            std::size_t best = 0;
            double ps = -std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < cfg.size(); ++i) {
                double v = S.psi_i(i, t, x);
                if (v > ps) {
                    ps = v;
                    best = i;
                }
            }
            Row& row = rows[k];
            row.r0 = (D.phi - ps) / h;
            double dev = std::abs(D.phi_t - c / cfg.sin_angle(best));
            double g2 = 0, gd = 0;
            for (int j = 0; j < m; ++j) {
                double slope = cfg.direction(best)[j] / cfg.sin_angle(best);
                gd += (D.grad[j] + slope) * (D.grad[j] + slope);
                g2 += D.grad[j] * D.grad[j];
            }
            dev += std::sqrt(gd);
            double normal = (D.phi_t / std::sqrt(1 + g2) - c) / h;
            row.r1 = std::max(dev / h, normal);
            row.rlo = normal;
            row.rate = S.log_flatness_rate(t, x);
        }
    });
    SurfaceConstants out;
    out.samples = count;
    out.dt_log_h_min = std::numeric_limits<double>::infinity();
    out.dt_log_h_max = -std::numeric_limits<double>::infinity();
    for (const Row& r : rows) {
        out.c_hat = std::max(out.c_hat, r.r0);
        out.c1_hat = std::max(out.c1_hat, r.r1);
        if (r.rlo > 0 && std::isfinite(r.rlo)) out.c1_hat = std::max(out.c1_hat, 1 / r.rlo);
        if (std::isfinite(r.rate)) {
            out.dt_log_h_min = std::min(out.dt_log_h_min, r.rate);
            out.dt_log_h_max = std::max(out.dt_log_h_max, r.rate);
        }
    }
    if (!std::isfinite(out.dt_log_h_min)) out.dt_log_h_min = out.dt_log_h_max = 0;
    return out;
}

nlohmann::json Schedule::to_json() const {
    nlohmann::json j;
    j["params"] = params_json(params);
    j["c_hat"] = constants.c_hat;
    j["c1_hat"] = constants.c1_hat;
    j["dt_log_h_range"] = {constants.dt_log_h_min, constants.dt_log_h_max};
    j["beta_star"] = beta_star;
    j["kappa"] = kappa;
    j["alpha_halvings"] = alpha_halvings;
    j["varrho_doublings"] = varrho_doublings;
    j["validation"] = report.to_json();
    return j;
}

Schedule auto_schedule(const FrontConfiguration& cfg, const WaveProfile& profile, const CombustionNonlinearity& nl,
                       const SampleSpec& spec, const BarrierOverrides& fixed) {
    Schedule sc;
    const double c = cfg.speed();
    const double gs = nl.gamma_star();
    sc.constants = fit_surface_constants(cfg, spec.box, 20000, spec.seed, spec.threads);
    double K = sc.constants.c1_hat + cfg.max_slope();
    double b1 = 1 / (4 * (K * K + 1)), b2 = 1 / (4 * std::sqrt(K * K + 1));
    sc.beta_star = std::min({1.0, b1, b2});

    BarrierParams p;
    p.epsilon = fixed.epsilon.value_or(gs / 8);
    p.delta = fixed.delta.value_or(gs / 8);
    p.beta = fixed.beta.value_or(sc.beta_star);
    p.lambda = fixed.lambda.value_or(0.5 * std::min(-nl.fprime_at_one() / 4, p.beta * c * c / 16));

    sc.kappa = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= 2000; ++k) {
        double xi = -spec.x_dprime + (spec.x_prime + spec.x_dprime) * k / 2000.0;
        sc.kappa = std::min(sc.kappa, std::abs(profile.eval(xi).du));
    }
    p.varrho = fixed.varrho.value_or(3 * (nl.lipschitz() + p.lambda) / (p.lambda * sc.kappa * c));

    SampleSpec quick = spec;
    quick.count = std::min<std::size_t>(spec.count, 30000);
    quick.fd_checks = 0;

    p.alpha = fixed.alpha.value_or(1.0);
    if (!fixed.alpha) {
        for (;; ++sc.alpha_halvings) {
            Barriers b(cfg, profile, nl, p);
            ValidationReport r = validate_parameters(b, quick, sc.constants.c1_hat, false);
            if (r.upper_pass && r.margin_pass) break;
            if (sc.alpha_halvings >= 60) throw NumericalError("auto_schedule: no alpha certified");
            p.alpha *= 0.5;
        }
    }
    if (!fixed.varrho) {
        for (;; ++sc.varrho_doublings) {
            Barriers b(cfg, profile, nl, p);
            ValidationReport r = validate_parameters(b, quick, sc.constants.c1_hat, true);
            if (r.time_pass) break;
            if (sc.varrho_doublings >= 40) throw NumericalError("auto_schedule: no varrho certified");
            p.varrho *= 2;
        }
    }
    sc.params = p;
    sc.report = validate_parameters(Barriers(cfg, profile, nl, p), spec, sc.constants.c1_hat, true);
    return sc;
}

} // namespace cfront
