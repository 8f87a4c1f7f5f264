#pragma once

#include <array>
#include <optional>
#include <cstdint>
#include <string>

#include "cfront/hypersurface.hpp"
#include "cfront/nonlinearity.hpp"
#include "cfront/wave_profile.hpp"
#include "json.hpp"

namespace cfront {

struct BarrierParams {
    double epsilon = 0;
    double alpha = 1;
    double beta = 1;
    double delta = 0;
    double lambda = 0;
    double varrho = 0;
};

struct MollifierValue {
    double w = 0, dw = 0, d2w = 0;
};

// smooth switch: 0 on (-inf, -1], 1 on [1, inf), built from exp(-1/r)
MollifierValue mollifier_omega(double s);

struct XiEta {
    double xi = 0, eta = 0;
};

// L v = v_t - Lap v - f(v) at one point; `clamped` when the min with 1 is active
struct Residual {
    double value = 0;
    double dt = 0;
    double laplacian = 0;
    double residual = 0;
    bool clamped = false;
};

class Barriers {
public:
    Barriers(const FrontConfiguration& cfg, const WaveProfile& profile, const CombustionNonlinearity& nl,
             const BarrierParams& params);

    const FrontConfiguration& config() const { return surface_.config(); }
    const ScaledSurface& surface() const { return surface_; }
    const WaveProfile& profile() const { return profile_; }
    const CombustionNonlinearity& nonlinearity() const { return nl_; }
    const BarrierParams& params() const { return p_; }

    XiEta xi_eta(double t, const Point& z) const;
    double lower(double t, const Point& z) const;
    double upper(double t, const Point& z) const;
    // time-shifted supersolution, t >= 0
    double time_upper(double t, const Point& z) const;
    double time_shift(double t) const;  // varpi(t)

    Residual upper_residual(double t, const Point& z) const;
    Residual time_upper_residual(double t, const Point& z) const;
    // same residuals by centred differences with step h (cross-check only)
    Residual upper_residual_fd(double t, const Point& z, double h) const;
    Residual time_upper_residual_fd(double t, const Point& z, double h) const;

    // min_i q_i / sin(theta_i): the exponent in the weighted gap
    double weight_exponent(double t, const Point& z) const;

    template <class T>
    struct Parts {
        T value;  // before the clamp
        T eta;
        T tail;   // U^beta(eta) omega(eta) + 1 - omega(eta)
    };
    template <class T>
    Parts<T> upper_parts(const T& t, const std::array<T, 3>& z) const;

private:
    template <class T>
    T time_upper_raw(const T& t, const std::array<T, 3>& z) const;
    template <class F>
    Residual residual_with(double t, const Point& z, F&& eval) const;

    ScaledSurface surface_;
    WaveProfile profile_;
    CombustionNonlinearity nl_;
    BarrierParams p_;
};

struct SampleSpec {
    // surface coordinates (alpha t, alpha x) are drawn from [-box, box]
    double box = 10;
    // eta strata: (X', X' + span], [-X'' - span, -X''), [-X'', X']
    double x_prime = 2, x_dprime = 2, eta_span = 40;
    std::size_t count = 100000;
    std::uint64_t seed = 1;
    // physical horizon for the time barrier; 0 = max(5 / lambda, box / alpha)
    double t_max = 0;
    // points with ridge distance beyond this enter the weighted-gap fit
    double far_distance = 0;
    std::size_t fd_checks = 64;
    int threads = 0;
};

struct CaseStats {
    std::size_t count = 0;
    std::size_t excluded = 0;  // clamped at 1
    double min_residual = 0;
    double t = 0, eta = 0;
    Point z{};
};

struct ValidationReport {
    BarrierParams params;
    SampleSpec spec;
    std::array<CaseStats, 3> upper{}, time_upper{};
    double min_margin = 0;  // min of upper - lower
    std::size_t margin_violations = 0;
    double far_gap_max = 0;  // max of upper - lower beyond far_distance
    double v_star = 0, c_star = 0;
    double fd_error = 0, fd_error_half = 0;
    bool upper_pass = false, time_pass = false, margin_pass = false;
    bool pass() const { return upper_pass && time_pass && margin_pass; }
    nlohmann::json to_json() const;
};

inline constexpr double kResidualTolerance = -1e-8;
inline constexpr double kMarginTolerance = -1e-14;

// v_star recipe with the fitted derivative constant c1_hat, halved
double v_star_schedule(const Barriers& b, double c1_hat);

ValidationReport validate_parameters(const Barriers& b, const SampleSpec& spec, double c1_hat,
                                     bool check_time_barrier = true);

struct SurfaceConstants {
    double c_hat = 0;   // |phi - psi| <= c_hat h
    double c1_hat = 0;  // derivative bounds
    double dt_log_h_min = 0, dt_log_h_max = 0;  // d_t h / h range, compared with 2 c_f
    std::size_t samples = 0;
};

SurfaceConstants fit_surface_constants(const FrontConfiguration& cfg, double box, std::size_t count,
                                       std::uint64_t seed, int threads = 0);

struct Schedule {
    BarrierParams params;
    SurfaceConstants constants;
    double beta_star = 0, kappa = 0;
    int alpha_halvings = 0, varrho_doublings = 0;
    ValidationReport report;
    nlohmann::json to_json() const;
};

// Fields given here are kept as-is; the rest follow the schedule.
struct BarrierOverrides {
    std::optional<double> epsilon, alpha, beta, delta, lambda, varrho;
};

// Closed-form choices for beta, epsilon, delta, lambda; alpha halved from 1
// until the supersolution residual certifies, varrho doubled until the time
// barrier does. The returned report is the full-size validation either way.
Schedule auto_schedule(const FrontConfiguration& cfg, const WaveProfile& profile, const CombustionNonlinearity& nl,
                       const SampleSpec& spec, const BarrierOverrides& fixed = {});

// ---- templates ----

template <class T>
Barriers::Parts<T> Barriers::upper_parts(const T& t, const std::array<T, 3>& z) const {
    using std::exp;
    using std::sqrt;
    const int N = config().dimension();
    const double a = p_.alpha;
    std::array<T, 2> X{T(0.0), T(0.0)};
    for (int k = 0; k < N - 1; ++k) X[k] = a * z[k];
    SurfaceJet<T> S = surface_.evaluate(T(a * t), X);
    const T& y = z[N - 1];
    T eta = y - S.phi / a;
    T g2 = T(1.0);
    for (int k = 0; k < N - 1; ++k) g2 = g2 + S.grad[k] * S.grad[k];
    T xi = eta / sqrt(g2);
    ProfileSample px = profile_.eval(value_of(xi));
    T U = chain(xi, px.u, px.du, px.d2u);
    ProfileSample pe = profile_.eval(value_of(eta));
    T logU = chain(eta, pe.log_u, pe.dlog_u, pe.d2log_u);
    MollifierValue m = mollifier_omega(value_of(eta));
    T om = chain(eta, m.w, m.dw, m.d2w);
    T tail = exp(p_.beta * logU) * om + (1.0 - om);
    Parts<T> out{U + p_.epsilon * S.h * tail, eta, tail};
    return out;
}

template <class T>
T Barriers::time_upper_raw(const T& t, const std::array<T, 3>& z) const {
    using std::exp;
    T decay = exp(-p_.lambda * t);
    T w = t - p_.varrho * p_.delta * decay + p_.varrho * p_.delta;
    Parts<T> P = upper_parts(w, z);
    return P.value + p_.delta * decay * P.tail;
}

} // namespace cfront
