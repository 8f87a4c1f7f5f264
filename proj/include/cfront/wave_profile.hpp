#pragma once

#include <iosfwd>
#include <vector>

#include "cfront/nonlinearity.hpp"

namespace cfront {

enum class ShootStatus { Reached, Stalled };

// Phase-plane shot for p(U) = -U'(D) from U = 1 - delta_lin down to theta.
// Stalled means p reached 0 before theta, i.e. the trial speed is too large.
struct ShootResult {
    ShootStatus status = ShootStatus::Reached;
    double p_theta = 0;  // p at U = theta when reached
    double u_stop = 0;   // U where integration stopped
    long steps = 0;
};

inline constexpr double kDeltaLin = 1e-6;

// positive root of mu^2 + c mu + f'(1) = 0
double characteristic_root(const CombustionNonlinearity& nl, double c);

ShootResult shoot_p(const CombustionNonlinearity& nl, double c);
// S(c) = p(theta; c) - c theta, -inf when the shot stalls
double shooting_function(const CombustionNonlinearity& nl, double c);
double find_wave_speed(const CombustionNonlinearity& nl);

struct ProfileSample {
    double u = 0, du = 0, d2u = 0;
    double w = 0;  // 1 - u without cancellation
    double log_u = 0, dlog_u = 0, d2log_u = 0;
};

class WaveProfile {
public:
    double speed() const { return c_; }
    double beta0() const { return beta0_; }
    double theta() const { return theta_; }

    // Full table: left linearised tail, integrated segment, exact right tail.
    const std::vector<double>& grid() const { return D_; }
    const std::vector<double>& values() const { return U_; }
    // index range [begin, end) of nodes that came out of the phase-plane integration
    std::size_t integrated_begin() const { return ib_; }
    std::size_t integrated_end() const { return ie_; }

    ProfileSample eval(double D) const;
    double operator()(double D) const { return eval(D).u; }
    // D with U(D) = u, for u in (0, 1)
    double inverse(double u) const;

    void write_csv(std::ostream& os) const;

private:
    friend WaveProfile build_profile(const CombustionNonlinearity&, double, double, double);

    CombustionNonlinearity nl_ = CombustionNonlinearity::inert(0.5, 0.5);
    double c_ = 0, beta0_ = 0, theta_ = 0;
    std::vector<double> D_, U_, W_, P_;  // P = -U'
    std::vector<double> mL_, mR_;        // limited Hermite slopes of W per interval
    std::size_t ib_ = 0, ie_ = 0;        // integrated nodes
    double D_left_ = 0, w_left_ = 0;     // start of the integrated segment
};

// domain_half_width: table covers at least [-W, W]; step: max node spacing in D
WaveProfile build_profile(const CombustionNonlinearity& nl, double c_f, double domain_half_width = 60.0,
                          double step = 0.01);

struct TailRates {
    double speed = 0, beta0 = 0;
    double L1 = 0, L2 = 0, L3 = 0, L4 = 0;
    double fitted_right_rate = 0;  // slope of -log U on D >= 0
    double fitted_left_rate = 0;   // slope of log(1 - U) on integrated nodes with 1 - U <= 1e-3
    // derivative envelopes, diagnostic only: min/max of |U'| and |U''| times the tail weight
    double right_deriv_min = 0, right_deriv_max = 0;
    double left_deriv_min = 0, left_deriv_max = 0;
};

TailRates tail_rates(const WaveProfile& profile, const CombustionNonlinearity& nl);

struct ProfileCheck {
    double ode_residual = 0;      // sup |U'' + c U' + f(U)| by centred differences
    double tail_error = 0;        // sup relative error against theta e^{-c D} on D >= 0
    double char_root = 0;
    double beta0_rel_error = 0;   // |fitted left rate / characteristic root - 1|
};

// differences with step h on [-half_width, half_width]
ProfileCheck check_profile(const WaveProfile& profile, const CombustionNonlinearity& nl, double half_width = 40,
                           double h = 0.01);

struct ScalingCheck {
    double k = 2;
    double speed_ratio = 0;  // c(k^2 f) / c(f), expected k
    double profile_error = 0;  // sup |U_{k^2 f}(D) - U_f(k D)|
};

ScalingCheck check_scaling(const CombustionNonlinearity& nl, double k = 2, double half_width = 30);

} // namespace cfront
