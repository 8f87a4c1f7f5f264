#include "cfront/wave_profile.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "cfront/errors.hpp"

namespace cfront {

namespace {

constexpr double kRtol = 1e-12, kAtol = 1e-16;

// Dormand-Prince 5(4) for the profile ODE written as a first-order system in D:
// U' = -p, p' = -c p + f(U). Forward in D is the stable direction for the
// trajectory leaving U = 1 along the unstable manifold. Stepping in D rather
// than U keeps the problem non-stiff for large trial speeds, where p(U) hugs
// the slow curve p = f(U)/c. Every accepted step is reported to `on_step`.
struct Dopri {
    const CombustionNonlinearity& nl;
    double c;

    void rhs(const std::array<double, 2>& y, std::array<double, 2>& dy) const {
        dy[0] = -y[1];
        dy[1] = -c * y[1] + nl.f(y[0]);
    }

    // one step of size h from (y, k1); returns the 5th order state, its
    // derivative and the scaled error estimate
    double step(const std::array<double, 2>& y, const std::array<double, 2>& k1, double h,
                std::array<double, 2>& yn, std::array<double, 2>& k7) const {
        static constexpr double a21 = 1. / 5;
        static constexpr double a31 = 3. / 40, a32 = 9. / 40;
        static constexpr double a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9;
        static constexpr double a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561, a54 = -212. / 729;
        static constexpr double a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247, a64 = 49. / 176,
                                a65 = -5103. / 18656;
        static constexpr double b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192, b5 = -2187. / 6784,
                                b6 = 11. / 84;
        static constexpr double e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920, e5 = -17253. / 339200,
                                e6 = 22. / 525, e7 = -1. / 40;
        std::array<double, 2> k2, k3, k4, k5, k6, t;
        for (int i = 0; i < 2; ++i) t[i] = y[i] + h * a21 * k1[i];
        rhs(t, k2);
        for (int i = 0; i < 2; ++i) t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t, k3);
        for (int i = 0; i < 2; ++i) t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t, k4);
        for (int i = 0; i < 2; ++i) t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t, k5);
        for (int i = 0; i < 2; ++i)
            t[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t, k6);
        for (int i = 0; i < 2; ++i) yn[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(yn, k7);
        double err = 0;
        for (int i = 0; i < 2; ++i) {
            double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            // U is compared through 1 - U so the start near U = 1 is resolved
            double mag = i == 0 ? std::min(std::abs(1 - y[0]), std::abs(y[0])) : std::abs(y[1]);
            double magn = i == 0 ? std::min(std::abs(1 - yn[0]), std::abs(yn[0])) : std::abs(yn[1]);
            err = std::max(err, std::abs(e) / (kAtol + kRtol * std::max(mag, magn)));
        }
        return err;
    }
};

template <class OnStep>
ShootResult integrate_phase(const CombustionNonlinearity& nl, double c, double max_dD, OnStep on_step) {
    Dopri dp{nl, c};
    const double theta = nl.theta();
    ShootResult res;
    double mu = characteristic_root(nl, c);
    std::array<double, 2> y{1.0 - kDeltaLin, mu * kDeltaLin}, k1, yn, k7;
    double D = 0;
    dp.rhs(y, k1);
    on_step(D, y);

    double h = 1e-3 / std::max(mu, 1e-3);
    const long max_steps = 2'000'000;
    for (;;) {
        if (res.steps++ > max_steps) throw NumericalError("shoot_p: step budget exhausted");
        if (max_dD > 0) h = std::min(h, max_dD);
        double err = dp.step(y, k1, h, yn, k7);
        if (!(err <= 1.0)) {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < 1e-14) throw NumericalError("shoot_p: step size underflow");
            continue;
        }
        if (yn[0] <= theta) {
            // land exactly on U = theta: secant on the step length
            double ha = 0, ua = y[0] - theta, hb = h, ub = yn[0] - theta;
            for (int it = 0; it < 60 && ub != 0; ++it) {
                double hc = hb - ub * (hb - ha) / (ub - ua);
                if (!(hc > 0 && hc <= h)) hc = 0.5 * (ha + hb);
                dp.step(y, k1, hc, yn, k7);
                double uc = yn[0] - theta;
                ha = hb;
                ua = ub;
                hb = hc;
                ub = uc;
                if (std::abs(uc) <= 1e-16) break;
            }
            dp.step(y, k1, hb, yn, k7);
            yn[0] = theta;
            D += hb;
            on_step(D, yn);
            res.p_theta = yn[1];
            res.u_stop = theta;
            return res;
        }
        D += h;
        y = yn;
        k1 = k7;
        on_step(D, y);
        // p can no longer recover to c theta: p' = -c p + f(U) keeps
        // p <= max(p_now, max f / c) while U decreases towards theta, and f
        // is increasing below U whenever f'(U) >= 0 for this family.
        if (y[1] < c * theta && nl.fprime(y[0]) >= 0 && nl.f(y[0]) / c < c * theta) {
            res.status = ShootStatus::Stalled;
            res.u_stop = y[0];
            return res;
        }
        if (D > 1e7) {
            res.status = ShootStatus::Stalled;
            res.u_stop = y[0];
            return res;
        }
        double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
    }
}

void linear_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope) {
    double n = static_cast<double>(x.size()), sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    double mx = sx / n, my = sy / n, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    slope = sxy / sxx;
}

} // namespace

double characteristic_root(const CombustionNonlinearity& nl, double c) {
    return 0.5 * (-c + std::sqrt(c * c - 4.0 * nl.fprime_at_one()));
}

ShootResult shoot_p(const CombustionNonlinearity& nl, double c) {
    if (!(c > 0)) throw ValidationError("shoot_p: speed must be positive");
    if (nl.amplitude() == 0) {
        // no reaction: p' = c in U, exact
        ShootResult r;
        r.p_theta = characteristic_root(nl, c) * kDeltaLin + c * (1.0 - kDeltaLin - nl.theta());
        r.u_stop = nl.theta();
        return r;
    }
    return integrate_phase(nl, c, 0.0, [](double, const std::array<double, 2>&) {});
}

double shooting_function(const CombustionNonlinearity& nl, double c) {
    ShootResult r = shoot_p(nl, c);
    if (r.status == ShootStatus::Stalled) return -std::numeric_limits<double>::infinity();
    return r.p_theta - c * nl.theta();
}

double find_wave_speed(const CombustionNonlinearity& nl) {
    if (nl.amplitude() <= 0) throw ValidationError("find_wave_speed: no reaction, no front");
    double lo = 1e-4, hi = 1.0;
    // S > 0 for slow trial speeds, S < 0 (or a stalled shot) for fast ones
    int widen = 0;
    while (shooting_function(nl, lo) <= 0) {
        lo *= 0.1;
        if (++widen > 8) throw NumericalError("find_wave_speed: no sign change near c = 0");
    }
    widen = 0;
    while (shooting_function(nl, hi) > 0) {
        lo = hi;
        hi *= 2;
        if (++widen > 40) throw NumericalError("find_wave_speed: no sign change in the bracket");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        double s = shooting_function(nl, mid);
        if (std::isfinite(s) && std::abs(s) <= 1e-12) return mid;
        (s > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

WaveProfile build_profile(const CombustionNonlinearity& nl, double c_f, double domain_half_width, double step) {
    if (!(c_f > 0)) throw ValidationError("build_profile: c_f must be positive");
    if (!(step > 0)) throw ValidationError("build_profile: step must be positive");
    WaveProfile pr;
    pr.nl_ = nl;
    pr.c_ = c_f;
    pr.theta_ = nl.theta();
    pr.beta0_ = characteristic_root(nl, c_f);

    std::vector<double> Us, Ps, Ds;
    ShootResult r = integrate_phase(nl, c_f, step, [&](double d, const std::array<double, 2>& y) {
        Us.push_back(y[0]);
        Ps.push_back(y[1]);
        Ds.push_back(d);
    });
    if (r.status != ShootStatus::Reached) throw NumericalError("build_profile: shot stalled; c_f is not a front speed");
    double Dend = Ds.back();
    for (double& d : Ds) d -= Dend;

    const double theta = nl.theta();
    const double b0 = pr.beta0_;
    pr.D_left_ = Ds.front();
    pr.w_left_ = 1.0 - Us.front();

    // left tail nodes, linearised decay into 1
    double Dmin = std::min(-domain_half_width, pr.D_left_ + std::log(1e-9 / pr.w_left_) / b0 - step);
    std::vector<double> D, U, W, P;
    int nleft = static_cast<int>(std::ceil((pr.D_left_ - Dmin) / step));
    for (int k = nleft; k >= 1; --k) {
        double d = pr.D_left_ - k * step;
        double w = pr.w_left_ * std::exp(b0 * (d - pr.D_left_));
        D.push_back(d);
        W.push_back(w);
        U.push_back(1.0 - w);
        P.push_back(b0 * w);
    }
    pr.ib_ = D.size();
    for (std::size_t i = 0; i < Ds.size(); ++i) {
        D.push_back(Ds[i]);
        U.push_back(Us[i]);
        W.push_back(1.0 - Us[i]);
        P.push_back(Ps[i]);
    }
    pr.ie_ = D.size();
    // right tail nodes, exact
    double Dmax = std::max(domain_half_width, std::log(theta / 1e-7) / c_f);
    int nright = static_cast<int>(std::ceil(Dmax / step));
    for (int k = 1; k <= nright; ++k) {
        double d = k * step;
        double u = theta * std::exp(-c_f * d);
        D.push_back(d);
        U.push_back(u);
        W.push_back(1.0 - u);
        P.push_back(c_f * u);
    }
    pr.D_ = std::move(D);
    pr.U_ = std::move(U);
    pr.W_ = std::move(W);
    pr.P_ = std::move(P);

    // Hermite slopes for W on the integrated segment, Fritsch-Carlson limited
    std::size_t n = pr.ie_ - pr.ib_;
    pr.mL_.assign(n, 0.0);
    pr.mR_.assign(n, 0.0);
    for (std::size_t k = pr.ib_; k + 1 < pr.ie_; ++k) {
        std::size_t j = k - pr.ib_;
        double h = pr.D_[k + 1] - pr.D_[k];
        double delta = (pr.W_[k + 1] - pr.W_[k]) / h;
        double ml = pr.P_[k], mr = pr.P_[k + 1];
        if (delta <= 0) {
            ml = mr = 0;
        } else {
            double a = ml / delta, b = mr / delta, s = a * a + b * b;
            if (s > 9) {
                double tau = 3 / std::sqrt(s);
                ml = tau * a * delta;
                mr = tau * b * delta;
            }
        }
        pr.mL_[j] = ml;
        pr.mR_[j] = mr;
    }
    return pr;
}

ProfileSample WaveProfile::eval(double D) const {
    ProfileSample s;
    const double c = c_;
    if (D >= 0) {
        s.log_u = std::log(theta_) - c * D;
        s.u = std::exp(s.log_u);
        s.w = -std::expm1(s.log_u);
        s.du = -c * s.u;
        s.d2u = c * c * s.u;
        s.dlog_u = -c;
        s.d2log_u = 0;
        return s;
    }
    if (D <= D_left_) {
        s.w = w_left_ * std::exp(beta0_ * (D - D_left_));
        s.u = 1.0 - s.w;
        s.du = -beta0_ * s.w;
    } else {
        auto it = std::upper_bound(D_.begin() + ib_, D_.begin() + ie_, D);
        std::size_t k = static_cast<std::size_t>(it - D_.begin()) - 1;
        if (k + 1 >= ie_) k = ie_ - 2;
        double h = D_[k + 1] - D_[k];
        double t = (D - D_[k]) / h;
        double t2 = t * t, t3 = t2 * t;
        double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        double g00 = 6 * t2 - 6 * t, g10 = 3 * t2 - 4 * t + 1, g01 = -6 * t2 + 6 * t, g11 = 3 * t2 - 2 * t;
        std::size_t j = k - ib_;
        double ml = mL_[j], mr = mR_[j];
        s.w = h00 * W_[k] + h * h10 * ml + h01 * W_[k + 1] + h * h11 * mr;
        double dw = (g00 * W_[k] + g01 * W_[k + 1]) / h + g10 * ml + g11 * mr;
        s.u = 1.0 - s.w;
        s.du = -dw;
    }
    s.d2u = -c * s.du - nl_.f(s.u);
    s.log_u = std::log(s.u);
    s.dlog_u = s.du / s.u;
    s.d2log_u = s.d2u / s.u - s.dlog_u * s.dlog_u;
    return s;
}

double WaveProfile::inverse(double u) const {
    if (!(u > 0 && u < 1)) throw DomainError("WaveProfile::inverse: u must lie in (0, 1)");
    if (u <= theta_) return std::log(theta_ / u) / c_;
    double w = 1.0 - u;
    if (w <= w_left_) return D_left_ + std::log(w / w_left_) / beta0_;
    double lo = D_left_, hi = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1 + std::abs(lo)); ++it) {
        double mid = 0.5 * (lo + hi);
        (eval(mid).u > u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void WaveProfile::write_csv(std::ostream& os) const {
    TailRates tr = tail_rates(*this, nl_);
    os << std::setprecision(17);
    os << "# c_f=" << c_ << "\n# beta0=" << beta0_ << "\n# L1=" << tr.L1 << "\n# L2=" << tr.L2 << "\n# L3=" << tr.L3
       << "\n# L4=" << tr.L4 << "\n";
    os << "D,U\n";
    for (std::size_t k = 0; k < D_.size(); ++k) os << D_[k] << ',' << U_[k] << '\n';
}

TailRates tail_rates(const WaveProfile& pr, const CombustionNonlinearity& nl) {
    TailRates tr;
    tr.speed = pr.speed();
    tr.beta0 = characteristic_root(nl, pr.speed());
    const double c = tr.speed, b0 = tr.beta0;
    const auto& D = pr.grid();
    double inf = std::numeric_limits<double>::infinity();
    tr.L1 = inf;
    tr.L2 = -inf;
    tr.L4 = inf;
    tr.L3 = -inf;
    tr.right_deriv_min = tr.left_deriv_min = inf;
    tr.right_deriv_max = tr.left_deriv_max = -inf;
    std::vector<double> rx, ry, lx, ly;
    for (std::size_t k = 0; k < D.size(); ++k) {
        double d = D[k];
        ProfileSample s = pr.eval(d);
        if (d > 0) {
            double r = std::exp(s.log_u + c * d);
            tr.L1 = std::min(tr.L1, r);
            tr.L2 = std::max(tr.L2, r);
            double g = std::exp(c * d);
            for (double v : {std::abs(s.du) * g, std::abs(s.d2u) * g}) {
                tr.right_deriv_min = std::min(tr.right_deriv_min, v);
                tr.right_deriv_max = std::max(tr.right_deriv_max, v);
            }
            rx.push_back(d);
            ry.push_back(s.log_u);
        } else if (d < 0) {
            double g = std::exp(-b0 * d);
            double r = s.w * g;
            tr.L4 = std::min(tr.L4, r);
            tr.L3 = std::max(tr.L3, r);
            for (double v : {std::abs(s.du) * g, std::abs(s.d2u) * g}) {
                tr.left_deriv_min = std::min(tr.left_deriv_min, v);
                tr.left_deriv_max = std::max(tr.left_deriv_max, v);
            }
            // linear regime only: the correction to log w is O(w)
            if (k >= pr.integrated_begin() && k < pr.integrated_end() && s.w <= 1e-3) {
                lx.push_back(d);
                ly.push_back(std::log(s.w));
            }
        }
    }
    if (lx.size() < 20 || lx.back() - lx.front() < 5)
        throw DomainError("tail_rates: left fit window too short, widen the profile domain");
    if (rx.size() < 20) throw DomainError("tail_rates: right fit window too short, widen the profile domain");
    double sl = 0, sr = 0;
    linear_fit(lx, ly, sl);
    linear_fit(rx, ry, sr);
    tr.fitted_left_rate = sl;
    tr.fitted_right_rate = -sr;
    return tr;
}

ProfileCheck check_profile(const WaveProfile& profile, const CombustionNonlinearity& nl, double half_width,
                           double h) {
    ProfileCheck out;
    const double c = profile.speed();
    // offset keeps the stencil off the table nodes
    for (double D = -half_width + 0.37 * h; D <= half_width; D += h) {
        double up = profile(D + h), u0 = profile(D), um = profile(D - h);
        double r = (up - 2 * u0 + um) / (h * h) + c * (up - um) / (2 * h) + nl.f(u0);
        out.ode_residual = std::max(out.ode_residual, std::abs(r));
    }
    const double th = nl.theta();
    for (double D = 0; D <= half_width; D += h)
        out.tail_error = std::max(out.tail_error, std::abs(profile(D) / (th * std::exp(-c * D)) - 1));
    out.char_root = characteristic_root(nl, c);
    out.beta0_rel_error = std::abs(tail_rates(profile, nl).fitted_left_rate / out.char_root - 1);
    return out;
}

ScalingCheck check_scaling(const CombustionNonlinearity& nl, double k, double half_width) {
    ScalingCheck out;
    out.k = k;
    auto big = nl.scaled(k * k);
    double c1 = find_wave_speed(nl), c2 = find_wave_speed(big);
    out.speed_ratio = c2 / c1;
    // both tables are anchored at U(0) = theta
    auto p1 = build_profile(nl, c1, half_width * k), p2 = build_profile(big, c2, half_width);
    for (double D = -half_width; D <= half_width; D += 0.01)
        out.profile_error = std::max(out.profile_error, std::abs(p2(D) - p1(k * D)));
    return out;
}

} // namespace cfront
