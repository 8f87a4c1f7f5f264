#include "cfront/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cfront/errors.hpp"

namespace cfront {

namespace {

void require(bool ok, const char* field, const std::string& msg) {
    if (!ok) {
        std::ostringstream os;
        os << "nonlinearity." << field << ": " << msg;
        throw ValidationError(os.str());
    }
}

// f'' on (theta, 1 + sigma]; used to locate interior extrema of f'
double fsecond(const CombustionNonlinearity& nl, double u) {
    double s = u - nl.theta(), p = nl.exponent(), a = nl.amplitude();
    if (s <= 0) return 0;
    double t = p * (p - 1) * std::pow(s, p - 2) * (1 - u) - 2 * p * std::pow(s, p - 1);
    return a * t;
}

// min and max of f' over [lo, hi]: endpoints plus sign changes of f''
std::pair<double, double> fprime_range(const CombustionNonlinearity& nl, double lo, double hi) {
    double mn = std::min(nl.fprime(lo), nl.fprime(hi));
    double mx = std::max(nl.fprime(lo), nl.fprime(hi));
    const int m = 256;
    double prev_u = lo, prev_g = fsecond(nl, lo);
    for (int k = 1; k <= m; ++k) {
        double u = lo + (hi - lo) * k / m;
        double g = fsecond(nl, u);
        if ((prev_g < 0) != (g < 0)) {
            double a = prev_u, b = u, ga = prev_g;
            for (int it = 0; it < 80; ++it) {
                double c = 0.5 * (a + b), gc = fsecond(nl, c);
                if ((gc < 0) == (ga < 0)) {
                    a = c;
                    ga = gc;
                } else {
                    b = c;
                }
            }
            double v = nl.fprime(0.5 * (a + b));
            mn = std::min(mn, v);
            mx = std::max(mx, v);
        }
        prev_u = u;
        prev_g = g;
    }
    return {mn, mx};
}

} // namespace

CombustionNonlinearity CombustionNonlinearity::make(double theta, double amplitude, double exponent, double sigma) {
    require(std::isfinite(theta) && theta > 0 && theta < 1, "theta", "must lie in (0, 1)");
    require(std::isfinite(amplitude) && amplitude > 0, "amplitude", "must be positive");
    require(std::isfinite(exponent) && exponent >= 2, "exponent", "must be >= 2");
    require(std::isfinite(sigma) && sigma > 0 && sigma < 1, "sigma", "must lie in (0, 1)");
    CombustionNonlinearity nl;
    nl.theta_ = theta;
    nl.a_ = amplitude;
    nl.p_ = exponent;
    nl.sigma_ = sigma;
    nl.finish();
    return nl;
}

CombustionNonlinearity CombustionNonlinearity::inert(double theta, double sigma) {
    require(theta > 0 && theta < 1, "theta", "must lie in (0, 1)");
    require(sigma > 0 && sigma < 1, "sigma", "must lie in (0, 1)");
    CombustionNonlinearity nl;
    nl.theta_ = theta;
    nl.sigma_ = sigma;
    nl.finish();
    return nl;
}

CombustionNonlinearity CombustionNonlinearity::scaled(double k) const {
    if (a_ == 0) return *this;
    return make(theta_, a_ * k, p_, sigma_);
}

void CombustionNonlinearity::finish() {
    fp1_ = -a_ * std::pow(1 - theta_, p_);
    gamma_star_ = a_ > 0 ? compute_gamma_star(*this) : 0.0;
    if (a_ > 0) {
        auto [mn, mx] = fprime_range(*this, theta_, 1.0);
        lip_ = std::max(std::abs(mn), std::abs(mx));
    }
}

double CombustionNonlinearity::f(double u) const {
    u = std::clamp(u, -sigma_, 1 + sigma_);
    if (u <= theta_) return 0;
    double s = u - theta_;
    if (p_ == 2) return a_ * s * s * (1 - u);
    return a_ * std::pow(s, p_) * (1 - u);
}

double CombustionNonlinearity::fprime(double u) const {
    u = std::clamp(u, -sigma_, 1 + sigma_);
    if (u <= theta_) return 0;
    double s = u - theta_;
    double sp = p_ == 2 ? s : std::pow(s, p_ - 1);
    return a_ * sp * (p_ * (1 - u) - s);
}

double compute_gamma_star(const CombustionNonlinearity& nl, double tol) {
    double bound = std::min({nl.theta() / 4, (1 - nl.theta()) / 2, nl.sigma() / 4});
    double fp1 = nl.fprime_at_one();
    auto ok = [&](double g) {
        auto [mn, mx] = fprime_range(nl, 1 - 2 * g, 1 + 2 * g);
        return mn >= 1.5 * fp1 && mx <= 0.5 * fp1;
    };
    if (ok(bound)) return bound;
    double lo = 0, hi = bound;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    if (lo <= 0) throw NumericalError("gamma_star: derivative sandwich fails on every interval");
    return lo;
}

} // namespace cfront
