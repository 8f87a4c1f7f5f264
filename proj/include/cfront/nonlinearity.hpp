#pragma once

#include <utility>

namespace cfront {

// f(u) = a (u - theta)^p (1 - u) on (theta, 1 + sigma], zero on [-sigma, theta].
// Arguments outside [-sigma, 1 + sigma] are clamped.
class CombustionNonlinearity {
public:
    static CombustionNonlinearity make(double theta, double amplitude, double exponent, double sigma);
    // a = 0: no reaction at all. Only used as a degenerate test case.
    static CombustionNonlinearity inert(double theta, double sigma);

    double theta() const { return theta_; }
    double amplitude() const { return a_; }
    double exponent() const { return p_; }
    double sigma() const { return sigma_; }
    double fprime_at_one() const { return fp1_; }
    double gamma_star() const { return gamma_star_; }
    double holder_exponent() const { return p_ - 1.0 < 1.0 ? p_ - 1.0 : 1.0; }
    // sup |f'| over [0, 1]
    double lipschitz() const { return lip_; }

    double f(double u) const;
    double fprime(double u) const;
    std::pair<double, double> eval(double u) const { return {f(u), fprime(u)}; }

    // same family with amplitude multiplied by k
    CombustionNonlinearity scaled(double k) const;

private:
    CombustionNonlinearity() = default;
    void finish();

    double theta_ = 0, a_ = 0, p_ = 2, sigma_ = 0;
    double fp1_ = 0, gamma_star_ = 0, lip_ = 0;
};

inline CombustionNonlinearity make_combustion(double theta, double amplitude, double exponent, double sigma) {
    return CombustionNonlinearity::make(theta, amplitude, exponent, sigma);
}

// Largest gamma <= min(theta/4, (1-theta)/2, sigma/4) with
// 1.5 f'(1) <= f' <= 0.5 f'(1) on [1 - 2 gamma, 1 + 2 gamma], by bisection.
double compute_gamma_star(const CombustionNonlinearity& nl, double tol = 1e-10);

} // namespace cfront
