#pragma once

#include <array>
#include <cstdint>
#include <cmath>
#include <vector>

#include "cfront/front_geometry.hpp"
#include "cfront/jet.hpp"

namespace cfront {

// Transverse coordinates x in R^{N-1}; unused entries stay zero.
using XVec = std::array<double, 2>;

struct PhiDerivatives {
    double phi = 0;
    double phi_t = 0;
    XVec grad{};                           // nabla_x phi
    std::array<XVec, 2> hess{};            // nabla_x^2 phi
    XVec grad_t{};                         // d_t nabla_x phi
    double phi_tt = 0;
};

struct Flatness {
    double pair_sum = 0;  // sum_{i != j} e^{-(qh_i + qh_j)}
    double identity = 0;  // 1 - sum_i e^{-2 qh_i}
};

template <class T>
struct SurfaceJet {
    T phi;
    std::array<T, 2> grad;
    T h;
};

// Implicit graph y = phi(t, x, alpha) of sum_i exp(-q_i(t, x, y, alpha)) = 1 with
// q_i = x . nu_i cos(theta_i) + y sin(theta_i) - c t + alpha tau_i.
// All arguments are the surface's own coordinates (already scaled).
class ScaledSurface {
public:
    ScaledSurface(const FrontConfiguration& cfg, double alpha);

    const FrontConfiguration& config() const { return cfg_; }
    double alpha() const { return alpha_; }
    int xdim() const { return m_; }

    double psi_i(std::size_t i, double t, const XVec& x) const;
    double psi(double t, const XVec& x) const;
    double solve_phi(double t, const XVec& x) const;
    // sum_i exp(-q_i) - 1 at y
    double residual(double t, const XVec& x, double y) const;
    // weights e^{-qh_i} on the surface
    std::vector<double> weights(double t, const XVec& x) const;

    PhiDerivatives derivatives(double t, const XVec& x) const;
    Flatness flatness(double t, const XVec& x) const;
    // d_t h / h along the surface, for the 2 c_f comparison
    double log_flatness_rate(double t, const XVec& x) const;

    // phi, grad phi and h as jets. The double root is polished by two Newton
    // steps in jet arithmetic, which carries exact first and second derivatives.
    template <class T>
    SurfaceJet<T> evaluate(const T& t, const std::array<T, 2>& x) const;

private:
    FrontConfiguration cfg_;
    double alpha_;
    int m_;
    std::size_t n_;
    std::vector<XVec> a_;
    std::vector<double> s_, at_;  // sin theta_i, alpha tau_i
    double c_, min_s_;
};

template <class T>
SurfaceJet<T> ScaledSurface::evaluate(const T& t, const std::array<T, 2>& x) const {
    using std::exp;
    XVec xv{value_of(x[0]), value_of(x[1])};
    double y0 = solve_phi(value_of(t), xv);
    std::vector<T> r(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        T v = -c_ * t + at_[i];
        for (int k = 0; k < m_; ++k) v = v + a_[i][k] * x[k];
        r[i] = v;
    }
    T y = y0;
    for (int it = 0; it < 2; ++it) {
        T F = T(-1.0), Fy = T(0.0);
        for (std::size_t i = 0; i < n_; ++i) {
            T e = exp(-(s_[i] * y + r[i]));
            F = F + e;
            Fy = Fy - s_[i] * e;
        }
        y = y - F / Fy;
    }
    SurfaceJet<T> out;
    out.phi = y;
    T S = T(0.0), sq = T(0.0);
    std::array<T, 2> num{T(0.0), T(0.0)};
    for (std::size_t i = 0; i < n_; ++i) {
        T w = exp(-(s_[i] * y + r[i]));
        S = S + s_[i] * w;
        sq = sq + w * w;
        for (int k = 0; k < m_; ++k) num[k] = num[k] + a_[i][k] * w;
    }
    out.grad = {T(0.0), T(0.0)};
    for (int k = 0; k < m_; ++k) out.grad[k] = -num[k] / S;
    out.h = 1.0 - sq;
    return out;
}

struct SurfaceCheck {
    std::size_t count = 0;
    double max_residual = 0;    // |sum_i e^{-q_i} - 1| at phi
    double min_gap = 0;         // min of phi - psi
    double c_hat = 0;           // sup (phi - psi) / h on the sample
    double holdout_ratio = 0;   // same sup on an independent sample
    double max_fd_error = 0;    // analytic vs centred differences
    std::size_t fd_points = 0;
};

// Random (t, x) in [-box, box]^{N} for the surface at scale alpha.
SurfaceCheck check_surface(const FrontConfiguration& cfg, double alpha, std::size_t count, double box,
                           std::uint64_t seed, std::size_t fd_points = 1000, int threads = 0);

} // namespace cfront
