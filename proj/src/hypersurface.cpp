#include "cfront/hypersurface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "cfront/errors.hpp"
#include "cfront/parallel.hpp"

namespace cfront {

ScaledSurface::ScaledSurface(const FrontConfiguration& cfg, double alpha)
    : cfg_(cfg), alpha_(alpha), m_(cfg.dimension() - 1), n_(cfg.size()), c_(cfg.speed()) {
    if (!(alpha > 0)) throw ValidationError("surface: alpha must be positive");
    min_s_ = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
        const Point& e = cfg.direction(i);
        a_.push_back({m_ > 0 ? e[0] : 0.0, m_ > 1 ? e[1] : 0.0});
        s_.push_back(cfg.sin_angle(i));
        at_.push_back(alpha * cfg.facet(i).shift);
        min_s_ = std::min(min_s_, cfg.sin_angle(i));
    }
}

double ScaledSurface::psi_i(std::size_t i, double t, const XVec& x) const {
    double v = c_ * t - at_[i];
    for (int k = 0; k < m_; ++k) v -= a_[i][k] * x[k];
    return v / s_[i];
}

double ScaledSurface::psi(double t, const XVec& x) const {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) m = std::max(m, psi_i(i, t, x));
    return m;
}

double ScaledSurface::residual(double t, const XVec& x, double y) const {
    double F = -1;
    for (std::size_t i = 0; i < n_; ++i) F += std::exp(-s_[i] * (y - psi_i(i, t, x)));
    return F;
}

double ScaledSurface::solve_phi(double t, const XVec& x) const {
    // work with y = psi + s; q_i = s_i (s + d_i), d_i = psi - psi_i >= 0
    std::array<double, 16> d{};
    double ps = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
        d[i] = psi_i(i, t, x);
        ps = std::max(ps, d[i]);
    }
    for (std::size_t i = 0; i < n_; ++i) d[i] = ps - d[i];
    if (n_ == 1) return ps;
    double lo = 0, hi = std::log(static_cast<double>(n_)) / min_s_;
    // F is convex and decreasing in s: Newton from the left end climbs
    // monotonically to the root; the bracket only guards round-off
    double s = 0;
    for (int it = 0; it < 200; ++it) {
        double F = -1, Fy = 0;
        for (std::size_t i = 0; i < n_; ++i) {
            double e = std::exp(-s_[i] * (s + d[i]));
            F += e;
            Fy -= s_[i] * e;
        }
        if (F > 0)
            lo = s;
        else
            hi = s;
        if (std::abs(F) <= 1e-16) break;
        double sn = s - F / Fy;
        if (!(sn > lo && sn < hi)) sn = 0.5 * (lo + hi);
        if (std::abs(sn - s) <= 1e-16 * (1 + std::abs(s))) {
            s = sn;
            break;
        }
        s = sn;
        if (it == 199) {
            std::ostringstream os;
            os << "solve_phi: no convergence at t=" << t << " x=(" << x[0] << "," << x[1] << ") residual " << F;
            throw NumericalError(os.str());
        }
    }
    return ps + s;
}

std::vector<double> ScaledSurface::weights(double t, const XVec& x) const {
    double y = solve_phi(t, x);
    std::vector<double> w(n_);
    for (std::size_t i = 0; i < n_; ++i) w[i] = std::exp(-s_[i] * (y - psi_i(i, t, x)));
    return w;
}

PhiDerivatives ScaledSurface::derivatives(double t, const XVec& x) const {
    PhiDerivatives D;
    D.phi = solve_phi(t, x);
    std::vector<double> w(n_);
    double S = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        w[i] = std::exp(-s_[i] * (D.phi - psi_i(i, t, x)));
        S += s_[i] * w[i];
    }
    // variables: 0 = t, 1.. = x_k; coefficient of each variable in q_i
    const int nv = 1 + m_;
    auto coef = [&](std::size_t i, int v) { return v == 0 ? -c_ : a_[i][v - 1]; };
    std::array<double, 3> d1{};
    for (int v = 0; v < nv; ++v) {
        double num = 0;
        for (std::size_t i = 0; i < n_; ++i) num += w[i] * coef(i, v);
        d1[v] = -num / S;
    }
    // total derivative of q_i along variable v on the surface
    auto g = [&](std::size_t i, int v) { return coef(i, v) + s_[i] * d1[v]; };
    std::array<std::array<double, 3>, 3> d2{};
    for (int u = 0; u < nv; ++u)
        for (int v = 0; v < nv; ++v) {
            double num = 0;
            for (std::size_t i = 0; i < n_; ++i) num += w[i] * g(i, u) * g(i, v);
            d2[u][v] = num / S;
        }
    D.phi_t = d1[0];
    D.phi_tt = d2[0][0];
    for (int k = 0; k < m_; ++k) {
        D.grad[k] = d1[k + 1];
        D.grad_t[k] = d2[0][k + 1];
        for (int l = 0; l < m_; ++l) D.hess[k][l] = d2[k + 1][l + 1];
    }
    return D;
}

Flatness ScaledSurface::flatness(double t, const XVec& x) const {
    std::vector<double> w = weights(t, x);
    Flatness F;
    double sq = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        sq += w[i] * w[i];
        for (std::size_t j = 0; j < n_; ++j)
            if (i != j) F.pair_sum += w[i] * w[j];
    }
    F.identity = 1 - sq;
    return F;
}

double ScaledSurface::log_flatness_rate(double t, const XVec& x) const {
    SurfaceJet<Jet> J = evaluate(Jet::variable(t), std::array<Jet, 2>{Jet(x[0]), Jet(x[1])});
    return J.h.d / J.h.v;
}

namespace {

std::vector<std::array<double, 3>> surface_points(int m, std::size_t count, double box, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-box, box);
    std::vector<std::array<double, 3>> pts(count);
    for (auto& p : pts) {
        p = {U(rng), 0, 0};
        for (int j = 0; j < m; ++j) p[1 + j] = U(rng);
    }
    return pts;
}

} // namespace

SurfaceCheck check_surface(const FrontConfiguration& cfg, double alpha, std::size_t count, double box,
                           std::uint64_t seed, std::size_t fd_points, int threads) {
    ScaledSurface S(cfg, alpha);
    const int m = S.xdim();
    if (threads <= 0) threads = default_threads();
    struct Acc {
        double res = 0, gap = std::numeric_limits<double>::infinity(), ratio = 0, fd = 0;
    };
    auto combine = [](Acc a, const Acc& b) {
        a.res = std::max(a.res, b.res);
        a.gap = std::min(a.gap, b.gap);
        a.ratio = std::max(a.ratio, b.ratio);
        a.fd = std::max(a.fd, b.fd);
        return a;
    };
    auto run = [&](const std::vector<std::array<double, 3>>& pts, std::size_t nfd) {
        return blocked_reduce(pts.size(), 256, threads, Acc{}, [&](std::size_t k) {
            Acc a;
            double t = pts[k][0];
            XVec x{pts[k][1], pts[k][2]};
            double phi = S.solve_phi(t, x);
            a.res = std::abs(S.residual(t, x, phi));
            double gap = phi - S.psi(t, x);
            a.gap = gap;
            double h = S.flatness(t, x).pair_sum;
            if (h > 1e-300) a.ratio = gap / h;
            if (k < nfd) {
                PhiDerivatives D = S.derivatives(t, x);
                const double e = 1e-4;
                auto f = [&](double dt, double d0, double d1) { return S.solve_phi(t + dt, {x[0] + d0, x[1] + d1}); };
                double err = std::abs((f(e, 0, 0) - f(-e, 0, 0)) / (2 * e) - D.phi_t);
                for (int j = 0; j < m; ++j) {
                    double dp = j == 0 ? e : 0, dq = j == 1 ? e : 0;
                    err = std::max(err, std::abs((f(0, dp, dq) - f(0, -dp, -dq)) / (2 * e) - D.grad[j]));
                    double second = (f(0, dp, dq) - 2 * phi + f(0, -dp, -dq)) / (e * e);
                    err = std::max(err, std::abs(second - D.hess[j][j]));
                }
                a.fd = err;
            }
            return a;
        }, combine);
    };
    SurfaceCheck out;
    out.count = count;
    out.fd_points = std::min(fd_points, count);
    Acc a = run(surface_points(m, count, box, seed), out.fd_points);
    out.max_residual = a.res;
    out.min_gap = a.gap;
    out.c_hat = a.ratio;
    out.max_fd_error = a.fd;
    out.holdout_ratio = run(surface_points(m, count, box, seed ^ 0x9e3779b97f4a7c15ULL), 0).ratio;
    return out;
}

} // namespace cfront
