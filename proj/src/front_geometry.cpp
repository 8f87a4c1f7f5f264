#include "cfront/front_geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "cfront/errors.hpp"

namespace cfront {

FrontConfiguration::FrontConfiguration(int dimension, std::vector<Facet> facets, double speed)
    : N_(dimension), facets_(std::move(facets)), c_(speed) {
    if (N_ != 2 && N_ != 3) throw ValidationError("front.N: must be 2 or 3");
    if (facets_.empty()) throw ValidationError("front.facets: need at least one facet");
    if (facets_.size() > 16) throw ValidationError("front.facets: at most 16 facets supported");
    if (!(c_ > 0)) throw ValidationError("front: speed must be positive");
    for (std::size_t i = 0; i < facets_.size(); ++i) {
        Facet& f = facets_[i];
        std::ostringstream where;
        where << "front.facets[" << i << "]";
        if (static_cast<int>(f.nu.size()) != N_ - 1)
            throw ValidationError(where.str() + ".nu: expected " + std::to_string(N_ - 1) + " components");
        double norm = 0;
        for (double v : f.nu) norm += v * v;
        norm = std::sqrt(norm);
        if (!(std::abs(norm - 1) < 1e-6)) throw ValidationError(where.str() + ".nu: must be a unit vector");
        for (double& v : f.nu) v /= norm;
        if (!(f.angle > 0 && f.angle <= std::numbers::pi / 2 + 1e-15))
            throw ValidationError(where.str() + ".theta: must lie in (0, pi/2]");
        if (!std::isfinite(f.shift)) throw ValidationError(where.str() + ".tau: must be finite");
        double s = std::sin(f.angle), co = std::cos(f.angle);
        if (f.angle >= std::numbers::pi / 2) co = 0;
        Point e{0, 0, 0};
        for (int k = 0; k < N_ - 1; ++k) e[k] = f.nu[k] * co;
        e[N_ - 1] = s;
        double en = 0;
        for (int k = 0; k < N_; ++k) en += e[k] * e[k];
        en = std::sqrt(en);
        for (int k = 0; k < N_; ++k) e[k] /= en;
        e_.push_back(e);
        sin_.push_back(e[N_ - 1]);
        cos_.push_back(co);
    }
    for (std::size_t i = 0; i < facets_.size(); ++i)
        for (std::size_t j = i + 1; j < facets_.size(); ++j) {
            double d = 0;
            for (int k = 0; k < N_; ++k) d += std::abs(e_[i][k] - e_[j][k]);
            if (d < 1e-12)
                throw ValidationError("front.facets: directions " + std::to_string(i) + " and " + std::to_string(j) +
                                      " coincide");
        }
}

double FrontConfiguration::max_slope() const {
    double m = 0;
    for (std::size_t i = 0; i < size(); ++i) {
        double nc = 0;
        for (int k = 0; k < N_ - 1; ++k) nc += e_[i][k] * e_[i][k];
        m = std::max(m, std::sqrt(nc) / sin_[i]);
    }
    return m;
}

FrontConfiguration FrontConfiguration::symmetric(int dimension, std::size_t n, double angle, double speed) {
    std::vector<Facet> fs;
    for (std::size_t i = 0; i < n; ++i) {
        Facet f;
        f.angle = angle;
        if (dimension == 2) {
            f.nu = {i % 2 == 0 ? -1.0 : 1.0};
        } else {
            double a = 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
            f.nu = {std::cos(a), std::sin(a)};
        }
        fs.push_back(f);
    }
    return FrontConfiguration(dimension, fs, speed);
}

QValues q_values(const FrontConfiguration& cfg, double t, const Point& z) {
    QValues r;
    r.q.resize(cfg.size());
    r.min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const Point& e = cfg.direction(i);
        double q = -cfg.speed() * t + cfg.facet(i).shift;
        for (int k = 0; k < cfg.dimension(); ++k) q += z[k] * e[k];
        r.q[i] = q;
        if (q < r.min) {
            r.min = q;
            r.argmin = i;
        }
    }
    return r;
}

double min_q(const FrontConfiguration& cfg, double t, const Point& z) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const Point& e = cfg.direction(i);
        double q = -cfg.speed() * t + cfg.facet(i).shift;
        for (int k = 0; k < cfg.dimension(); ++k) q += z[k] * e[k];
        m = std::min(m, q);
    }
    return m;
}

double subsolution_lower(const FrontConfiguration& cfg, const WaveProfile& profile, double t, const Point& z) {
    return profile(min_q(cfg, t, z));
}

namespace {

// Affine functions g.X + b on R^d, d <= 4.
struct Planes {
    int d = 0;
    std::size_t n = 0;
    std::array<std::array<double, 4>, 16> g{};
    std::array<double, 16> b{};

    double value(std::size_t l, const std::array<double, 4>& X) const {
        double v = b[l];
        for (int k = 0; k < d; ++k) v += g[l][k] * X[k];
        return v;
    }
    double norm(std::size_t l) const {
        double s = 0;
        for (int k = 0; k < d; ++k) s += g[l][k] * g[l][k];
        return std::sqrt(s);
    }
};

Planes spacetime_planes(const FrontConfiguration& cfg) {
    Planes P;
    P.d = cfg.dimension() + 1;
    P.n = cfg.size();
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        P.g[i][0] = -cfg.speed();
        for (int k = 0; k < cfg.dimension(); ++k) P.g[i][k + 1] = cfg.direction(i)[k];
        P.b[i] = cfg.facet(i).shift;
    }
    return P;
}

Planes slice_planes(const FrontConfiguration& cfg, double t) {
    Planes P;
    P.d = cfg.dimension();
    P.n = cfg.size();
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        for (int k = 0; k < cfg.dimension(); ++k) P.g[i][k] = cfg.direction(i)[k];
        P.b[i] = cfg.facet(i).shift - cfg.speed() * t;
    }
    return P;
}

// Solve the k x k system in place (k <= 4), partial pivoting. false if singular.
bool solve_small(int k, std::array<std::array<double, 4>, 4>& A, std::array<double, 4>& r) {
    for (int c = 0; c < k; ++c) {
        int piv = c;
        for (int i = c + 1; i < k; ++i)
            if (std::abs(A[i][c]) > std::abs(A[piv][c])) piv = i;
        if (std::abs(A[piv][c]) < 1e-12) return false;
        std::swap(A[piv], A[c]);
        std::swap(r[piv], r[c]);
        for (int i = c + 1; i < k; ++i) {
            double m = A[i][c] / A[c][c];
            for (int j = c; j < k; ++j) A[i][j] -= m * A[c][j];
            r[i] -= m * r[c];
        }
    }
    for (int c = k - 1; c >= 0; --c) {
        double s = r[c];
        for (int j = c + 1; j < k; ++j) s -= A[c][j] * r[j];
        r[c] = s / A[c][c];
    }
    return true;
}

// Distance from X to {value_l = 0 for l in `fixed`, value_l >= 0 for all l}.
// Enumerates candidate active sets S containing `fixed`; the projection onto
// the affine hull of the true active set is among them, and every feasible
// candidate lies in the set, so the minimum is exact.
double face_distance(const Planes& P, const std::array<double, 4>& X, unsigned fixed) {
    double best = std::numeric_limits<double>::infinity();
    double scale = 1;
    for (int k = 0; k < P.d; ++k) scale += std::abs(X[k]);
    const unsigned full = (1u << P.n) - 1;
    for (unsigned S = 1; S <= full; ++S) {
        if ((S & fixed) != fixed) continue;
        int k = std::popcount(S);
        if (k > P.d) continue;
        std::array<int, 4> idx{};
        int m = 0;
        for (std::size_t l = 0; l < P.n; ++l)
            if (S & (1u << l)) idx[m++] = static_cast<int>(l);
        std::array<std::array<double, 4>, 4> G{};
        std::array<double, 4> r{};
        for (int a = 0; a < k; ++a) {
            for (int b = 0; b < k; ++b) {
                double s = 0;
                for (int j = 0; j < P.d; ++j) s += P.g[idx[a]][j] * P.g[idx[b]][j];
                G[a][b] = s;
            }
            r[a] = P.value(idx[a], X);
        }
        if (!solve_small(k, G, r)) continue;
        std::array<double, 4> Y = X;
        for (int a = 0; a < k; ++a)
            for (int j = 0; j < P.d; ++j) Y[j] -= r[a] * P.g[idx[a]][j];
        bool feasible = true;
        for (std::size_t l = 0; l < P.n && feasible; ++l)
            if (P.value(l, Y) < -1e-10 * scale) feasible = false;
        if (!feasible) continue;
        double dist = 0;
        for (int j = 0; j < P.d; ++j) dist += (Y[j] - X[j]) * (Y[j] - X[j]);
        best = std::min(best, std::sqrt(dist));
    }
    return best;
}

double boundary_distance_impl(const Planes& P, const std::array<double, 4>& X) {
    double mn = std::numeric_limits<double>::infinity();
    for (std::size_t l = 0; l < P.n; ++l) mn = std::min(mn, P.value(l, X) / P.norm(l));
    if (mn >= 0) return mn;
    return face_distance(P, X, 0u);
}

double ridge_distance_impl(const Planes& P, const std::array<double, 4>& X) {
    if (P.n < 2) throw DomainError("ridge distance needs at least two facets");
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < P.n; ++i)
        for (std::size_t j = i + 1; j < P.n; ++j)
            best = std::min(best, face_distance(P, X, (1u << i) | (1u << j)));
    return best;
}

std::array<double, 4> spacetime_point(const FrontConfiguration& cfg, double t, const Point& z) {
    std::array<double, 4> X{t, 0, 0, 0};
    for (int k = 0; k < cfg.dimension(); ++k) X[k + 1] = z[k];
    return X;
}

std::array<double, 4> slice_point(const FrontConfiguration& cfg, const Point& z) {
    std::array<double, 4> X{0, 0, 0, 0};
    for (int k = 0; k < cfg.dimension(); ++k) X[k] = z[k];
    return X;
}

} // namespace

double boundary_distance(const FrontConfiguration& cfg, double t, const Point& z) {
    return boundary_distance_impl(spacetime_planes(cfg), spacetime_point(cfg, t, z));
}

double ridge_distance(const FrontConfiguration& cfg, double t, const Point& z) {
    return ridge_distance_impl(spacetime_planes(cfg), spacetime_point(cfg, t, z));
}

Distances distances(const FrontConfiguration& cfg, double t, const Point& z) {
    Planes P = spacetime_planes(cfg);
    auto X = spacetime_point(cfg, t, z);
    return {boundary_distance_impl(P, X), ridge_distance_impl(P, X)};
}

double slice_boundary_distance(const FrontConfiguration& cfg, double t, const Point& z) {
    return boundary_distance_impl(slice_planes(cfg, t), slice_point(cfg, z));
}

double slice_ridge_distance(const FrontConfiguration& cfg, double t, const Point& z) {
    return ridge_distance_impl(slice_planes(cfg, t), slice_point(cfg, z));
}

Region classify_region(const FrontConfiguration& cfg, double t, const Point& z, double tol) {
    double m = min_q(cfg, t, z);
    if (m < -tol) return Region::Burned;
    if (m > tol) return Region::Unburned;
    return Region::Interface;
}

const char* region_name(Region r) {
    switch (r) {
    case Region::Burned: return "burned";
    case Region::Interface: return "interface";
    case Region::Unburned: return "unburned";
    }
    return "?";
}

} // namespace cfront
