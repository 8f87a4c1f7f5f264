#pragma once
// Reference computations kept apart from the library code paths.

#include <cmath>
#include <functional>

namespace oracle {

// combustion source written out directly
inline double f(double u, double theta, double a = 1, double p = 2) {
    return u > theta && u < 1 ? a * std::pow(u - theta, p) * (1 - u) : 0.0;
}

// p(w) = -U' as a function of w = 1 - U: dp/dw = f(1 - w) / p - c, started on the
// unstable eigendirection p = mu w. Returns p(1 - theta) - c theta, or -1 if p hits 0.
inline double shoot(double c, double theta, double a = 1, double p = 2, int steps = 200000) {
    double fp1 = -a * std::pow(1 - theta, p);
    double mu = 0.5 * (-c + std::sqrt(c * c - 4 * fp1));
    double w = 1e-7, P = mu * w;
    double h = (1 - theta - w) / steps;
    auto rhs = [&](double ww, double pp) { return f(1 - ww, theta, a, p) / pp - c; };
    for (int k = 0; k < steps; ++k) {
        double k1 = rhs(w, P);
        double k2 = rhs(w + h / 2, P + h / 2 * k1);
        double k3 = rhs(w + h / 2, P + h / 2 * k2);
        double k4 = rhs(w + h, P + h * k3);
        P += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        w += h;
        if (!(P > 0)) return -1.0;
    }
    return P - c * theta;
}

inline double wave_speed(double theta, double a = 1, double p = 2) {
    double lo = 1e-4, hi = 2 * std::sqrt(a);
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (shoot(mid, theta, a, p) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// distance from (t, y) to the line y = s t in the (t, y) plane
inline double line_distance(double t, double y, double s) { return std::abs(y - s * t) / std::sqrt(1 + s * s); }

} // namespace oracle
