#pragma once

#include <cmath>

namespace cfront {

// Second-order univariate Taylor jet: value, first and second derivative
// along one seeded direction. Enough for u_t and u_kk one axis at a time.
struct Jet {
    double v = 0, d = 0, dd = 0;

    constexpr Jet() = default;
    constexpr Jet(double value) : v(value) {}
    constexpr Jet(double value, double d1, double d2) : v(value), d(d1), dd(d2) {}

    static constexpr Jet variable(double x) { return {x, 1.0, 0.0}; }
};

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

// g(x) given g, g', g'' at x.v
inline Jet chain(const Jet& x, double g, double g1, double g2) {
    return {g, g1 * x.d, g2 * x.d * x.d + g1 * x.dd};
}
inline double chain(double, double g, double, double) { return g; }

inline Jet operator-(const Jet& a) { return {-a.v, -a.d, -a.dd}; }
inline Jet operator+(const Jet& a, const Jet& b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
inline Jet operator-(const Jet& a, const Jet& b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
inline Jet operator*(const Jet& a, const Jet& b) {
    return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
}
inline Jet operator/(const Jet& a, const Jet& b) {
    double r = 1.0 / b.v;
    Jet inv = chain(b, r, -r * r, 2.0 * r * r * r);
    return a * inv;
}
inline Jet operator+(const Jet& a, double b) { return {a.v + b, a.d, a.dd}; }
inline Jet operator+(double a, const Jet& b) { return b + a; }
inline Jet operator-(const Jet& a, double b) { return {a.v - b, a.d, a.dd}; }
inline Jet operator-(double a, const Jet& b) { return {a - b.v, -b.d, -b.dd}; }
inline Jet operator*(const Jet& a, double b) { return {a.v * b, a.d * b, a.dd * b}; }
inline Jet operator*(double a, const Jet& b) { return b * a; }
inline Jet operator/(const Jet& a, double b) { return a * (1.0 / b); }
inline Jet operator/(double a, const Jet& b) { return Jet(a) / b; }

inline Jet& operator+=(Jet& a, const Jet& b) { return a = a + b; }
inline Jet& operator-=(Jet& a, const Jet& b) { return a = a - b; }
inline Jet& operator*=(Jet& a, const Jet& b) { return a = a * b; }

inline Jet exp(const Jet& a) {
    double e = std::exp(a.v);
    return chain(a, e, e, e);
}
inline Jet log(const Jet& a) {
    double r = 1.0 / a.v;
    return chain(a, std::log(a.v), r, -r * r);
}
inline Jet sqrt(const Jet& a) {
    double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

} // namespace cfront
