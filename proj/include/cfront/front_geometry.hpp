#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "cfront/wave_profile.hpp"

namespace cfront {

// Spatial point in the rotated frame: (x_1, .., x_{N-1}, y), y along e0.
// Only the first N entries are used.
using Point = std::array<double, 3>;

struct Facet {
    std::vector<double> nu;  // unit vector in R^{N-1}; for N = 2 a single +-1
    double angle = 0;        // theta_i in (0, pi/2]
    double shift = 0;        // tau_i
};

class FrontConfiguration {
public:
    FrontConfiguration(int dimension, std::vector<Facet> facets, double speed);

    int dimension() const { return N_; }
    std::size_t size() const { return facets_.size(); }
    double speed() const { return c_; }
    const Facet& facet(std::size_t i) const { return facets_[i]; }
    const std::vector<Facet>& facets() const { return facets_; }

    // e_i = (nu_i cos theta_i, sin theta_i)
    const Point& direction(std::size_t i) const { return e_[i]; }
    double sin_angle(std::size_t i) const { return sin_[i]; }
    double cos_angle(std::size_t i) const { return cos_[i]; }
    // max_i |nu_i cot theta_i|
    double max_slope() const;

    // symmetric V or pyramid: n facets with common angle, nu spread evenly
    static FrontConfiguration symmetric(int dimension, std::size_t n, double angle, double speed);

private:
    int N_;
    std::vector<Facet> facets_;
    double c_;
    std::vector<Point> e_;
    std::vector<double> sin_, cos_;
};

struct QValues {
    std::vector<double> q;
    std::size_t argmin = 0;
    double min = 0;
};

QValues q_values(const FrontConfiguration& cfg, double t, const Point& z);
// min_i q_i only, no allocation
double min_q(const FrontConfiguration& cfg, double t, const Point& z);

double subsolution_lower(const FrontConfiguration& cfg, const WaveProfile& profile, double t, const Point& z);

struct Distances {
    double boundary = 0;
    double ridge = 0;
};

// Euclidean distances in space-time (t, z).
double boundary_distance(const FrontConfiguration& cfg, double t, const Point& z);
double ridge_distance(const FrontConfiguration& cfg, double t, const Point& z);
Distances distances(const FrontConfiguration& cfg, double t, const Point& z);

// Same queries inside the time slice t (spatial metric only).
double slice_boundary_distance(const FrontConfiguration& cfg, double t, const Point& z);
double slice_ridge_distance(const FrontConfiguration& cfg, double t, const Point& z);

enum class Region { Burned, Interface, Unburned };
Region classify_region(const FrontConfiguration& cfg, double t, const Point& z, double tol = 1e-12);
const char* region_name(Region r);

} // namespace cfront
