#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "cfront/front_geometry.hpp"
#include "cfront/nonlinearity.hpp"
#include "json.hpp"

namespace cfront {

class Barriers;

// Uniform grid, row-major with the last axis (y) fastest.
struct Grid {
    int dim = 2;
    std::array<std::size_t, 3> n{1, 1, 1};
    double dx = 1;
    std::array<double, 3> origin{0, 0, 0};

    std::size_t size() const { return n[0] * n[1] * n[2]; }
    std::size_t stride(int k) const;
    std::array<std::size_t, 3> multi(std::size_t idx) const;
    Point point(std::size_t idx) const;
    bool on_boundary(std::size_t idx) const;
    bool same_layout(const Grid& o) const { return dim == o.dim && n == o.n && dx == o.dx; }
};

struct Field {
    Grid grid;
    double time = 0;
    std::vector<double> values;

    Field() = default;
    Field(const Grid& g, double t) : grid(g), time(t), values(g.size(), 0.0) {}
};

enum class Scheme { Euler, RK2 };
enum class BoundaryPolicy { Lower, Upper, ExactPlanar };

Scheme parse_scheme(const std::string& s);
BoundaryPolicy parse_boundary(const std::string& s);
std::string to_string(Scheme s);
std::string to_string(BoundaryPolicy b);

struct SolverConfig {
    double dt = 0;  // 0: largest step under the CFL bound that divides snapshot_interval
    Scheme scheme = Scheme::Euler;
    BoundaryPolicy boundary = BoundaryPolicy::Lower;
    double cfl_safety = 0.4;
    double snapshot_interval = 0;  // 0: 1 / (4 c_f)
    // y-velocity of the comoving window; the grid shifts by whole cells so the
    // window origin is origin_ref + dx * round(frame_speed t / dx)
    double frame_speed = 0;
    int threads = 0;
};

using BoundaryFn = std::function<double(double, const Point&)>;

BoundaryFn make_boundary(BoundaryPolicy policy, const Barriers& barriers);

// dt satisfying the CFL bound and dividing `interval` exactly (when interval > 0)
double choose_dt(const Grid& g, const SolverConfig& cfg, double interval);

class Stepper {
public:
    Stepper(const Grid& reference, const CombustionNonlinearity& nl, const SolverConfig& cfg, BoundaryFn boundary);

    double dt() const { return dt_; }
    // grid origin the comoving window uses at time t
    Grid grid_at(double t) const;
    // fill with the boundary function on every cell (initial data from a barrier)
    Field sample(double t, const BoundaryFn& fn) const;
    void apply_boundary(Field& u) const;

    void step(Field& u);
    // integer number of steps to reach t_target; time lands exactly on it
    void advance_to(Field& u, double t_target);

    // statistics since construction
    double min_seen() const { return min_seen_; }
    double max_seen() const { return max_seen_; }
    long steps_taken() const { return steps_; }

private:
    void shift_window(Field& u, double t_new);
    void rhs(const std::vector<double>& u, std::vector<double>& out) const;

    Grid ref_;
    CombustionNonlinearity nl_;
    SolverConfig cfg_;
    BoundaryFn bc_;
    double dt_;
    int threads_;
    std::vector<std::size_t> boundary_idx_;
    std::vector<double> k1_, k2_, tmp_;
    double min_seen_ = 0, max_seen_ = 1;
    long steps_ = 0;
};

// one explicit step, free-function form
Field step(const Field& u, const CombustionNonlinearity& nl, const SolverConfig& cfg, const BoundaryFn& boundary);

struct Trajectory {
    std::vector<Field> snapshots;
    double dt = 0;
    double min_value = 0, max_value = 1;
};

// Snapshots at t0 + k * interval up to T (inclusive). `observer`, when set,
// receives every snapshot instead of it being stored.
Trajectory solve_cauchy(const Field& u0, const CombustionNonlinearity& nl, const SolverConfig& cfg,
                        const BoundaryFn& boundary, double T, double interval,
                        const std::function<void(const Field&)>& observer = {});

// Grid of counts[k] cells per axis with spacing dx, centred on the polytope apex
// at t = 0 (x = 0, y = frame speed offset zero).
Grid make_box(int dim, std::size_t cells, double dx, double y_center = 0);

struct MonotoneCheck {
    double min_increment = 0;  // min over window of u_{n_{k+1}} - u_{n_k}
    double sup_increment = 0;  // sup norm of the difference
    double time = 0;
    Point where{};
};

struct EntireReport {
    std::vector<double> offsets;             // start offsets n (physical time)
    std::vector<MonotoneCheck> increments;  // between consecutive offsets
    bool monotone = false;
    bool increments_decay = false;
    double min_above_lower = 0;   // min of V_hat - V_lower on the window
    double max_value = 0;         // max of V_hat
    std::size_t equal_to_lower = 0;  // interior points with V_hat == V_lower
    std::size_t equal_to_one = 0;
    double min_time_derivative = 0;  // min of discrete d_t u over the window (last run)
    double min_value_seen = 0, max_value_seen = 1;
    double seconds = 0;
    nlohmann::json to_json() const;
};

struct EntireResult {
    std::vector<Field> window;  // V_hat snapshots on [0, T]
    EntireReport report;
    double dt = 0;
};

// Monotone iteration: u_n solves the Cauchy problem from V_lower(-n) at t = -n.
// Offsets are physical start times, increasing.
EntireResult entire_solution(const Barriers& barriers, const CombustionNonlinearity& nl, const SolverConfig& cfg,
                             const Grid& box, const std::vector<double>& offsets, double T);

struct SpeedConfig {
    double dx = 0.2;
    double length = 600;
    double cfl_safety = 0.4;
    double t_final = 0;  // 0: until the level set crosses 3/4 of the domain
    double sample_every = 1.0;
    double init_height = 1.0;  // value on the left quarter
};

struct SpeedEstimate {
    double speed = 0;
    double stderr_ = 0;
    std::size_t samples = 0;
    double t_final = 0;
};

SpeedEstimate measure_speed_1d(const CombustionNonlinearity& nl, const SpeedConfig& cfg);

} // namespace cfront
