#pragma once

#include <cstdint>
#include <vector>

#include "cfront/barriers.hpp"
#include "cfront/rd_solver.hpp"
#include "json.hpp"

namespace cfront {

struct TubeFloor {
    double rho = 0;
    double k_hat = 0;  // min discrete d_t u over {ridge distance <= rho}
    std::size_t points = 0;
};

struct SandwichReport {
    double lower_violation = 0;  // max (V_lower - u)^+
    double upper_violation = 0;  // max (u - V_upper)^+
    double lower_time = 0, upper_time = 0;
    Point lower_where{}, upper_where{};
    double min_dt = 0;  // min discrete d_t u over the interior
    std::vector<TubeFloor> floors;
    std::size_t snapshots = 0;
    nlohmann::json to_json() const;
};

// traj: consecutive snapshots at a fixed interval (comoving windows allowed)
SandwichReport sandwich_and_monotonicity(const std::vector<Field>& traj, const Barriers& b,
                                         const std::vector<double>& rhos, int threads = 0);

struct MEpsRow {
    double eps = 0;
    double m = 0;  // 0 when nothing violates
    bool censored = false;
    std::size_t violators = 0;
};

struct MEpsTable {
    double time = 0;
    double max_distance = 0;  // largest interface distance on the grid
    std::vector<MEpsRow> rows;
    bool monotone = false;
    nlohmann::json to_json() const;
};

// Interface = {min_i q_i = 0}; burned side {min q < 0} must approach 1.
MEpsTable extract_interface_and_Meps(const Field& u, const FrontConfiguration& cfg, const std::vector<double>& eps,
                                     int threads = 0);

struct MeanSpeedReport {
    double gamma_hat = 0;  // intercept of d/|t-s| against 1/|t-s|
    double slope = 0;
    double rel_error = 0;
    double fit_residual = 0;
    std::size_t pairs = 0;
    std::size_t samples_per_interface = 0;
    double half_width = 0;
    std::vector<std::array<double, 3>> table;  // |t-s|, d, ratio
    bool pass = false;
    nlohmann::json to_json() const;
};

// Exact polytope interfaces at the given times, sampled over |x| <= half_width.
MeanSpeedReport mean_speed_estimate(const FrontConfiguration& cfg, const std::vector<double>& times, double half_width,
                                    double min_gap, std::size_t samples = 10000, int threads = 0);

struct LevelSetReport {
    double level = 0.5;
    double profile_offset = 0;  // U^{-1}(level)
    std::size_t points = 0;
    double max_discrepancy = 0;   // |min q - U^{-1}(level)| away from the ridge
    double mean_discrepancy = 0;
    double ridge_exclusion = 0;
    double dx = 0;
    bool within_2dx = false;
    nlohmann::json to_json() const;
};

// Half-level extraction along y-lines, compared with the exact interface
LevelSetReport level_set_discrepancy(const Field& u, const FrontConfiguration& cfg, const WaveProfile& profile,
                                     double level, double ridge_exclusion);

struct GapBin {
    double d_lo = 0, d_hi = 0;
    double sup_ratio = 0;
    std::size_t count = 0;
};

struct WeightedGapReport {
    double v = 0;
    std::vector<GapBin> bins;
    bool decreasing = false;
    double far_value = 0;
    bool pass = false;
    nlohmann::json to_json() const;
};

WeightedGapReport weighted_gap_report(const std::vector<Field>& fields, const Barriers& b, double v,
                                      std::size_t nbins = 10, int threads = 0);

struct PerturbationSpec {
    double height = -1;  // < 0: gamma_star / 2
    double radius = 0;   // 0: 3 / c_f
    bool base_vhat = true;  // false: start from V_lower(0) + bump
    double tail_amplitude = 0;
    double tail_rate = 0;
    double rho0 = 0;  // 0: radius
    std::size_t admissibility_samples = 1000;
    std::uint64_t seed = 1;
};

struct StabilityReport {
    std::vector<double> times, sup_diff, w_excess, envelope;
    double height = 0, radius = 0;
    bool admissible = false;
    double min_above_lower = 0;  // min of u0 - V_lower(0)
    double admissibility_ratio = 0;
    double initial_w_excess = 0;  // max of u0 - W(0)
    double final_diff = 0;
    bool decays = false, eventually_decreasing = false, dominated = false;
    std::size_t upticks = 0;
    double seconds = 0;
    bool pass() const { return admissible && decays && eventually_decreasing && dominated; }
    nlohmann::json to_json() const;
};

// V_hat is u_n for n = vhat_offset (started from V_lower(-n)); u and V_hat are
// stepped in lockstep on [0, T].
StabilityReport stability_run(const Barriers& b, const CombustionNonlinearity& nl, const SolverConfig& cfg,
                              const Grid& box, double vhat_offset, const PerturbationSpec& pert, double T);

struct TauContinuity {
    std::size_t facet = 0;
    double dtau = 0;
    double sup_diff = 0;
    nlohmann::json to_json() const;
};

TauContinuity tau_continuity(const FrontConfiguration& cfg, const WaveProfile& profile,
                             const CombustionNonlinearity& nl, const BarrierParams& params, const SolverConfig& sc,
                             const Grid& box, double offset, double T, double dtau = 1e-2, std::size_t facet = 0);

} // namespace cfront
