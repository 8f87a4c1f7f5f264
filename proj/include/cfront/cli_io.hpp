#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cfront/barriers.hpp"
#include "cfront/rd_solver.hpp"
#include "json.hpp"

namespace cfront {

// Lengths and times in the solver and experiment blocks are in units of
// 1/c_f unless "units": "absolute".
struct SolverBlock {
    bool scaled = true;
    double dx = 0.1;
    std::optional<double> dt;  // empty = "cfl"
    Scheme scheme = Scheme::Euler;
    BoundaryPolicy boundary = BoundaryPolicy::Lower;
    double cfl_safety = 0.4;
    std::size_t cells = 512;
    double T = 12;
    double snapshot_interval = 0.25;
    std::vector<double> offsets{2, 4, 8, 16};
    bool comoving = true;
    double y_center = 0;
};

struct RunConfig {
    nlohmann::json source;  // as read, used for the hash
    double theta = 0.3, amplitude = 1, exponent = 2, sigma = 0.1;
    int dimension = 2;
    std::vector<Facet> facets;  // empty when symmetric
    std::size_t symmetric_count = 0;
    double symmetric_angle = 0;
    BarrierOverrides barrier;  // unset = "auto"
    SolverBlock solver;
    nlohmann::json experiment = nlohmann::json::object();

    // experiment.<key>, or fallback
    double exp_number(const std::string& key, double fallback) const;
};

inline const std::vector<std::string> kSubcommands = {"profile", "simulate", "surface", "barriers-validate",
                                                      "entire",  "verify",   "speed",   "stability"};

// ValidationError naming the offending field on any problem
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& p);
// canonical (key-sorted) dump of the config, hashed
std::string config_hash(const nlohmann::json& j);

class RunDirectory {
public:
    RunDirectory(const std::filesystem::path& out, const std::string& subcommand, const std::string& hash);
    const std::filesystem::path& path() const { return dir_; }
    // path for an artifact; recorded in the manifest on write_manifest
    std::filesystem::path file(const std::string& name);
    void write_json(const std::string& name, const nlohmann::json& j);
    void write_manifest(const nlohmann::json& meta);

private:
    std::filesystem::path dir_;
    std::vector<std::string> files_;
};

// re-read every manifest entry and compare sizes and checksums
bool verify_manifest(const std::filesystem::path& dir, std::string* why = nullptr);

// Everything derived from a config before any experiment runs.
struct Setup {
    CombustionNonlinearity nl;
    double speed = 0;
    WaveProfile profile;
    FrontConfiguration front;
    std::optional<Schedule> schedule;  // present when any barrier field was auto
    BarrierParams params;
    double v_star = 0;
    double unit = 1;  // physical size of one config length unit
    SolverConfig solver;
    Grid box;
};

struct SetupOptions {
    bool barriers = true;
    std::size_t validation_samples = 100000;
    std::uint64_t seed = 1;
    int threads = 0;
};

Setup build_setup(const RunConfig& rc, const SetupOptions& opt);

} // namespace cfront
