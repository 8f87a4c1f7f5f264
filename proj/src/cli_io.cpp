#include "cfront/cli_io.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "cfront/errors.hpp"

namespace cfront {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& msg) {
    throw ValidationError(field + ": " + msg);
}

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) bad(where, "expected an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) bad(where + "." + it.key(), "unknown field");
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) bad(where, "expected a number");
    double v = j.get<double>();
    if (!std::isfinite(v)) bad(where, "must be finite");
    return v;
}

double number_or(const json& obj, const char* key, const std::string& where, double fallback) {
    return obj.contains(key) ? number(obj[key], where + "." + key) : fallback;
}

std::optional<double> auto_or_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) return std::nullopt;
    const json& v = obj[key];
    if (v.is_string()) {
        if (v.get<std::string>() == "auto") return std::nullopt;
        bad(where + "." + key, "expected a number or \"auto\"");
    }
    return number(v, where + "." + key);
}

} // namespace

double RunConfig::exp_number(const std::string& key, double fallback) const {
    if (!experiment.contains(key)) return fallback;
    return number(experiment[key], "experiment." + key);
}

RunConfig parse_run_config(const json& j) {
    if (!j.is_object() || j.empty()) bad("config", "empty or not an object");
    only_keys(j, "config", {"nonlinearity", "front", "barrier", "solver", "experiment"});
    RunConfig rc;
    rc.source = j;

    if (!j.contains("nonlinearity")) bad("nonlinearity", "missing block");
    const json& nb = j["nonlinearity"];
    only_keys(nb, "nonlinearity", {"theta", "a", "p", "sigma"});
    for (const char* k : {"theta", "a", "p", "sigma"})
        if (!nb.contains(k)) bad(std::string("nonlinearity.") + k, "missing");
    rc.theta = number(nb["theta"], "nonlinearity.theta");
    rc.amplitude = number(nb["a"], "nonlinearity.a");
    rc.exponent = number(nb["p"], "nonlinearity.p");
    rc.sigma = number(nb["sigma"], "nonlinearity.sigma");
    try {
        (void)make_combustion(rc.theta, rc.amplitude, rc.exponent, rc.sigma);
    } catch (const ValidationError& e) {
        bad("nonlinearity", e.what());
    }

    if (!j.contains("front")) bad("front", "missing block");
    const json& fb = j["front"];
    only_keys(fb, "front", {"N", "facets", "symmetric"});
    if (!fb.contains("N") || !fb["N"].is_number_integer()) bad("front.N", "expected an integer");
    rc.dimension = fb["N"].get<int>();
    if (rc.dimension < 1 || rc.dimension > 3) bad("front.N", "must be 1, 2 or 3");
    if (fb.contains("facets") == fb.contains("symmetric")) bad("front", "give exactly one of facets or symmetric");
    if (fb.contains("symmetric")) {
        const json& s = fb["symmetric"];
        only_keys(s, "front.symmetric", {"count", "angle"});
        if (!s.contains("count") || !s["count"].is_number_integer() || s["count"].get<long>() < 1)
            bad("front.symmetric.count", "expected a positive integer");
        rc.symmetric_count = s["count"].get<std::size_t>();
        if (!s.contains("angle")) bad("front.symmetric.angle", "missing");
        rc.symmetric_angle = number(s["angle"], "front.symmetric.angle");
    } else {
        const json& fs_ = fb["facets"];
        if (!fs_.is_array() || fs_.empty()) bad("front.facets", "expected a non-empty array");
        for (std::size_t i = 0; i < fs_.size(); ++i) {
            std::string w = "front.facets[" + std::to_string(i) + "]";
            only_keys(fs_[i], w, {"nu", "angle", "tau"});
            Facet f;
            if (!fs_[i].contains("nu") || !fs_[i]["nu"].is_array()) bad(w + ".nu", "expected an array");
            for (std::size_t k = 0; k < fs_[i]["nu"].size(); ++k)
                f.nu.push_back(number(fs_[i]["nu"][k], w + ".nu[" + std::to_string(k) + "]"));
            if (!fs_[i].contains("angle")) bad(w + ".angle", "missing");
            f.angle = number(fs_[i]["angle"], w + ".angle");
            f.shift = number_or(fs_[i], "tau", w, 0.0);
            rc.facets.push_back(f);
        }
    }
    // geometry is validated against a unit speed here, the real one comes later
    try {
        if (rc.facets.empty())
            (void)FrontConfiguration::symmetric(rc.dimension, rc.symmetric_count, rc.symmetric_angle, 1.0);
        else
            (void)FrontConfiguration(rc.dimension, rc.facets, 1.0);
    } catch (const ValidationError& e) {
        bad("front", e.what());
    }

    if (j.contains("barrier")) {
        const json& bb = j["barrier"];
        if (bb.is_string()) {
            if (bb.get<std::string>() != "auto") bad("barrier", "expected an object or \"auto\"");
        } else {
            only_keys(bb, "barrier", {"epsilon", "alpha", "beta", "delta", "lambda", "varrho"});
            rc.barrier.epsilon = auto_or_number(bb, "epsilon", "barrier");
            rc.barrier.alpha = auto_or_number(bb, "alpha", "barrier");
            rc.barrier.beta = auto_or_number(bb, "beta", "barrier");
            rc.barrier.delta = auto_or_number(bb, "delta", "barrier");
            rc.barrier.lambda = auto_or_number(bb, "lambda", "barrier");
            rc.barrier.varrho = auto_or_number(bb, "varrho", "barrier");
            if (rc.barrier.alpha && !(*rc.barrier.alpha > 0)) bad("barrier.alpha", "must be positive");
            if (rc.barrier.beta && !(*rc.barrier.beta > 0 && *rc.barrier.beta <= 1))
                bad("barrier.beta", "must lie in (0, 1]");
            for (auto [name, v] : {std::pair{"epsilon", rc.barrier.epsilon}, {"delta", rc.barrier.delta},
                                   {"lambda", rc.barrier.lambda}, {"varrho", rc.barrier.varrho}})
                if (v && !(*v >= 0)) bad(std::string("barrier.") + name, "must be >= 0");
        }
    }

    if (j.contains("solver")) {
        const json& sb = j["solver"];
        only_keys(sb, "solver",
                  {"units", "dx", "dt", "scheme", "boundary", "cfl_safety", "cells", "T", "snapshot_interval",
                   "offsets", "comoving", "y_center"});
        SolverBlock& s = rc.solver;
        if (sb.contains("units")) {
            if (!sb["units"].is_string()) bad("solver.units", "expected \"cf\" or \"absolute\"");
            std::string u = sb["units"];
            if (u != "cf" && u != "absolute") bad("solver.units", "expected \"cf\" or \"absolute\"");
            s.scaled = u == "cf";
        }
        s.dx = number_or(sb, "dx", "solver", s.dx);
        if (!(s.dx > 0)) bad("solver.dx", "must be positive");
        if (sb.contains("dt")) {
            if (sb["dt"].is_string()) {
                if (sb["dt"].get<std::string>() != "cfl") bad("solver.dt", "expected a number or \"cfl\"");
            } else {
                s.dt = number(sb["dt"], "solver.dt");
                if (!(*s.dt > 0)) bad("solver.dt", "must be positive");
            }
        }
        try {
            if (sb.contains("scheme")) s.scheme = parse_scheme(sb["scheme"].get<std::string>());
            if (sb.contains("boundary")) s.boundary = parse_boundary(sb["boundary"].get<std::string>());
        } catch (const json::exception&) {
            bad("solver", "scheme and boundary must be strings");
        }
        s.cfl_safety = number_or(sb, "cfl_safety", "solver", s.cfl_safety);
        if (!(s.cfl_safety > 0 && s.cfl_safety < 1)) bad("solver.cfl_safety", "must lie in (0, 1)");
        if (sb.contains("cells")) {
            if (!sb["cells"].is_number_integer() || sb["cells"].get<long>() < 16)
                bad("solver.cells", "expected an integer >= 16");
            s.cells = sb["cells"].get<std::size_t>();
        }
        s.T = number_or(sb, "T", "solver", s.T);
        if (!(s.T > 0)) bad("solver.T", "must be positive");
        s.snapshot_interval = number_or(sb, "snapshot_interval", "solver", s.snapshot_interval);
        if (!(s.snapshot_interval > 0)) bad("solver.snapshot_interval", "must be positive");
        if (sb.contains("offsets")) {
            if (!sb["offsets"].is_array() || sb["offsets"].empty()) bad("solver.offsets", "expected a non-empty array");
            s.offsets.clear();
            for (std::size_t k = 0; k < sb["offsets"].size(); ++k)
                s.offsets.push_back(number(sb["offsets"][k], "solver.offsets[" + std::to_string(k) + "]"));
            for (std::size_t k = 0; k < s.offsets.size(); ++k)
                if (!(s.offsets[k] >= 0) || (k && !(s.offsets[k] > s.offsets[k - 1])))
                    bad("solver.offsets", "must be nonnegative and increasing");
        }
        if (sb.contains("comoving")) {
            if (!sb["comoving"].is_boolean()) bad("solver.comoving", "expected a boolean");
            s.comoving = sb["comoving"];
        }
        s.y_center = number_or(sb, "y_center", "solver", s.y_center);
    }

    if (j.contains("experiment")) {
        if (!j["experiment"].is_object()) bad("experiment", "expected an object");
        rc.experiment = j["experiment"];
    }
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("config: cannot open " + path);
    json j;
    try {
        is >> j;
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config: not valid JSON: ") + e.what());
    }
    return parse_run_config(j);
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr))
        throw NumericalError("sha256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

std::string sha256_file(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    if (!is) throw DomainError("cannot read " + p.string());
    std::ostringstream buf;
    buf << is.rdbuf();
    return sha256_hex(buf.str());
}

std::string config_hash(const json& j) { return sha256_hex(j.dump()); }

RunDirectory::RunDirectory(const fs::path& out, const std::string& subcommand, const std::string& hash) {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream name;
    name << subcommand << '-' << hash.substr(0, 12) << '-' << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
    fs::path base = out / name.str();
    dir_ = base;
    for (int k = 1; fs::exists(dir_); ++k) dir_ = base.string() + "-" + std::to_string(k);
    fs::create_directories(dir_);
}

fs::path RunDirectory::file(const std::string& name) {
    files_.push_back(name);
    return dir_ / name;
}

void RunDirectory::write_json(const std::string& name, const json& j) {
    std::ofstream os(file(name));
    os << j.dump(2) << '\n';
}

void RunDirectory::write_manifest(const json& meta) {
    json m = meta;
    json arts = json::array();
    for (const auto& f : files_) {
        fs::path p = dir_ / f;
        if (!fs::exists(p)) continue;
        arts.push_back({{"path", f}, {"bytes", fs::file_size(p)}, {"sha256", sha256_file(p)}});
    }
    m["artifacts"] = arts;
    std::ofstream os(dir_ / "manifest.json");
    os << m.dump(2) << '\n';
}

bool verify_manifest(const fs::path& dir, std::string* why) {
    auto fail = [&](const std::string& s) {
        if (why) *why = s;
        return false;
    };
    std::ifstream is(dir / "manifest.json");
    if (!is) return fail("manifest.json missing");
    json m;
    try {
        is >> m;
    } catch (const json::exception& e) {
        return fail(std::string("manifest unreadable: ") + e.what());
    }
    for (const auto& a : m.value("artifacts", json::array())) {
        fs::path p = dir / a["path"].get<std::string>();
        if (!fs::exists(p)) return fail("missing artifact " + p.string());
        if (fs::file_size(p) != a["bytes"].get<std::uintmax_t>()) return fail("size mismatch for " + p.string());
        if (sha256_file(p) != a["sha256"].get<std::string>()) return fail("checksum mismatch for " + p.string());
    }
    return true;
}

Setup build_setup(const RunConfig& rc, const SetupOptions& opt) {
    auto nl = make_combustion(rc.theta, rc.amplitude, rc.exponent, rc.sigma);
    double c = find_wave_speed(nl);
    auto profile = build_profile(nl, c);
    auto front = rc.facets.empty()
                     ? FrontConfiguration::symmetric(rc.dimension, rc.symmetric_count, rc.symmetric_angle, c)
                     : FrontConfiguration(rc.dimension, rc.facets, c);
    Setup s{.nl = nl, .speed = c, .profile = profile, .front = front, .schedule = {}, .params = {}, .v_star = 0,
            .unit = 1, .solver = {}, .box = {}};
    s.unit = rc.solver.scaled ? 1 / c : 1.0;

    if (opt.barriers) {
        const BarrierOverrides& o = rc.barrier;
        SampleSpec spec;
        spec.count = opt.validation_samples;
        spec.seed = opt.seed;
        spec.threads = opt.threads;
        bool all_fixed = o.epsilon && o.alpha && o.beta && o.delta && o.lambda && o.varrho;
        if (all_fixed) {
            s.params = {*o.epsilon, *o.alpha, *o.beta, *o.delta, *o.lambda, *o.varrho};
        } else {
            s.schedule = auto_schedule(front, profile, nl, spec, o);
            s.params = s.schedule->params;
        }
        // gradient constant of the surface, as in the schedule's own report
        double c1 = s.schedule ? s.schedule->constants.c1_hat
                               : fit_surface_constants(front, spec.box, 20000, spec.seed, opt.threads).c1_hat;
        s.v_star = v_star_schedule(Barriers(front, profile, nl, s.params), c1);
    }

    const SolverBlock& sb = rc.solver;
    s.solver.scheme = sb.scheme;
    s.solver.boundary = sb.boundary;
    s.solver.cfl_safety = sb.cfl_safety;
    s.solver.snapshot_interval = sb.snapshot_interval * s.unit;
    if (sb.dt) s.solver.dt = *sb.dt * s.unit;
    s.solver.threads = opt.threads;
    if (sb.comoving && rc.dimension >= 2) {
        // the ridge moves along y at c / sin(theta); use the slowest facet
        double smin = 1;
        for (std::size_t i = 0; i < front.size(); ++i) smin = std::min(smin, front.sin_angle(i));
        s.solver.frame_speed = front.size() >= 2 ? c / smin : c / front.sin_angle(0);
    }
    s.box = make_box(rc.dimension, sb.cells, sb.dx * s.unit, sb.y_center * s.unit);
    return s;
}

} // namespace cfront
