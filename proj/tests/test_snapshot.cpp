#include <filesystem>
#include <fstream>
#include <random>

#include "cfront/errors.hpp"
#include "cfront/snapshot.hpp"
#include "doctest.h"

using namespace cfront;
namespace fs = std::filesystem;

namespace {
fs::path tmpdir() {
    fs::path d = fs::temp_directory_path() / "cfront_snapshot_test";
    fs::create_directories(d);
    return d;
}

Field random_field() {
    Grid g;
    g.dim = 2;
    g.n = {64, 64, 1};
    g.dx = 0.37;
    g.origin = {-11.5, 3.25, 0};
    Field u(g, 12.75);
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> U(0, 1);
    for (double& x : u.values) x = U(rng);
    return u;
}
}

TEST_CASE("snapshot round trip is bit-identical") {
    Field u = random_field();
    auto p = (tmpdir() / "rt.cflb").string();
    write_snapshot(u, p);
    Field v = read_snapshot(p);
    CHECK(v.values == u.values);
    CHECK(v.time == u.time);
    CHECK(v.grid.dim == u.grid.dim);
    CHECK(v.grid.n == u.grid.n);
    CHECK(v.grid.dx == u.grid.dx);
    CHECK(v.grid.origin == u.grid.origin);
}

TEST_CASE("truncated snapshot is rejected") {
    Field u = random_field();
    auto p = (tmpdir() / "trunc.cflb").string();
    write_snapshot(u, p);
    fs::resize_file(p, fs::file_size(p) - 100);
    CHECK_THROWS_AS(read_snapshot(p), DomainError);
}

TEST_CASE("wrong magic names the format") {
    auto p = (tmpdir() / "magic.cflb").string();
    {
        std::ofstream os(p, std::ios::binary);
        os << "NOPE1 and some bytes that follow";
    }
    try {
        read_snapshot(p);
        FAIL("expected an error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("CFLB1") != std::string::npos);
    }
}

TEST_CASE("slice csv") {
    Field u = random_field();
    auto p = (tmpdir() / "slice.csv").string();
    write_slice_csv(u, 1, {10, 0, 0}, p);
    std::ifstream is(p);
    std::string line;
    int rows = 0;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#' && line.find(',') != std::string::npos) ++rows;
    CHECK(rows >= 64);
}
