#pragma once

#include <string>

#include "cfront/rd_solver.hpp"

namespace cfront {

// Binary snapshot: "CFLB1", u32 version, u32 N, N x u64 counts, f64 dx, f64 t,
// N x f64 origin, then row-major f64 values. Little-endian.
inline constexpr std::uint32_t kSnapshotVersion = 1;

void write_snapshot(const Field& u, const std::string& path);
Field read_snapshot(const std::string& path);

// one line of cells along `axis` through the cell `through`, as "coord,u" CSV
void write_slice_csv(const Field& u, int axis, const std::array<std::size_t, 3>& through, const std::string& path);

} // namespace cfront
