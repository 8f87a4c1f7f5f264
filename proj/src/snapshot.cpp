#include "cfront/snapshot.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>

#include "cfront/errors.hpp"

namespace cfront {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

namespace {

constexpr char kMagic[5] = {'C', 'F', 'L', 'B', '1'};

template <class T>
void put(std::ofstream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& is, const std::string& path) {
    T v;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v))
        throw DomainError("snapshot " + path + ": truncated header (CFLB1 format)");
    return v;
}

} // namespace

void write_snapshot(const Field& u, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DomainError("snapshot: cannot open " + path + " for writing");
    os.write(kMagic, 5);
    put<std::uint32_t>(os, kSnapshotVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(u.grid.dim));
    for (int k = 0; k < u.grid.dim; ++k) put<std::uint64_t>(os, u.grid.n[k]);
    put<double>(os, u.grid.dx);
    put<double>(os, u.time);
    for (int k = 0; k < u.grid.dim; ++k) put<double>(os, u.grid.origin[k]);
    os.write(reinterpret_cast<const char*>(u.values.data()),
             static_cast<std::streamsize>(u.values.size() * sizeof(double)));
    if (!os) throw DomainError("snapshot: write failed for " + path);
}

Field read_snapshot(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DomainError("snapshot: cannot open " + path);
    char magic[5];
    if (!is.read(magic, 5) || std::memcmp(magic, kMagic, 5) != 0)
        throw DomainError("snapshot " + path + ": bad magic, expected CFLB1");
    auto version = get<std::uint32_t>(is, path);
    if (version != kSnapshotVersion)
        throw DomainError("snapshot " + path + ": CFLB1 version " + std::to_string(version) + ", expected " +
                          std::to_string(kSnapshotVersion));
    Grid g;
    g.dim = static_cast<int>(get<std::uint32_t>(is, path));
    if (g.dim < 1 || g.dim > 3) throw DomainError("snapshot " + path + ": dimension out of range");
    for (int k = 0; k < g.dim; ++k) g.n[k] = get<std::uint64_t>(is, path);
    g.dx = get<double>(is, path);
    double t = get<double>(is, path);
    for (int k = 0; k < g.dim; ++k) g.origin[k] = get<double>(is, path);
    Field u(g, t);
    if (!is.read(reinterpret_cast<char*>(u.values.data()),
                 static_cast<std::streamsize>(u.values.size() * sizeof(double))))
        throw DomainError("snapshot " + path + ": truncated data (CFLB1 format)");
    if (is.peek() != std::ifstream::traits_type::eof())
        throw DomainError("snapshot " + path + ": trailing bytes after data");
    return u;
}

void write_slice_csv(const Field& u, int axis, const std::array<std::size_t, 3>& through, const std::string& path) {
    const Grid& g = u.grid;
    if (axis < 0 || axis >= g.dim) throw ValidationError("slice axis out of range");
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open " + path);
    os << std::setprecision(17) << "# t=" << u.time << " axis=" << axis << "\ncoord,u\n";
    std::size_t base = 0;
    for (int k = 0; k < g.dim; ++k)
        if (k != axis) base += std::min(through[k], g.n[k] - 1) * g.stride(k);
    for (std::size_t m = 0; m < g.n[axis]; ++m) {
        std::size_t i = base + m * g.stride(axis);
        os << g.origin[axis] + g.dx * static_cast<double>(m) << ',' << u.values[i] << '\n';
    }
}

} // namespace cfront
