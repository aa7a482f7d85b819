#include "ns2d/snapshot_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace ns2d {

namespace {
constexpr char kMagic[8] = {'N', 'S', '2', 'D', 'F', 'L', 'D', '\0'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, T v) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    os.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <class T>
T get(std::istream& is) {
    unsigned char b[sizeof(T)];
    if (!is.read(reinterpret_cast<char*>(b), sizeof(T))) throw IoError("snapshot: truncated file");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
    T v;
    std::memcpy(&v, b, sizeof(T));
    return v;
}
}  // namespace

void write_snapshot(const std::string& path, const SpectralField& u) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("snapshot: cannot open " + path);
    const Grid& g = u.grid;
    os.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(os, kVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(g.M));
    put<double>(os, g.L);
    for (const auto* comp : {&u.c1, &u.c2}) {
        for (int n1 = -g.M / 2; n1 < g.M / 2; ++n1) {
            for (int n2 = -g.M / 2; n2 < g.M / 2; ++n2) {
                const cplx c = (*comp)[g.index(n1, n2)];
                put<double>(os, c.real());
                put<double>(os, c.imag());
            }
        }
    }
    if (!os) throw IoError("snapshot: write failed for " + path);
}

SpectralField read_snapshot(const std::string& path, double dealias_fraction) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("snapshot: cannot open " + path);
    char magic[8];
    if (!is.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw IoError("snapshot: bad magic in " + path);
    if (get<std::uint32_t>(is) != kVersion) throw IoError("snapshot: unsupported version");
    const auto M = get<std::uint32_t>(is);
    const double L = get<double>(is);
    Grid g;
    try {
        g = Grid(L, static_cast<int>(M), dealias_fraction);
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("snapshot: invalid header: ") + e.what());
    }
    SpectralField u(g);
    for (auto* comp : {&u.c1, &u.c2}) {
        for (int n1 = -g.M / 2; n1 < g.M / 2; ++n1) {
            for (int n2 = -g.M / 2; n2 < g.M / 2; ++n2) {
                const double re = get<double>(is);
                const double im = get<double>(is);
                (*comp)[g.index(n1, n2)] = cplx(re, im);
            }
        }
    }
    return u;
}

}  // namespace ns2d
