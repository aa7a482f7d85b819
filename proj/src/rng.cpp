#include "ns2d/rng.hpp"

#include <cmath>
#include <numbers>

namespace ns2d {

namespace {
constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// (0,1) with 53 random bits
inline double to_unit(std::uint32_t a, std::uint32_t b) {
    const std::uint64_t v = ((static_cast<std::uint64_t>(a) << 32) | b) >> 11;
    return (static_cast<double>(v) + 0.5) * 0x1.0p-53;
}
}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
    for (int r = 0; r < 10; ++r) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kM0, c[0], hi0, lo0);
        mulhilo(kM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kW0;
        k[1] += kW1;
    }
    return c;
}

std::array<std::uint32_t, 4> CounterRng::block(Stream s, std::uint64_t step,
                                               std::uint64_t blk) const {
    if (step > 0xFFFFFFFFull || blk > 0xFFFFFFFFull || s.role > 0xFFu || s.attempt > 0xFFFFFFu)
        throw CounterExhausted("CounterRng: counter space exhausted");
    const std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(blk),
                                           static_cast<std::uint32_t>(step),
                                           (s.role << 24) | s.attempt, s.trajectory};
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                           static_cast<std::uint32_t>(seed_ >> 32)};
    return philox4x32(ctr, key);
}

void CounterRng::normals(Stream s, std::uint64_t step, std::size_t count, double* out) const {
    for (std::size_t i = 0; i < count; i += 2) {
        const auto b = block(s, step, i / 2);
        const double u1 = to_unit(b[0], b[1]);
        const double u2 = to_unit(b[2], b[3]);
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * std::numbers::pi * u2;
        out[i] = r * std::cos(th);
        if (i + 1 < count) out[i + 1] = r * std::sin(th);
    }
}

double CounterRng::uniform(Stream s, std::uint64_t step, std::uint32_t index) const {
    const auto b = block(s, step, index);
    return to_unit(b[0], b[1]);
}

}  // namespace ns2d
