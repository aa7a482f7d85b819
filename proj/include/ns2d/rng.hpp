#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace ns2d {

// Philox4x32-10 block function (Salmon et al. counter-based generator).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

struct CounterExhausted : std::overflow_error {
    using std::overflow_error::overflow_error;
};

// Identifies an independent sequence: one per (trajectory, role, attempt).
struct Stream {
    std::uint32_t trajectory = 0;
    std::uint32_t role = 0;      // 8 bits used
    std::uint32_t attempt = 0;   // 24 bits used
    bool operator==(const Stream&) const = default;
};

// Stateless generator: every draw is a pure function of (seed, stream, step, index).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed = 0) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    // count standard normals for the given step; out must hold count values
    void normals(Stream s, std::uint64_t step, std::size_t count, double* out) const;
    // uniform in (0, 1)
    double uniform(Stream s, std::uint64_t step, std::uint32_t index) const;

private:
    std::array<std::uint32_t, 4> block(Stream s, std::uint64_t step, std::uint64_t blk) const;
    std::uint64_t seed_;
};

}  // namespace ns2d
