#pragma once

#include <cstddef>

namespace ns2d {

// Periodic box [-L, L)^2 sampled on an M x M grid.
// Spectral arrays use FFT ordering: index i <-> wavenumber n = i for i < M/2, i - M otherwise.
struct Grid {
    double L = 0.0;
    int M = 0;
    double dealias_fraction = 2.0 / 3.0;

    Grid() = default;
    Grid(double half_width, int resolution, double dealias = 2.0 / 3.0);

    double kscale() const;                // pi / L
    double dx() const { return 2.0 * L / M; }
    double volume() const { return 4.0 * L * L; }
    double cell_area() const { return dx() * dx(); }
    double x(int j) const { return -L + j * dx(); }
    std::size_t size() const { return static_cast<std::size_t>(M) * M; }

    int freq(int i) const { return i < M / 2 ? i : i - M; }
    int slot(int n) const { return n >= 0 ? n : n + M; }
    std::size_t index(int n1, int n2) const {
        return static_cast<std::size_t>(slot(n1)) * M + slot(n2);
    }

    // largest |n_i| kept by the dealiasing filter (Nyquist is always dropped)
    int band() const;
    bool in_band(int n1, int n2) const;

    bool operator==(const Grid& o) const {
        return L == o.L && M == o.M && dealias_fraction == o.dealias_fraction;
    }
};

}  // namespace ns2d
