#pragma once

#include "ns2d/fft.hpp"
#include "ns2d/grid.hpp"

#include <vector>

namespace ns2d {

// Fourier-series coefficients of a real vector field: u(x) = sum_k uhat(k) exp(i k.x).
struct SpectralField {
    Grid grid;
    std::vector<cplx> c1, c2;

    SpectralField() = default;
    explicit SpectralField(const Grid& g) : grid(g), c1(g.size()), c2(g.size()) {}

    std::size_t size() const { return c1.size(); }
    void set_zero();

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);
    // this += s * o
    SpectralField& axpy(double s, const SpectralField& o);
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

// Scalar field stored by its Fourier coefficients (vorticity, pressure).
struct ScalarField {
    Grid grid;
    std::vector<cplx> coeffs;

    ScalarField() = default;
    explicit ScalarField(const Grid& g) : grid(g), coeffs(g.size()) {}
};

// Point values on the physical grid, row-major with x1 the slow index.
struct PhysicalVector {
    std::vector<double> u1, u2;
};

}  // namespace ns2d
