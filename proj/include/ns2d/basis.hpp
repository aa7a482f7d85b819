#pragma once

#include "ns2d/field.hpp"

#include <vector>

namespace ns2d {

// Real orthonormal divergence-free Fourier basis of the dealiased band:
//   e = c kperp cos(k.x)  or  e = c kperp sin(k.x),  c = sqrt(2)/(2L), kperp = (-k2, k1)/|k|,
// one representative per +-k pair (n1 > 0, or n1 == 0 and n2 > 0), ordered by |n|^2,
// then (n1, n2) lexicographically, sin before cos.
class DivFreeBasis {
public:
    struct Element {
        int n1, n2;
        bool is_sin;
        double kk;          // |k|^2
        double p1, p2;      // unit kperp
        std::size_t idx, idx_neg;
    };

    explicit DivFreeBasis(const Grid& g);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return elems_.size(); }
    const Element& element(std::size_t j) const { return elems_[j]; }  // zero-based
    double h1_norm_sq(std::size_t j) const { return 1.0 + elems_[j].kk; }

    SpectralField field(std::size_t j) const;
    // <u, e_j> for j < count
    std::vector<double> coords(const SpectralField& u, std::size_t count) const;
    double coord(const SpectralField& u, std::size_t j) const;
    // sum_j c[j] e_j
    SpectralField synthesize(const std::vector<double>& c) const;
    void add_element(SpectralField& u, std::size_t j, double coef) const;

    // P_N and Q_N = I - P_N on divergence-free in-band fields
    SpectralField low_mode_project(const SpectralField& u, std::size_t N) const;
    SpectralField high_mode_project(const SpectralField& u, std::size_t N) const;

private:
    Grid grid_;
    double c_;
    std::vector<Element> elems_;
};

}  // namespace ns2d
