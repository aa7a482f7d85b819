#include "ns2d/basis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ns2d {

DivFreeBasis::DivFreeBasis(const Grid& g) : grid_(g), c_(std::sqrt(2.0) / (2.0 * g.L)) {
    const int b = g.band();
    const double ks = g.kscale();
    for (int n1 = 0; n1 <= b; ++n1) {
        for (int n2 = -b; n2 <= b; ++n2) {
            if (n1 == 0 && n2 <= 0) continue;
            const double k1 = ks * n1, k2 = ks * n2;
            const double kk = k1 * k1 + k2 * k2;
            const double km = std::sqrt(kk);
            for (bool s : {true, false})
                elems_.push_back({n1, n2, s, kk, -k2 / km, k1 / km, g.index(n1, n2), g.index(-n1, -n2)});
        }
    }
    std::stable_sort(elems_.begin(), elems_.end(), [](const Element& a, const Element& b) {
        const int ma = a.n1 * a.n1 + a.n2 * a.n2, mb = b.n1 * b.n1 + b.n2 * b.n2;
        if (ma != mb) return ma < mb;
        if (a.n1 != b.n1) return a.n1 < b.n1;
        if (a.n2 != b.n2) return a.n2 < b.n2;
        return a.is_sin && !b.is_sin;
    });
}

void DivFreeBasis::add_element(SpectralField& u, std::size_t j, double coef) const {
    const Element& e = elems_[j];
    const double h = 0.5 * c_ * coef;
    const cplx f = e.is_sin ? cplx(0.0, -h) : cplx(h, 0.0);
    u.c1[e.idx] += f * e.p1;
    u.c2[e.idx] += f * e.p2;
    u.c1[e.idx_neg] += std::conj(f) * e.p1;
    u.c2[e.idx_neg] += std::conj(f) * e.p2;
}

SpectralField DivFreeBasis::field(std::size_t j) const {
    if (j >= elems_.size()) throw std::out_of_range("DivFreeBasis: index out of range");
    SpectralField u(grid_);
    add_element(u, j, 1.0);
    return u;
}

double DivFreeBasis::coord(const SpectralField& u, std::size_t j) const {
    const Element& e = elems_[j];
    const cplx alpha = e.p1 * u.c1[e.idx] + e.p2 * u.c2[e.idx];
    const double s = grid_.volume() * c_;
    return e.is_sin ? -s * alpha.imag() : s * alpha.real();
}

std::vector<double> DivFreeBasis::coords(const SpectralField& u, std::size_t count) const {
    if (count > elems_.size()) throw std::out_of_range("DivFreeBasis: count exceeds basis size");
    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j) out[j] = coord(u, j);
    return out;
}

SpectralField DivFreeBasis::synthesize(const std::vector<double>& c) const {
    if (c.size() > elems_.size()) throw std::out_of_range("DivFreeBasis: too many coefficients");
    SpectralField u(grid_);
    for (std::size_t j = 0; j < c.size(); ++j)
        if (c[j] != 0.0) add_element(u, j, c[j]);
    return u;
}

SpectralField DivFreeBasis::low_mode_project(const SpectralField& u, std::size_t N) const {
    if (N > elems_.size()) throw std::out_of_range("low_mode_project: N exceeds basis size");
    return synthesize(coords(u, N));
}

SpectralField DivFreeBasis::high_mode_project(const SpectralField& u, std::size_t N) const {
    SpectralField out = u;
    out -= low_mode_project(u, N);
    return out;
}

}  // namespace ns2d
