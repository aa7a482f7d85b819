#include "ns2d/field.hpp"

#include <algorithm>
#include <stdexcept>

namespace ns2d {

namespace {
void check_same(const SpectralField& a, const SpectralField& b) {
    if (a.size() != b.size()) throw std::invalid_argument("SpectralField: grid mismatch");
}
}  // namespace

void SpectralField::set_zero() {
    std::fill(c1.begin(), c1.end(), cplx{});
    std::fill(c2.begin(), c2.end(), cplx{});
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    check_same(*this, o);
    for (std::size_t i = 0; i < c1.size(); ++i) {
        c1[i] += o.c1[i];
        c2[i] += o.c2[i];
    }
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    check_same(*this, o);
    for (std::size_t i = 0; i < c1.size(); ++i) {
        c1[i] -= o.c1[i];
        c2[i] -= o.c2[i];
    }
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (std::size_t i = 0; i < c1.size(); ++i) {
        c1[i] *= s;
        c2[i] *= s;
    }
    return *this;
}

SpectralField& SpectralField::axpy(double s, const SpectralField& o) {
    check_same(*this, o);
    for (std::size_t i = 0; i < c1.size(); ++i) {
        c1[i] += s * o.c1[i];
        c2[i] += s * o.c2[i];
    }
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

}  // namespace ns2d
