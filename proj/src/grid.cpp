#include "ns2d/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ns2d {

Grid::Grid(double half_width, int resolution, double dealias)
    : L(half_width), M(resolution), dealias_fraction(dealias) {
    if (!(L > 0.0) || !std::isfinite(L))
        throw std::invalid_argument("Grid: half width must be positive");
    if (M < 16 || M % 2 != 0)
        throw std::invalid_argument("Grid: resolution must be even and >= 16");
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
        throw std::invalid_argument("Grid: dealias fraction must lie in (0, 1]");
}

double Grid::kscale() const { return std::numbers::pi / L; }

int Grid::band() const {
    int k = static_cast<int>(std::floor(dealias_fraction * M / 2.0 + 1e-12));
    return std::min(k, M / 2 - 1);
}

bool Grid::in_band(int n1, int n2) const {
    const int b = band();
    return std::abs(n1) <= b && std::abs(n2) <= b;
}

}  // namespace ns2d
