#include "ns2d/stats.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ns2d {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("normal_quantile: p outside (0, 1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe r;
    r.n = xs.size();
    if (xs.empty()) return r;
    double s = 0.0;
    for (double x : xs) s += x;
    r.mean = s / static_cast<double>(r.n);
    if (r.n > 1) {
        double v = 0.0;
        for (double x : xs) v += (x - r.mean) * (x - r.mean);
        r.sd = std::sqrt(v / static_cast<double>(r.n - 1));
        r.se = r.sd / std::sqrt(static_cast<double>(r.n));
    }
    return r;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("linear_fit: need >= 2 points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("linear_fit: degenerate abscissae");
    LinearFit f;
    f.n = x.size();
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        f.rss += r * r;
    }
    if (x.size() > 2) {
        const double s2 = f.rss / (n - 2.0);
        f.slope_se = std::sqrt(s2 / sxx);
        f.intercept_se = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    }
    return f;
}

Interval wilson_interval(std::size_t hits, std::size_t n, double z) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * nn)) / (1 + z2 / nn);
    const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / (1 + z2 / nn);
    return {hits == 0 ? 0.0 : std::max(0.0, centre - half), hits == n ? 1.0 : std::min(1.0, centre + half)};
}

double two_sample_z(const MeanSe& a, const MeanSe& b) {
    const double s = std::sqrt(a.se * a.se + b.se * b.se);
    if (s == 0.0) return a.mean == b.mean ? 0.0 : std::copysign(INFINITY, a.mean - b.mean);
    return (a.mean - b.mean) / s;
}

Interval percentile_interval(std::vector<double>& samples, double level) {
    if (samples.empty()) throw std::invalid_argument("percentile_interval: empty sample");
    std::sort(samples.begin(), samples.end());
    const double alpha = 0.5 * (1.0 - level);
    auto at = [&](double q) {
        const double pos = q * static_cast<double>(samples.size() - 1);
        const auto i = static_cast<std::size_t>(std::floor(pos));
        const std::size_t j = std::min(i + 1, samples.size() - 1);
        return samples[i] + (pos - static_cast<double>(i)) * (samples[j] - samples[i]);
    };
    return {at(alpha), at(1.0 - alpha)};
}

}  // namespace ns2d
