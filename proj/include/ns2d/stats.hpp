#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace ns2d {

double normal_cdf(double x);
double normal_quantile(double p);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    double sd = 0.0;
    std::size_t n = 0;
};
MeanSe mean_se(const std::vector<double>& xs);

struct LinearFit {
    double slope = 0.0, intercept = 0.0;
    double slope_se = 0.0, intercept_se = 0.0;
    double rss = 0.0;
    std::size_t n = 0;
};
// ordinary least squares y = intercept + slope * x; needs >= 2 distinct x
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

struct Interval {
    double lo = 0.0, hi = 0.0;
};
Interval wilson_interval(std::size_t hits, std::size_t n, double z = 1.959963984540054);

// Two-sample z statistic for a difference of means.
double two_sample_z(const MeanSe& a, const MeanSe& b);

// Percentile interval of a bootstrap sample (sorted in place).
Interval percentile_interval(std::vector<double>& samples, double level = 0.95);

}  // namespace ns2d
