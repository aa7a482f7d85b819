#include "ns2d/mixing.hpp"
#include "ns2d/spectral_ops.hpp"
#include "ns2d/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace ns2d;

TEST_CASE("normal distribution helpers") {
    CHECK(normal_cdf(0.0) == 0.5);
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
    for (double p : {1e-6, 0.1, 0.5, 0.9}) CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
}

TEST_CASE("mean, standard error and two-sample z") {
    const MeanSe m = mean_se({1, 2, 3, 4});
    CHECK(m.mean == 2.5);
    CHECK(m.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(m.n == 4);
    CHECK(two_sample_z(m, m) == 0.0);
    const MeanSe a{1.0, 0.3, 0, 10}, b{0.0, 0.4, 0, 10};
    CHECK(two_sample_z(a, b) == doctest::Approx(2.0));
}

TEST_CASE("linear fit recovers exact lines") {
    const LinearFit f = linear_fit({0, 1, 2, 3}, {1, 3, 5, 7});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.rss < 1e-24);
    CHECK_THROWS(linear_fit({1, 1}, {0, 1}));
    CHECK_THROWS(linear_fit({1, 2}, {0}));
}

TEST_CASE("Wilson and percentile intervals") {
    const Interval w0 = wilson_interval(0, 50);
    CHECK(w0.lo == 0.0);
    CHECK(w0.hi > 0.0);
    const Interval w1 = wilson_interval(50, 50);
    CHECK(w1.hi == doctest::Approx(1.0));
    CHECK(w1.lo < 1.0);
    const Interval w = wilson_interval(20, 100);
    CHECK(w.lo < 0.2);
    CHECK(w.hi > 0.2);
    std::vector<double> s;
    for (int i = 1; i <= 1000; ++i) s.push_back(1001 - i);
    const Interval p = percentile_interval(s, 0.9);
    CHECK(p.lo == doctest::Approx(50).epsilon(0.02));
    CHECK(p.hi == doctest::Approx(950).epsilon(0.02));
}

TEST_CASE("observable dictionary") {
    const DivFreeBasis b(Grid(M_PI, 16));
    const ObservableDictionary d = ObservableDictionary::standard(b, 3, {2}, 4.0);
    REQUIRE(d.size() == 4);
    const SpectralField z(b.grid());
    for (double v : d.evaluate(z)) CHECK(v == 0.0);
    SpectralField u(b.grid());
    b.add_element(u, 1, 0.5);
    const auto v = d.evaluate(u);
    CHECK(v[0] == doctest::Approx(0.0));
    CHECK(v[1] == doctest::Approx(std::tanh(0.5)));
    CHECK(v[3] == doctest::Approx(0.25 / 4.0));
    b.add_element(u, 0, 10.0);
    CHECK(d.evaluate(u)[3] == doctest::Approx(4.0 / 4.0));
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(d[i].lipschitz <= 1.0);
}

TEST_CASE("dual-Lipschitz estimate on trivial samples") {
    const ObservableSamples a(50, std::vector<double>{0.1, 0.2});
    const DualLipschitzEstimate same = estimate_dual_lipschitz(a, a);
    CHECK(same.value == 0.0);
    CHECK(same.se == 0.0);
    ObservableSamples b = a;
    for (auto& row : b) row[1] = 0.7;
    const DualLipschitzEstimate e = estimate_dual_lipschitz(a, b);
    CHECK(e.value == doctest::Approx(0.5));
    CHECK(e.argmax == 1);
    CHECK(e.diffs[0] == 0.0);
    CHECK_THROWS(estimate_dual_lipschitz(ObservableSamples{}, a));
}

TEST_CASE("mixing fits recover exact power and exponential laws") {
    const std::vector<double> t{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    std::vector<double> pw, ex;
    for (double x : t) {
        pw.push_back(2.0 * std::pow(1 + x, -1.5));
        ex.push_back(0.8 * std::exp(-0.7 * x));
    }
    const MixingFit fp = fit_mixing_rate(t, pw, {}, 200);
    CHECK(fp.q_hat == doctest::Approx(1.5).epsilon(1e-10));
    CHECK(fp.log_C == doctest::Approx(std::log(2.0)).epsilon(1e-10));
    CHECK(fp.n_used == 6);
    CHECK(fp.power_preferred());
    const MixingFit fe = fit_mixing_rate(t, ex, {}, 200);
    CHECK(fe.exp_rate == doctest::Approx(0.7).epsilon(1e-10));
    CHECK_FALSE(fe.power_preferred());
}

TEST_CASE("mixing fit censoring") {
    const std::vector<double> t{0.5, 1.0, 1.5, 2.0, 2.5};
    const std::vector<double> D{1.0, 0.5, 0.25, 0.01, -0.02};
    const std::vector<double> se{0.01, 0.01, 0.01, 0.01, 0.01};
    const MixingFit f = fit_mixing_rate(t, D, se, 100);
    CHECK(f.censored == std::vector<bool>{false, false, false, true, true});
    CHECK(f.n_used == 3);
    CHECK_THROWS(fit_mixing_rate({1, 2, 3}, {1, 1, 1}));
    CHECK_THROWS(fit_mixing_rate(t, {1, 0.01, 0.01, 0.01, 0.01}, se));
}
