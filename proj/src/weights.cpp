#include "ns2d/weights.hpp"

#include "ns2d/snapshot_io.hpp"
#include "ns2d/spectral_ops.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <stdexcept>

namespace ns2d {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr int kOrder = 16;
using Gauss = boost::math::quadrature::gauss<double, kOrder>;

// sqrt(1+x) - 1 without cancellation
double sqrt1pm1(double x) { return x / (std::sqrt(1.0 + x) + 1.0); }
}  // namespace

double phi_r(double r) { return std::sqrt(r * r + 1.0); }
double phi(const Point& x) { return phi_r(std::hypot(x[0], x[1])); }

double psi_r(double t, double r) {
    const double p = phi_r(r);
    return -p * std::expm1(-t / p);
}
double psi(double t, const Point& x) { return psi_r(t, std::hypot(x[0], x[1])); }
double t_wedge_phi(double t, const Point& x) { return std::min(t, phi(x)); }

double Weight::radial(double r) const {
    switch (kind) {
        case Kind::constant: return 1.0;
        case Kind::phi: return phi_r(r);
        case Kind::psi: return psi_r(t, r);
        case Kind::t_wedge_phi: return std::min(t, phi_r(r));
    }
    return 1.0;
}

double Weight::operator()(const Point& x) const { return radial(std::hypot(x[0], x[1])); }

std::optional<double> Weight::kink_radius() const {
    if (kind == Kind::t_wedge_phi && t > 1.0) return std::sqrt(t * t - 1.0);
    return std::nullopt;
}

std::string Weight::name() const {
    switch (kind) {
        case Kind::constant: return "constant";
        case Kind::phi: return "phi";
        case Kind::psi: return "psi";
        case Kind::t_wedge_phi: return "t_wedge_phi";
    }
    return "?";
}

BallIntegrals ball_integrals(const Weight& w, const Point& x0, double R, int n_radial,
                             int n_angular) {
    if (!(R > 0.0)) throw std::invalid_argument("ball_integrals: radius must be positive");
    const int panels_total = std::max(1, n_radial / kOrder);
    const auto kink = w.kink_radius();
    const double x0n2 = x0[0] * x0[0] + x0[1] * x0[1];
    BallIntegrals out;
    const double dth = 2.0 * kPi / n_angular;
    for (int j = 0; j < n_angular; ++j) {
        const double th = (j + 0.5) * dth;
        const double ex = std::cos(th), ey = std::sin(th);
        std::vector<double> cuts{0.0};
        if (kink) {
            const double b = x0[0] * ex + x0[1] * ey;
            const double c = x0n2 - (*kink) * (*kink);
            const double disc = b * b - c;
            if (disc > 0.0) {
                const double sq = std::sqrt(disc);
                for (double r : {-b - sq, -b + sq})
                    if (r > 0.0 && r < R) cuts.push_back(r);
            }
        }
        cuts.push_back(R);
        std::sort(cuts.begin(), cuts.end());
        auto fw = [&](double r) { return w({x0[0] + r * ex, x0[1] + r * ey}) * r; };
        auto fi = [&](double r) { return r / w({x0[0] + r * ex, x0[1] + r * ey}); };
        for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
            const double a = cuts[s], b = cuts[s + 1];
            if (b <= a) continue;
            const int p = std::max(1, static_cast<int>(std::lround(panels_total * (b - a) / R)));
            const double h = (b - a) / p;
            for (int q = 0; q < p; ++q) {
                out.w += Gauss::integrate(fw, a + q * h, a + (q + 1) * h) * dth;
                out.w_inv += Gauss::integrate(fi, a + q * h, a + (q + 1) * h) * dth;
            }
        }
    }
    return out;
}

double a2_ball_ratio(const Weight& w, const Point& x0, double R, int quadrature_n) {
    if (quadrature_n < 64) throw std::invalid_argument("a2_ball_ratio: quadrature_n must be >= 64");
    const BallIntegrals bi = ball_integrals(w, x0, R, quadrature_n, std::max(64, quadrature_n / 2));
    const double area = kPi * R * R;
    const double r = (bi.w / area) * (bi.w_inv / area);
    if (!std::isfinite(r)) throw std::runtime_error("a2_ball_ratio: non-finite quadrature");
    return r;
}

bool Ball::type_one() const { return std::hypot(x0[0], x0[1]) >= 3.0 * R; }

BallFamily BallFamily::stratified(int n_radii, double r_min, double r_max,
                                  const std::vector<double>& offsets, int n_directions) {
    if (n_radii < 1 || !(r_min > 0.0) || !(r_max >= r_min) || n_directions < 1)
        throw std::invalid_argument("BallFamily: bad parameters");
    BallFamily f;
    for (int i = 0; i < n_radii; ++i) {
        const double R = n_radii == 1 ? r_min
                                      : r_min * std::pow(r_max / r_min, double(i) / (n_radii - 1));
        for (double o : offsets) {
            for (int d = 0; d < (o == 0.0 ? 1 : n_directions); ++d) {
                const double a = 0.5 * kPi * d / n_directions;
                f.balls.push_back({{o * R * std::cos(a), o * R * std::sin(a)}, R});
            }
        }
    }
    return f;
}

A2Estimate a2_characteristic_estimate(const Weight& w, const BallFamily& family, int quadrature_n) {
    if (family.balls.empty()) throw std::invalid_argument("a2_characteristic_estimate: empty family");
    A2Estimate est;
    est.ratios.reserve(family.balls.size());
    for (std::size_t i = 0; i < family.balls.size(); ++i) {
        const Ball& b = family.balls[i];
        const double r = a2_ball_ratio(w, b.x0, b.R, quadrature_n);
        est.ratios.push_back(r);
        if (i == 0 || r > est.value) {
            est.value = r;
            est.argmax = i;
        }
    }
    return est;
}

ClosedForm closed_form_integrals(double t, double R) {
    if (!(t >= 2.0) || !(R > 0.0)) throw std::invalid_argument("closed_form_integrals: need t >= 2, R > 0");
    ClosedForm c;
    c.large_branch = R >= std::sqrt(t * t - 1.0);
    if (c.large_branch) {
        c.I_minus = kPi / t * (R * R + (t - 1.0) * (t - 1.0));
        c.I_plus = 2.0 * kPi * (-t * t * t / 6.0 + t / 2.0 - 1.0 / 3.0 + t * R * R / 2.0);
    } else {
        const double R2 = R * R;
        c.I_minus = 2.0 * kPi * sqrt1pm1(R2);
        c.I_plus = 2.0 * kPi / 3.0 * std::expm1(1.5 * std::log1p(R2));
    }
    return c;
}

double g_function(double R) {
    if (!(R > 0.0)) throw std::invalid_argument("g_function: R must be positive");
    const double R2 = R * R;
    const double a = sqrt1pm1(R2);
    const double b = std::expm1(1.5 * std::log1p(R2));
    return 4.0 / 3.0 * (a / R2) * (b / R2);
}

double type_one_bound(double t, double x0_norm) {
    const double hi = std::sqrt(1.0 + std::pow(4.0 * x0_norm / 3.0, 2));
    const double lo = std::sqrt(1.0 + std::pow(2.0 * x0_norm / 3.0, 2));
    return std::min(t, hi) / std::min(t, lo);
}

double assembled_a2_bound() { return 2.0; }

std::vector<SweepRow> weight_sweep(const std::vector<double>& ts, const BallFamily& family,
                                   int quadrature_n) {
    std::vector<SweepRow> rows;
    for (double t : ts) {
        const Weight w = Weight::psi_at(t);
        for (const Ball& b : family.balls) {
            const double xn = std::hypot(b.x0[0], b.x0[1]);
            std::string branch;
            if (xn == 0.0)
                branch = b.R >= std::sqrt(t * t - 1.0) ? "central_large" : "central_small";
            else
                branch = b.type_one() ? "type_I" : "type_II";
            rows.push_back({t, b.R, xn, a2_ball_ratio(w, b.x0, b.R, quadrature_n), branch});
        }
    }
    return rows;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path);
    os << "t,R,x0_norm,ratio,branch\n" << std::setprecision(17);
    for (const auto& r : rows)
        os << r.t << ',' << r.R << ',' << r.x0_norm << ',' << r.ratio << ',' << r.branch << '\n';
    if (!os) throw IoError("write failed for " + path);
}

std::vector<double> psi_on_grid(const Grid& g, double t) {
    std::vector<double> out(g.size());
    for (int i = 0; i < g.M; ++i)
        for (int j = 0; j < g.M; ++j)
            out[static_cast<std::size_t>(i) * g.M + j] = psi_r(t, std::hypot(g.x(i), g.x(j)));
    return out;
}

namespace {
double weighted_sq(const std::vector<double>& wgt, const std::vector<double>& a,
                   const std::vector<double>& b, double cell) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += wgt[i] * wgt[i] * (a[i] * a[i] + b[i] * b[i]);
    return s * cell;
}
}  // namespace

double weighted_leray_probe(const Grid& g, double t, int ensemble, std::uint64_t seed) {
    if (ensemble < 1) throw std::invalid_argument("weighted_leray_probe: empty ensemble");
    const auto wgt = psi_on_grid(g, t);
    CounterRng rng(seed);
    double best = 0.0;
    for (int e = 0; e < ensemble; ++e) {
        const SpectralField f = random_raw_field(g, rng, Stream{0, 1, 0}, e);
        const PhysicalVector pf = to_physical(f);
        const PhysicalVector pp = to_physical(leray_project(f));
        const double den = weighted_sq(wgt, pf.u1, pf.u2, g.cell_area());
        if (den == 0.0) throw std::invalid_argument("weighted_leray_probe: zero field");
        best = std::max(best, std::sqrt(weighted_sq(wgt, pp.u1, pp.u2, g.cell_area()) / den));
    }
    return best;
}

SecondDerivativeProbe weighted_second_derivative_probe(const SpectralField& u, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("weighted_second_derivative_probe: t must be positive");
    const Grid& g = u.grid;
    const auto& mt = modes_for(g);
    const auto wgt = psi_on_grid(g, t);
    double lhs = 0.0;
    const std::vector<cplx>* comp[2] = {&u.c1, &u.c2};
    const std::vector<double>* kv[2] = {&mt.k1, &mt.k2};
    ScalarField tmp(g);
    for (int c = 0; c < 2; ++c) {
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                for (std::size_t i = 0; i < g.size(); ++i)
                    tmp.coeffs[i] = -(*kv[a])[i] * (*kv[b])[i] * (*comp[c])[i];
                const auto p = to_physical(tmp);
                for (std::size_t i = 0; i < g.size(); ++i) lhs += wgt[i] * wgt[i] * p[i] * p[i];
            }
        }
    }
    const PhysicalState st = physical_state(u);
    const double grad_w = weighted_sq(wgt, st.dw1, st.dw2, g.cell_area());
    return {std::sqrt(lhs * g.cell_area()), std::sqrt(grad_norm_sq(u)) + std::sqrt(grad_w)};
}

}  // namespace ns2d
