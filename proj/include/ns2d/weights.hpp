#pragma once

#include "ns2d/field.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ns2d {

using Point = std::array<double, 2>;

double phi(const Point& x);
double phi_r(double r);
// phi (1 - exp(-t/phi))
double psi(double t, const Point& x);
double psi_r(double t, double r);
double t_wedge_phi(double t, const Point& x);

struct Weight {
    enum class Kind { constant, phi, psi, t_wedge_phi };
    Kind kind = Kind::phi;
    double t = 0.0;

    static Weight constant_one() { return {Kind::constant, 0.0}; }
    static Weight phi_weight() { return {Kind::phi, 0.0}; }
    static Weight psi_at(double t) { return {Kind::psi, t}; }
    static Weight wedge(double t) { return {Kind::t_wedge_phi, t}; }

    double radial(double r) const;
    double operator()(const Point& x) const;
    // |x| where the weight has a kink, if any
    std::optional<double> kink_radius() const;
    std::string name() const;
};

struct BallIntegrals {
    double w = 0.0;       // integral of w over the ball
    double w_inv = 0.0;   // integral of 1/w
};

// Polar quadrature about the ball center: composite Gauss-Legendre in r
// (split where a ray crosses the weight's kink circle), midpoint in angle.
BallIntegrals ball_integrals(const Weight& w, const Point& x0, double R, int n_radial = 512,
                             int n_angular = 256);

double a2_ball_ratio(const Weight& w, const Point& x0, double R, int quadrature_n = 512);

struct Ball {
    Point x0;
    double R;
    bool type_one() const;   // |x0| >= 3R
};

struct BallFamily {
    std::vector<Ball> balls;
    // log-spaced radii on [r_min, r_max], centers on rays at |x0|/R in the given set
    static BallFamily stratified(int n_radii = 50, double r_min = 1e-2, double r_max = 1e3,
                                 const std::vector<double>& offsets = {0.0, 1.0, 3.0, 10.0},
                                 int n_directions = 1);
};

struct A2Estimate {
    double value = 0.0;
    std::size_t argmax = 0;
    std::vector<double> ratios;
};

A2Estimate a2_characteristic_estimate(const Weight& w, const BallFamily& family,
                                      int quadrature_n = 512);

// Exact integrals of (t wedge phi)^(-1) and (t wedge phi) over B(0, R); t >= 2.
struct ClosedForm {
    double I_minus = 0.0;
    double I_plus = 0.0;
    bool large_branch = false;   // R >= sqrt(t^2 - 1)
};
ClosedForm closed_form_integrals(double t, double R);

double g_function(double R);
// Bound for type-I balls: (t wedge phi at 4|x0|/3) / (t wedge phi at 2|x0|/3)
double type_one_bound(double t, double x0_norm);
// max(2, sup G, sup over t of the type-I bound); sup G = 4/3 approached at infinity
double assembled_a2_bound();

// Sweep rows (t, R, x0_norm, ratio, branch)
struct SweepRow {
    double t, R, x0_norm, ratio;
    std::string branch;
};
std::vector<SweepRow> weight_sweep(const std::vector<double>& ts, const BallFamily& family,
                                   int quadrature_n = 512);
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);

// Values of psi(t, .) on the physical grid.
std::vector<double> psi_on_grid(const Grid& g, double t);

// max over the ensemble of ||psi Pi f|| / ||psi f|| on the torus
double weighted_leray_probe(const Grid& g, double t, int ensemble, std::uint64_t seed = 1);

struct SecondDerivativeProbe {
    double lhs = 0.0;   // ||psi grad^2 u||
    double rhs = 0.0;   // ||grad u|| + ||psi grad w||
};
SecondDerivativeProbe weighted_second_derivative_probe(const SpectralField& u, double t);

}  // namespace ns2d
