#pragma once

#include "ns2d/field.hpp"
#include "ns2d/rng.hpp"

#include <cstdint>
#include <vector>

namespace ns2d {

// Per-grid lookup of wavevectors, band mask and the phase (-1)^(n1+n2)
// that shifts the sample origin to x = -L.
struct ModeTable {
    Grid grid;
    std::vector<double> k1, k2, kk;
    std::vector<unsigned char> keep;   // inside the dealiasing band, mean mode excluded
    std::vector<double> phase;
};

const ModeTable& modes_for(const Grid& g);

PhysicalVector to_physical(const SpectralField& u);
std::vector<double> to_physical(const ScalarField& w);
SpectralField from_physical(const Grid& g, const PhysicalVector& p);
ScalarField from_physical(const Grid& g, const std::vector<double>& v);

void dealias(SpectralField& u);
void dealias(ScalarField& w);

SpectralField leray_project(const SpectralField& f);
ScalarField curl(const SpectralField& u);
// Biot-Savart: divergence-free mean-zero velocity with the given vorticity
SpectralField velocity_from_vorticity(const ScalarField& w);
SpectralField laplacian(const SpectralField& u);
ScalarField laplacian(const ScalarField& w);

// Pi (u.grad)u in divergence form, dealiased
SpectralField nonlinear_term(const SpectralField& u);
// u.grad w in divergence form, dealiased
ScalarField advect_scalar(const SpectralField& u, const ScalarField& w);
// solves -Laplace p = div((u.grad)u), zero mean
ScalarField pressure_from_velocity(const SpectralField& u);

double inner(const SpectralField& u, const SpectralField& v);
double inner(const ScalarField& a, const ScalarField& b);
double l2_norm_sq(const SpectralField& u);
double l2_norm(const SpectralField& u);
double l2_norm_sq(const ScalarField& w);
double grad_norm_sq(const SpectralField& u);
double grad_norm_sq(const ScalarField& w);
double sobolev_norm(const SpectralField& u, double s);

// cell-weighted sum over physical grid samples
double quadrature_l2_sq(const SpectralField& u);
double quadrature_l2_sq(const PhysicalVector& p, const Grid& g);

// max_k |k . uhat(k)| / max_k |uhat(k)|
double divergence_residual(const SpectralField& u);
// max_k |uhat(-k) - conj(uhat(k))|
double hermitian_defect(const SpectralField& u);
bool all_finite(const SpectralField& u);
bool all_finite(const ScalarField& w);

// Random real divergence-free in-band field with |uhat(k)| ~ (1+|k|^2)^(-decay/2).
SpectralField random_divfree_field(const Grid& g, const CounterRng& rng, Stream s,
                                   std::uint64_t index, double decay = 1.0);
// Same spectrum without the projection (general raw field).
SpectralField random_raw_field(const Grid& g, const CounterRng& rng, Stream s,
                               std::uint64_t index, double decay = 1.0);

// Physical values of u, grad u (d1u1, d2u1, d1u2, d2u2), w and grad w.
struct PhysicalState {
    std::vector<double> u1, u2;
    std::vector<double> du[4];
    std::vector<double> w, dw1, dw2;
};
PhysicalState physical_state(const SpectralField& u);

}  // namespace ns2d
