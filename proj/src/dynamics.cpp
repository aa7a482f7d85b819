#include "ns2d/dynamics.hpp"

#include "ns2d/snapshot_io.hpp"
#include "ns2d/spectral_ops.hpp"
#include "ns2d/weights.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace ns2d {

std::string to_string(Scheme s) {
    return s == Scheme::exponential_euler ? "exponential_euler" : "semi_implicit_euler";
}

Scheme parse_scheme(const std::string& s) {
    if (s == "exponential_euler") return Scheme::exponential_euler;
    if (s == "semi_implicit_euler") return Scheme::semi_implicit_euler;
    throw std::invalid_argument("unknown scheme: " + s);
}

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("integrator: dt must be positive");
    if (!(a > 0.0)) throw std::invalid_argument("integrator: a must be positive");
    if (!(nu > 0.0)) throw std::invalid_argument("integrator: nu must be positive");
    if (!(T_horizon >= 0.0)) throw std::invalid_argument("integrator: horizon must be non-negative");
    if (record_stride < 1) throw std::invalid_argument("integrator: record stride must be >= 1");
}

std::uint64_t IntegratorConfig::steps() const {
    return static_cast<std::uint64_t>(std::llround(T_horizon / dt));
}

Dynamics::Dynamics(std::shared_ptr<const NoiseSpec> spec, IntegratorConfig cfg)
    : spec_(std::move(spec)), cfg_(cfg) {
    cfg_.validate();
    const auto& mt = modes_for(spec_->grid());
    const std::size_t n = mt.kk.size();
    R_.resize(n);
    Rexact_.resize(n);
    kk_ = mt.kk;
    for (std::size_t i = 0; i < n; ++i) {
        const double L = -cfg_.a - cfg_.nu * mt.kk[i];
        Rexact_[i] = std::exp(cfg_.dt * L);
        R_[i] = cfg_.scheme == Scheme::exponential_euler ? Rexact_[i] : 1.0 / (1.0 - cfg_.dt * L);
    }
}

SpectralField Dynamics::apply_R(SpectralField x) const {
    for (std::size_t i = 0; i < x.size(); ++i) {
        x.c1[i] *= R_[i];
        x.c2[i] *= R_[i];
    }
    return x;
}

void Dynamics::guard(const SpectralField& u, std::uint64_t step, const char* who) const {
    if (!all_finite(u)) throw BlowUpError(std::string(who) + ": non-finite state", step);
}

SpectralField Dynamics::step_primal(const SpectralField& u, const WienerIncrement& incr,
                                    std::uint64_t step) const {
    SpectralField x = u;
    x.axpy(cfg_.dt, spec_->h);
    x.axpy(-cfg_.dt, nonlinear_term(u));
    x += noise_field(*spec_, incr);
    x = apply_R(std::move(x));
    guard(x, step, "step_primal");
    return x;
}

ScalarField Dynamics::step_vorticity(const ScalarField& w, const SpectralField& u,
                                     const WienerIncrement& incr, std::uint64_t step) const {
    const ScalarField ch = curl(spec_->h);
    const ScalarField cn = curl(noise_field(*spec_, incr));
    const ScalarField adv = advect_scalar(u, w);
    ScalarField out(w.grid);
    for (std::size_t i = 0; i < w.coeffs.size(); ++i)
        out.coeffs[i] = R_[i] * (w.coeffs[i] + cfg_.dt * (ch.coeffs[i] - adv.coeffs[i]) + cn.coeffs[i]);
    if (!all_finite(out)) throw BlowUpError("step_vorticity: non-finite state", step);
    return out;
}

SpectralField Dynamics::control_drift(const SpectralField& u, const SpectralField& v,
                                      std::size_t N) const {
    SpectralField d = nonlinear_term(u);
    d -= nonlinear_term(v);
    d.axpy(-cfg_.nu, laplacian(u - v));
    SpectralField p = basis().low_mode_project(d, N);
    p *= -1.0;
    return p;
}

SpectralField Dynamics::controlled_shift(const SpectralField& u, std::size_t N) const {
    SpectralField d = laplacian(u);
    d *= cfg_.nu;
    d -= nonlinear_term(u);
    return basis().low_mode_project(d, N);
}

SpectralField Dynamics::step_auxiliary_v(const SpectralField& v, const SpectralField& u,
                                         const WienerIncrement& incr, std::size_t N,
                                         std::uint64_t step) const {
    SpectralField x = v;
    x.axpy(cfg_.dt, spec_->h);
    x.axpy(-cfg_.dt, nonlinear_term(v));
    if (N > 0) x.axpy(cfg_.dt, control_drift(u, v, N));
    x += noise_field(*spec_, incr);
    x = apply_R(std::move(x));
    guard(x, step, "step_auxiliary_v");
    return x;
}

SpectralField Dynamics::step_controlled(const SpectralField& xin, const WienerIncrement& shifted,
                                        std::size_t N, std::uint64_t step) const {
    SpectralField x = xin;
    x.axpy(cfg_.dt, spec_->h);
    x.axpy(-cfg_.dt, basis().high_mode_project(nonlinear_term(xin), N));
    if (N > 0) x.axpy(-cfg_.dt * cfg_.nu, basis().low_mode_project(laplacian(xin), N));
    x += noise_field(*spec_, shifted);
    x = apply_R(std::move(x));
    guard(x, step, "step_controlled");
    return x;
}

SpectralField Dynamics::step_linear_truncation(const SpectralField& z) const {
    SpectralField x = z;
    for (std::size_t i = 0; i < x.size(); ++i) {
        x.c1[i] *= Rexact_[i];
        x.c2[i] *= Rexact_[i];
    }
    return x;
}

SpectralField Dynamics::step_difference_g(const SpectralField& g, const SpectralField& u,
                                          const SpectralField& v, std::size_t N,
                                          std::uint64_t step) const {
    SpectralField low = basis().low_mode_project(g, N);
    SpectralField high = g;
    high -= low;
    SpectralField dn = nonlinear_term(u);
    dn -= nonlinear_term(v);
    high.axpy(-cfg_.dt, basis().high_mode_project(dn, N));
    SpectralField out = apply_R(std::move(high));
    out.axpy(std::exp(-cfg_.a * cfg_.dt), low);
    guard(out, step, "step_difference_g");
    return out;
}

WeightedNorms weighted_norms(const SpectralField& u, double t) {
    const Grid& g = u.grid;
    const PhysicalState st = physical_state(u);
    WeightedNorms out;
    for (int a = 0; a < g.M; ++a) {
        for (int b = 0; b < g.M; ++b) {
            const std::size_t i = static_cast<std::size_t>(a) * g.M + b;
            const double p = psi_r(t, std::hypot(g.x(a), g.x(b)));
            const double p2 = p * p;
            out.psi_u += p2 * (st.u1[i] * st.u1[i] + st.u2[i] * st.u2[i]);
            double gu = 0.0;
            for (const auto& d : st.du) gu += d[i] * d[i];
            out.psi_grad_u += p2 * gu;
            out.psi_w += p2 * st.w[i] * st.w[i];
            out.psi_grad_w += p2 * (st.dw1[i] * st.dw1[i] + st.dw2[i] * st.dw2[i]);
        }
    }
    const double c = g.cell_area();
    out.psi_u *= c;
    out.psi_grad_u *= c;
    out.psi_w *= c;
    out.psi_grad_w *= c;
    return out;
}

TrajectoryRow trajectory_row(double t, const SpectralField& u) {
    const WeightedNorms wn = weighted_norms(u, t);
    const ScalarField w = curl(u);
    return {t,
            l2_norm(u),
            sobolev_norm(u, 1.0),
            l2_norm_sq(w),
            std::sqrt(wn.psi_u),
            std::sqrt(wn.psi_grad_u),
            std::sqrt(wn.psi_w),
            std::sqrt(wn.psi_grad_w)};
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path);
    os << "t,L2,H1,enstrophy,psiL2,psiGrad,psiVortL2,psiVortGrad\n" << std::setprecision(17);
    for (const auto& r : rows)
        os << r.t << ',' << r.L2 << ',' << r.H1 << ',' << r.enstrophy << ',' << r.psiL2 << ','
           << r.psiGrad << ',' << r.psiVortL2 << ',' << r.psiVortGrad << '\n';
    if (!os) throw IoError("write failed for " + path);
}

}  // namespace ns2d
