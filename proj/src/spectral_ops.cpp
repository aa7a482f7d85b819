#include "ns2d/spectral_ops.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace ns2d {

namespace {
const cplx I{0.0, 1.0};

void check_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw std::invalid_argument("grid mismatch");
}

// spectral -> physical for one component (phase-shifted inverse DFT)
void spec_to_phys(const ModeTable& mt, const std::vector<cplx>& in, std::vector<double>& out) {
    const std::size_t n = in.size();
    std::vector<cplx> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = in[i] * mt.phase[i];
    fft_for(mt.grid.M).backward(a.data(), b.data());
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = b[i].real();
}

void phys_to_spec(const ModeTable& mt, const std::vector<double>& in, std::vector<cplx>& out) {
    const std::size_t n = in.size();
    std::vector<cplx> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = cplx(in[i], 0.0);
    out.resize(n);
    fft_for(mt.grid.M).forward(a.data(), out.data());
    const double s = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] *= s * mt.phase[i];
}

double sum_sq(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& c : v) s += std::norm(c);
    return s;
}
}  // namespace

const ModeTable& modes_for(const Grid& g) {
    static std::map<std::tuple<double, int, double>, std::unique_ptr<ModeTable>> cache;
    static std::mutex m;
    std::lock_guard<std::mutex> lock(m);
    auto key = std::make_tuple(g.L, g.M, g.dealias_fraction);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    auto mt = std::make_unique<ModeTable>();
    mt->grid = g;
    const std::size_t n = g.size();
    mt->k1.resize(n);
    mt->k2.resize(n);
    mt->kk.resize(n);
    mt->keep.resize(n);
    mt->phase.resize(n);
    const double ks = g.kscale();
    for (int i1 = 0; i1 < g.M; ++i1) {
        for (int i2 = 0; i2 < g.M; ++i2) {
            const int n1 = g.freq(i1), n2 = g.freq(i2);
            const std::size_t i = static_cast<std::size_t>(i1) * g.M + i2;
            mt->k1[i] = ks * n1;
            mt->k2[i] = ks * n2;
            mt->kk[i] = mt->k1[i] * mt->k1[i] + mt->k2[i] * mt->k2[i];
            mt->keep[i] = g.in_band(n1, n2) && (n1 != 0 || n2 != 0);
            mt->phase[i] = ((n1 + n2) % 2 == 0) ? 1.0 : -1.0;
        }
    }
    return *cache.emplace(key, std::move(mt)).first->second;
}

PhysicalVector to_physical(const SpectralField& u) {
    const auto& mt = modes_for(u.grid);
    PhysicalVector p;
    spec_to_phys(mt, u.c1, p.u1);
    spec_to_phys(mt, u.c2, p.u2);
    return p;
}

std::vector<double> to_physical(const ScalarField& w) {
    std::vector<double> out;
    spec_to_phys(modes_for(w.grid), w.coeffs, out);
    return out;
}

SpectralField from_physical(const Grid& g, const PhysicalVector& p) {
    if (p.u1.size() != g.size() || p.u2.size() != g.size())
        throw std::invalid_argument("from_physical: size mismatch");
    const auto& mt = modes_for(g);
    SpectralField u(g);
    phys_to_spec(mt, p.u1, u.c1);
    phys_to_spec(mt, p.u2, u.c2);
    return u;
}

ScalarField from_physical(const Grid& g, const std::vector<double>& v) {
    if (v.size() != g.size()) throw std::invalid_argument("from_physical: size mismatch");
    ScalarField w(g);
    phys_to_spec(modes_for(g), v, w.coeffs);
    return w;
}

void dealias(SpectralField& u) {
    const auto& mt = modes_for(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!mt.keep[i]) {
            u.c1[i] = 0.0;
            u.c2[i] = 0.0;
        }
    }
}

void dealias(ScalarField& w) {
    const auto& mt = modes_for(w.grid);
    for (std::size_t i = 0; i < w.coeffs.size(); ++i)
        if (!mt.keep[i]) w.coeffs[i] = 0.0;
}

SpectralField leray_project(const SpectralField& f) {
    const auto& mt = modes_for(f.grid);
    SpectralField out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (mt.kk[i] == 0.0) continue;
        const cplx kd = (mt.k1[i] * f.c1[i] + mt.k2[i] * f.c2[i]) / mt.kk[i];
        out.c1[i] = f.c1[i] - mt.k1[i] * kd;
        out.c2[i] = f.c2[i] - mt.k2[i] * kd;
    }
    return out;
}

ScalarField curl(const SpectralField& u) {
    const auto& mt = modes_for(u.grid);
    ScalarField w(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i)
        w.coeffs[i] = I * (mt.k1[i] * u.c2[i] - mt.k2[i] * u.c1[i]);
    return w;
}

SpectralField velocity_from_vorticity(const ScalarField& w) {
    const auto& mt = modes_for(w.grid);
    SpectralField u(w.grid);
    for (std::size_t i = 0; i < w.coeffs.size(); ++i) {
        if (mt.kk[i] == 0.0) continue;
        const cplx s = I * w.coeffs[i] / mt.kk[i];
        u.c1[i] = mt.k2[i] * s;
        u.c2[i] = -mt.k1[i] * s;
    }
    return u;
}

SpectralField laplacian(const SpectralField& u) {
    const auto& mt = modes_for(u.grid);
    SpectralField out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        out.c1[i] = -mt.kk[i] * u.c1[i];
        out.c2[i] = -mt.kk[i] * u.c2[i];
    }
    return out;
}

ScalarField laplacian(const ScalarField& w) {
    const auto& mt = modes_for(w.grid);
    ScalarField out(w.grid);
    for (std::size_t i = 0; i < w.coeffs.size(); ++i) out.coeffs[i] = -mt.kk[i] * w.coeffs[i];
    return out;
}

namespace {
struct Products {
    std::vector<cplx> f11, f12, f22;
};

Products velocity_products(const SpectralField& u) {
    const auto& mt = modes_for(u.grid);
    const PhysicalVector p = to_physical(u);
    const std::size_t n = u.size();
    std::vector<double> q11(n), q12(n), q22(n);
    for (std::size_t i = 0; i < n; ++i) {
        q11[i] = p.u1[i] * p.u1[i];
        q12[i] = p.u1[i] * p.u2[i];
        q22[i] = p.u2[i] * p.u2[i];
    }
    Products f;
    phys_to_spec(mt, q11, f.f11);
    phys_to_spec(mt, q12, f.f12);
    phys_to_spec(mt, q22, f.f22);
    return f;
}
}  // namespace

SpectralField nonlinear_term(const SpectralField& u) {
    const auto& mt = modes_for(u.grid);
    const Products f = velocity_products(u);
    SpectralField out(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!mt.keep[i]) continue;
        const cplx n1 = I * (mt.k1[i] * f.f11[i] + mt.k2[i] * f.f12[i]);
        const cplx n2 = I * (mt.k1[i] * f.f12[i] + mt.k2[i] * f.f22[i]);
        const cplx kd = (mt.k1[i] * n1 + mt.k2[i] * n2) / mt.kk[i];
        out.c1[i] = n1 - mt.k1[i] * kd;
        out.c2[i] = n2 - mt.k2[i] * kd;
    }
    return out;
}

ScalarField advect_scalar(const SpectralField& u, const ScalarField& w) {
    check_grid(u.grid, w.grid);
    const auto& mt = modes_for(u.grid);
    const PhysicalVector p = to_physical(u);
    const std::vector<double> wp = to_physical(w);
    const std::size_t n = u.size();
    std::vector<double> q1(n), q2(n);
    for (std::size_t i = 0; i < n; ++i) {
        q1[i] = p.u1[i] * wp[i];
        q2[i] = p.u2[i] * wp[i];
    }
    std::vector<cplx> f1, f2;
    phys_to_spec(mt, q1, f1);
    phys_to_spec(mt, q2, f2);
    ScalarField out(u.grid);
    for (std::size_t i = 0; i < n; ++i)
        if (mt.keep[i]) out.coeffs[i] = I * (mt.k1[i] * f1[i] + mt.k2[i] * f2[i]);
    return out;
}

ScalarField pressure_from_velocity(const SpectralField& u) {
    const auto& mt = modes_for(u.grid);
    const Products f = velocity_products(u);
    ScalarField p(u.grid);
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!mt.keep[i]) continue;
        const double a = mt.k1[i], b = mt.k2[i];
        p.coeffs[i] = -(a * a * f.f11[i] + 2.0 * a * b * f.f12[i] + b * b * f.f22[i]) / mt.kk[i];
    }
    return p;
}

double inner(const SpectralField& u, const SpectralField& v) {
    check_grid(u.grid, v.grid);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += (u.c1[i] * std::conj(v.c1[i])).real() + (u.c2[i] * std::conj(v.c2[i])).real();
    return u.grid.volume() * s;
}

double inner(const ScalarField& a, const ScalarField& b) {
    check_grid(a.grid, b.grid);
    double s = 0.0;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i)
        s += (a.coeffs[i] * std::conj(b.coeffs[i])).real();
    return a.grid.volume() * s;
}

double l2_norm_sq(const SpectralField& u) { return u.grid.volume() * (sum_sq(u.c1) + sum_sq(u.c2)); }
double l2_norm(const SpectralField& u) { return std::sqrt(l2_norm_sq(u)); }
double l2_norm_sq(const ScalarField& w) { return w.grid.volume() * sum_sq(w.coeffs); }

double grad_norm_sq(const SpectralField& u) {
    const auto& mt = modes_for(u.grid);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        s += mt.kk[i] * (std::norm(u.c1[i]) + std::norm(u.c2[i]));
    return u.grid.volume() * s;
}

double grad_norm_sq(const ScalarField& w) {
    const auto& mt = modes_for(w.grid);
    double s = 0.0;
    for (std::size_t i = 0; i < w.coeffs.size(); ++i) s += mt.kk[i] * std::norm(w.coeffs[i]);
    return w.grid.volume() * s;
}

double sobolev_norm(const SpectralField& u, double s) {
    if (!std::isfinite(s)) throw std::invalid_argument("sobolev_norm: non-finite order");
    const auto& mt = modes_for(u.grid);
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double m = std::norm(u.c1[i]) + std::norm(u.c2[i]);
        if (m == 0.0) continue;
        acc += std::pow(1.0 + mt.kk[i], s) * m;
    }
    return std::sqrt(u.grid.volume() * acc);
}

double quadrature_l2_sq(const PhysicalVector& p, const Grid& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.u1.size(); ++i) s += p.u1[i] * p.u1[i] + p.u2[i] * p.u2[i];
    return g.cell_area() * s;
}

double quadrature_l2_sq(const SpectralField& u) { return quadrature_l2_sq(to_physical(u), u.grid); }

double divergence_residual(const SpectralField& u) {
    const auto& mt = modes_for(u.grid);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        num = std::max(num, std::abs(mt.k1[i] * u.c1[i] + mt.k2[i] * u.c2[i]));
        den = std::max({den, std::abs(u.c1[i]), std::abs(u.c2[i])});
    }
    return den > 0.0 ? num / den : 0.0;
}

double hermitian_defect(const SpectralField& u) {
    const Grid& g = u.grid;
    double d = 0.0;
    for (int i1 = 0; i1 < g.M; ++i1) {
        for (int i2 = 0; i2 < g.M; ++i2) {
            const int n1 = g.freq(i1), n2 = g.freq(i2);
            if (n1 == -g.M / 2 || n2 == -g.M / 2) continue;
            const std::size_t a = g.index(n1, n2), b = g.index(-n1, -n2);
            d = std::max({d, std::abs(u.c1[b] - std::conj(u.c1[a])),
                          std::abs(u.c2[b] - std::conj(u.c2[a]))});
        }
    }
    return d;
}

bool all_finite(const SpectralField& u) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (!std::isfinite(u.c1[i].real()) || !std::isfinite(u.c1[i].imag()) ||
            !std::isfinite(u.c2[i].real()) || !std::isfinite(u.c2[i].imag()))
            return false;
    }
    return true;
}

bool all_finite(const ScalarField& w) {
    for (const auto& c : w.coeffs)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

SpectralField random_raw_field(const Grid& g, const CounterRng& rng, Stream s,
                               std::uint64_t index, double decay) {
    const auto& mt = modes_for(g);
    SpectralField u(g);
    const int b = g.band();
    const int side = 2 * b + 1;
    std::vector<double> z(static_cast<std::size_t>(side) * side * 4);
    rng.normals(s, index, z.size(), z.data());
    std::size_t q = 0;
    for (int n1 = -b; n1 <= b; ++n1) {
        for (int n2 = -b; n2 <= b; ++n2, q += 4) {
            if (n1 < 0 || (n1 == 0 && n2 <= 0)) continue;
            const std::size_t i = g.index(n1, n2), j = g.index(-n1, -n2);
            const double amp = std::pow(1.0 + mt.kk[i], -0.5 * decay);
            const cplx a1(amp * z[q], amp * z[q + 1]);
            const cplx a2(amp * z[q + 2], amp * z[q + 3]);
            u.c1[i] = a1;
            u.c2[i] = a2;
            u.c1[j] = std::conj(a1);
            u.c2[j] = std::conj(a2);
        }
    }
    return u;
}

SpectralField random_divfree_field(const Grid& g, const CounterRng& rng, Stream s,
                                   std::uint64_t index, double decay) {
    return leray_project(random_raw_field(g, rng, s, index, decay));
}

PhysicalState physical_state(const SpectralField& u) {
    const auto& mt = modes_for(u.grid);
    PhysicalState st;
    spec_to_phys(mt, u.c1, st.u1);
    spec_to_phys(mt, u.c2, st.u2);
    const std::size_t n = u.size();
    std::vector<cplx> t(n);
    const std::vector<cplx>* comp[2] = {&u.c1, &u.c2};
    const std::vector<double>* kv[2] = {&mt.k1, &mt.k2};
    for (int c = 0; c < 2; ++c) {
        for (int d = 0; d < 2; ++d) {
            for (std::size_t i = 0; i < n; ++i) t[i] = I * (*kv[d])[i] * (*comp[c])[i];
            spec_to_phys(mt, t, st.du[2 * c + d]);
        }
    }
    const ScalarField w = curl(u);
    spec_to_phys(mt, w.coeffs, st.w);
    for (std::size_t i = 0; i < n; ++i) t[i] = I * mt.k1[i] * w.coeffs[i];
    spec_to_phys(mt, t, st.dw1);
    for (std::size_t i = 0; i < n; ++i) t[i] = I * mt.k2[i] * w.coeffs[i];
    spec_to_phys(mt, t, st.dw2);
    return st;
}

}  // namespace ns2d
