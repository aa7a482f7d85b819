#include "ns2d/noise.hpp"

#include "ns2d/spectral_ops.hpp"

#include <json.hpp>

#include <cmath>
#include <stdexcept>

namespace ns2d {

std::string serialize(const NoiseConfig& c) {
    nlohmann::ordered_json j;
    j["J"] = c.J;
    j["s"] = c.s;
    j["b0"] = c.b0;
    j["N_active"] = c.N_active;
    j["seed"] = c.seed;
    j["h_coeffs"] = c.h_coeffs;
    j["relaxed_h"] = c.relaxed_h;
    return j.dump(2);
}

NoiseConfig parse_noise_config(const std::string& text) {
    NoiseConfig c;
    try {
        const auto j = nlohmann::json::parse(text);
        c.J = j.at("J").get<std::size_t>();
        c.s = j.at("s").get<double>();
        c.b0 = j.at("b0").get<double>();
        c.N_active = j.at("N_active").get<std::size_t>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.h_coeffs = j.value("h_coeffs", std::vector<double>{});
        c.relaxed_h = j.value("relaxed_h", false);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("noise config: ") + e.what());
    }
    return c;
}

double phi_weighted_norm_sq(const DivFreeBasis& basis, std::size_t j) {
    const Grid& g = basis.grid();
    const auto& e = basis.element(j);
    const double k1 = g.kscale() * e.n1, k2 = g.kscale() * e.n2;
    double sv = 0.0, sc = 0.0;
    for (int a = 0; a < g.M; ++a) {
        for (int b = 0; b < g.M; ++b) {
            const double x = g.x(a), y = g.x(b);
            const double arg = k1 * x + k2 * y;
            const double cs = std::cos(arg), sn = std::sin(arg);
            const double w2 = 1.0 + x * x + y * y;
            sv += w2 * (e.is_sin ? sn * sn : cs * cs);
            sc += w2 * (e.is_sin ? cs * cs : sn * sn);
        }
    }
    const double c2 = 2.0 / g.volume();
    return c2 * g.cell_area() * (sv + e.kk * sc);
}

double orthonormality_residual(const DivFreeBasis& basis, std::size_t count) {
    std::vector<SpectralField> f;
    for (std::size_t j = 0; j < count; ++j) f.push_back(basis.field(j));
    double r = 0.0;
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i; j < count; ++j)
            r = std::max(r, std::abs(inner(f[i], f[j]) - (i == j ? 1.0 : 0.0)));
    return r;
}

NoiseSpec build_spec(const NoiseConfig& cfg, const Grid& g) {
    return build_spec(cfg, std::make_shared<const DivFreeBasis>(g));
}

NoiseSpec build_spec(const NoiseConfig& cfg, std::shared_ptr<const DivFreeBasis> basis) {
    if (!(cfg.s > 0.5) || !std::isfinite(cfg.s))
        throw std::invalid_argument("noise: decay exponent must exceed 1/2");
    if (cfg.J < 1 || cfg.J > basis->size())
        throw std::invalid_argument("noise: J must lie in [1, basis size]");
    if (cfg.N_active > cfg.J) throw std::invalid_argument("noise: N_active exceeds J");
    if (!std::isfinite(cfg.b0) || (cfg.N_active > 0 && cfg.b0 == 0.0))
        throw std::invalid_argument("noise: active modes need nonzero coefficients");
    if (cfg.h_coeffs.size() > basis->size())
        throw std::invalid_argument("noise: too many h coefficients");
    if (!cfg.relaxed_h) {
        for (std::size_t j = cfg.N_active; j < cfg.h_coeffs.size(); ++j)
            if (cfg.h_coeffs[j] != 0.0)
                throw std::invalid_argument("noise: h must lie in the span of the active modes");
    }
    NoiseSpec spec;
    spec.config = cfg;
    spec.basis = std::move(basis);
    spec.b.resize(cfg.J);
    for (std::size_t j = 0; j < cfg.J; ++j) {
        spec.b[j] = cfg.b0 * std::pow(static_cast<double>(j + 1), -cfg.s);
        const double b2 = spec.b[j] * spec.b[j];
        spec.B0 += b2;
        spec.B1 += b2 * spec.basis->h1_norm_sq(j);
        spec.Bphi += b2 * phi_weighted_norm_sq(*spec.basis, j);
    }
    spec.h = spec.basis->synthesize(cfg.h_coeffs);
    return spec;
}

WienerIncrement sample_increment(const NoiseSpec& spec, double dt, const CounterRng& rng,
                                 Stream stream, std::uint64_t step) {
    if (!(dt >= 0.0)) throw std::invalid_argument("sample_increment: dt must be non-negative");
    WienerIncrement w;
    w.dt = dt;
    w.step = step;
    w.stream = stream;
    w.dbeta.resize(spec.J());
    w.shift.assign(spec.J(), 0.0);
    rng.normals(stream, step, w.dbeta.size(), w.dbeta.data());
    const double sq = std::sqrt(dt);
    for (auto& v : w.dbeta) v *= sq;
    return w;
}

WienerIncrement zero_increment(const NoiseSpec& spec, double dt, std::uint64_t step) {
    WienerIncrement w;
    w.dt = dt;
    w.step = step;
    w.dbeta.assign(spec.J(), 0.0);
    w.shift.assign(spec.J(), 0.0);
    return w;
}

WienerIncrement girsanov_shift(const WienerIncrement& incr, const NoiseSpec& spec,
                               const std::vector<double>& drift, double dt) {
    if (drift.size() > spec.J()) throw std::invalid_argument("girsanov_shift: drift beyond forced modes");
    WienerIncrement out = incr;
    for (std::size_t j = 0; j < drift.size(); ++j) {
        if (drift[j] == 0.0) continue;
        if (spec.b[j] == 0.0)
            throw std::domain_error("girsanov_shift: drift along a degenerate noise direction");
        out.shift[j] += drift[j] * dt / spec.b[j];
    }
    return out;
}

WienerIncrement girsanov_shift(const WienerIncrement& incr, const NoiseSpec& spec,
                               const SpectralField& drift, std::size_t N, double dt) {
    return girsanov_shift(incr, spec, spec.basis->coords(drift, N), dt);
}

double girsanov_log_ratio(const WienerIncrement& x, const NoiseSpec& spec,
                          const std::vector<double>& drift, double dt) {
    double s = 0.0;
    for (std::size_t j = 0; j < drift.size(); ++j) {
        const double m = drift[j] * dt / spec.b[j];
        const double v = x.value(j);
        s += (v * v - (v - m) * (v - m)) / (2.0 * dt);
    }
    return s;
}

SpectralField noise_field(const NoiseSpec& spec, const WienerIncrement& incr) {
    SpectralField f(spec.grid());
    for (std::size_t j = 0; j < spec.J(); ++j) {
        const double v = spec.b[j] * incr.value(j);
        if (v != 0.0) spec.basis->add_element(f, j, v);
    }
    return f;
}

}  // namespace ns2d
