#include "ns2d/poincare.hpp"

#include "ns2d/rng.hpp"
#include "ns2d/spectral_ops.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>

namespace ns2d {

double cutoff(double r, double A) {
    if (r <= A) return 1.0;
    if (r >= 2.0 * A) return 0.0;
    const double x = (r - A) / A;
    return 1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

namespace {

class GramOperator {
public:
    GramOperator(const DivFreeBasis& b, std::size_t N, double A, double s) : basis_(b), N_(N) {
        const Grid& g = b.grid();
        chi_.resize(g.size());
        for (int i = 0; i < g.M; ++i)
            for (int j = 0; j < g.M; ++j)
                chi_[static_cast<std::size_t>(i) * g.M + j] = cutoff(std::hypot(g.x(i), g.x(j)), A);
        lam_.resize(b.size());
        for (std::size_t j = 0; j < b.size(); ++j) lam_[j] = std::pow(1.0 + b.element(j).kk, -0.5 * s);
    }

    std::size_t dim() const { return basis_.size(); }

    void apply(const std::vector<double>& x, std::vector<double>& y) const {
        std::vector<double> z(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) z[j] = lam_[j] * x[j];
        z = multiply_cutoff(z);
        for (std::size_t j = 0; j < N_; ++j) z[j] = 0.0;
        y = multiply_cutoff(z);
        for (std::size_t j = 0; j < y.size(); ++j) y[j] *= lam_[j];
    }

private:
    std::vector<double> multiply_cutoff(const std::vector<double>& c) const {
        const Grid& g = basis_.grid();
        PhysicalVector p = to_physical(basis_.synthesize(c));
        for (std::size_t i = 0; i < p.u1.size(); ++i) {
            p.u1[i] *= chi_[i];
            p.u2[i] *= chi_[i];
        }
        return basis_.coords(from_physical(g, p), basis_.size());
    }

    const DivFreeBasis& basis_;
    std::size_t N_;
    std::vector<double> chi_;
    std::vector<double> lam_;
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

}  // namespace

PoincareEstimate truncated_poincare(const DivFreeBasis& basis, std::size_t N, double A, double s,
                                    const PoincareOptions& opt) {
    if (!(A > 1.0)) throw std::invalid_argument("truncated_poincare: radius must exceed 1");
    if (!(2.0 * A < basis.grid().L))
        throw std::invalid_argument("truncated_poincare: cutoff support must fit in the box");
    if (N > basis.size()) throw std::out_of_range("truncated_poincare: N exceeds basis size");
    PoincareEstimate est;
    if (N == basis.size()) return est;

    const GramOperator op(basis, N, A, s);
    const std::size_t n = op.dim();
    std::vector<double> q(n);
    CounterRng rng(opt.seed);
    rng.normals(Stream{0, 0, 0}, 0, n, q.data());
    double nq = std::sqrt(dot(q, q));
    for (auto& v : q) v /= nq;

    std::vector<std::vector<double>> V{q};
    std::vector<double> alpha, beta;
    std::vector<double> history;
    std::vector<double> w;
    for (int it = 0; it < opt.max_iterations; ++it) {
        op.apply(V.back(), w);
        alpha.push_back(dot(V.back(), w));
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& v : V) {
                const double c = dot(v, w);
                for (std::size_t i = 0; i < n; ++i) w[i] -= c * v[i];
            }
        }
        const double b = std::sqrt(dot(w, w));

        const int m = static_cast<int>(alpha.size());
        Eigen::VectorXd d = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd e(std::max(m - 1, 0));
        for (int i = 0; i + 1 < m; ++i) e[i] = beta[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
        es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
        const double theta = std::max(es.eigenvalues()[m - 1], 0.0);
        history.push_back(theta);
        est.iterations = m;
        est.epsilon = std::sqrt(theta);

        if (b <= 1e-14 * std::max(theta, 1e-300)) {
            est.ritz_change = 0.0;
            return est;
        }
        const int win = opt.stagnation_window;
        if (static_cast<int>(history.size()) > win) {
            const double change = theta - history[history.size() - 1 - win];
            est.ritz_change = change / theta;
            if (change <= opt.tolerance * theta) return est;
        }
        beta.push_back(b);
        for (auto& v : w) v /= b;
        V.push_back(w);
    }
    throw ConvergenceError("truncated_poincare: no convergence within iteration cap");
}

double truncated_poincare_epsilon(const DivFreeBasis& basis, std::size_t N, double A, double s,
                                  const PoincareOptions& opt) {
    return truncated_poincare(basis, N, A, s, opt).epsilon;
}

PoincareLadder poincare_ladder(const DivFreeBasis& basis, const std::vector<std::size_t>& Ns,
                               double A, double target, double s, const PoincareOptions& opt) {
    PoincareLadder out;
    for (std::size_t N : Ns) {
        const double eps = truncated_poincare_epsilon(basis, N, A, s, opt);
        out.N.push_back(N);
        out.epsilon.push_back(eps);
        if (out.first_below == 0 && eps < target) out.first_below = N;
    }
    return out;
}

}  // namespace ns2d
