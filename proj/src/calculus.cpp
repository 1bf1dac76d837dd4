#include "mcld/calculus.hpp"

#include <algorithm>
#include <cmath>

#include "mcld/errors.hpp"

namespace mcld {

SignedMeasure::SignedMeasure(std::vector<double> values) : v_(std::move(values)) {
    double s = 0.0;
    for (double x : v_) {
        if (!std::isfinite(x))
            throw ValidationError("signed measure has a non-finite entry");
        s += x;
    }
    if (std::fabs(s) > 1e-12)
        throw ValidationError("signed measure must sum to zero (off by " + std::to_string(s) + ")");
}

namespace {

Mat<double> generator_matrix(const ChainSpec &chain, const TiltField &h) {
    const int n = chain.num_states();
    Mat<double> l(n, n);
    for (const auto &e : chain.edges()) {
        double r = e.rate * std::exp(h[e.to] - h[e.from]);
        l(e.from, e.to) += r;
        l(e.from, e.from) -= r;
    }
    return l;
}

OperatorBundle bundle_at(const ChainSpec &chain, const std::vector<double> &mu, TiltField h) {
    const int n = chain.num_states();
    OperatorBundle b;
    b.mu = mu;
    b.generator = generator_matrix(chain, h);
    b.h = std::move(h);
    b.adjoint = Mat<double>(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            b.adjoint(x, y) = mu[y] * b.generator(y, x) / mu[x];
    b.symmetric = Mat<double>(n, n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            b.symmetric(x, y) = 0.5 * (b.generator(x, y) + b.adjoint(x, y));
    return b;
}

std::vector<double> mat_apply(const Mat<double> &m, const std::vector<double> &f) {
    const int n = m.rows();
    std::vector<double> g(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g[i] += m(i, j) * f[j];
    return g;
}

double inner(const std::vector<double> &mu, const std::vector<double> &f,
             const std::vector<double> &g) {
    double s = 0.0;
    for (size_t i = 0; i < mu.size(); ++i)
        s += mu[i] * f[i] * g[i];
    return s;
}

// Solves  M g = rhs  on the mu-mean-zero subspace, where constants span the
// kernel of M and rhs is mu-mean-zero.  Deflation: M~ = M + alpha 1 (x) mu
// is nonsingular and returns the mean-zero solution.
std::vector<double> deflated_solve(const Mat<double> &m, const std::vector<double> &mu,
                                   const std::vector<double> &rhs, const char *who) {
    const int n = m.rows();
    double scale = 1.0;
    for (int i = 0; i < n; ++i)
        scale = std::max(scale, std::fabs(m(i, i)));
    Mat<double> a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            a(i, j) = m(i, j) - scale * mu[j];
    try {
        return lu_solve(std::move(a), rhs);
    } catch (const SingularSystem &) {
        throw SingularSymmetricPart(std::string(who) + ": deflated operator is singular");
    }
}

std::vector<double> density(const SignedMeasure &nu, const std::vector<double> &mu) {
    std::vector<double> f(nu.size());
    for (int i = 0; i < nu.size(); ++i)
        f[i] = nu[i] / mu[i];
    return f;
}

void require_interior(const ProbabilityVector &mu) {
    for (int i = 0; i < mu.size(); ++i)
        if (!(mu[i] > 0.0))
            throw NotStrictlyPositive("calculus operations need a strictly positive measure");
}

} // namespace

OperatorBundle make_operator_bundle(const ChainSpec &chain, const ProbabilityVector &mu,
                                    const SolverOptions &opts) {
    require_interior(mu);
    return bundle_at(chain, mu.weights(), tilt_solver(chain, mu, opts));
}

double first_derivative(const ChainSpec &chain, const ProbabilityVector &mu,
                        const SignedMeasure &nu, const SolverOptions &opts) {
    if (nu.size() != chain.num_states())
        throw ValidationError("first_derivative: direction is not on this chain's states");
    require_interior(mu);
    TiltField h = tilt_solver(chain, mu, opts);
    double s = 0.0;
    for (const auto &e : chain.edges())
        s += nu[e.from] * e.rate * (1.0 - std::exp(h[e.to] - h[e.from]));
    return s;
}

std::vector<double> tilt_derivative(const ChainSpec &chain, const ProbabilityVector &mu,
                                    const SignedMeasure &nu, const SolverOptions &opts) {
    require_interior(mu);
    OperatorBundle b = make_operator_bundle(chain, mu, opts);
    auto rhs = mat_apply(b.adjoint, density(nu, b.mu));
    for (double &x : rhs)
        x *= 0.5;
    auto g = deflated_solve(b.symmetric, b.mu, rhs, "tilt_derivative");
    double g0 = g[0];
    for (double &x : g)
        x -= g0; // anchor convention H(x0) = 0 for every mu
    return g;
}

double second_derivative(const ChainSpec &chain, const ProbabilityVector &mu,
                         const SignedMeasure &nu1, const SignedMeasure &nu2,
                         const SolverOptions &opts) {
    require_interior(mu);
    OperatorBundle b = make_operator_bundle(chain, mu, opts);
    auto f1 = density(nu1, b.mu);
    auto f2 = density(nu2, b.mu);
    auto u = mat_apply(b.adjoint, f2);
    for (double &x : u)
        x = -x;
    auto w = deflated_solve(b.symmetric, b.mu, u, "second_derivative"); // (-L^s)^{-1} L* f2
    auto v = mat_apply(b.generator, w);
    return 0.5 * inner(b.mu, f1, v);
}

double asymptotic_variance(const ChainSpec &chain, const std::vector<double> &f) {
    const int n = chain.num_states();
    if (static_cast<int>(f.size()) != n)
        throw ValidationError("asymptotic_variance: f is not on this chain's states");
    auto pi = stationary_distribution(chain);
    double mean = 0.0;
    for (int i = 0; i < n; ++i)
        mean += pi[i] * f[i];
    if (std::fabs(mean) > 1e-12)
        throw NotMeanZero("asymptotic_variance requires a pi-mean-zero observable");
    OperatorBundle b = bundle_at(chain, pi.weights(), TiltField(n, 0.0));
    auto g = deflated_solve(b.generator, b.mu, f, "asymptotic_variance"); // L g = f
    auto sg = mat_apply(b.symmetric, g);
    return -2.0 * inner(b.mu, g, sg);
}

QuadraticTiltReport quadratic_tilt_limit(const ChainSpec &chain, const TiltField &h) {
    const int n = chain.num_states();
    if (static_cast<int>(h.size()) != n)
        throw ValidationError("quadratic_tilt_limit: tilt is not on this chain's states");
    auto pi = stationary_distribution(chain);
    OperatorBundle b = bundle_at(chain, pi.weights(), TiltField(n, 0.0));
    auto sh = mat_apply(b.symmetric, h);
    QuadraticTiltReport rep;
    rep.target = -inner(b.mu, sh, h);
    for (int k = 0; k < 8; ++k) {
        double eps = 0.1 * std::pow(2.0, -k);
        TiltField scaled(n);
        for (int i = 0; i < n; ++i)
            scaled[i] = eps * h[i];
        // pi_eps is stationary for the tilted chain, so I(pi_eps) equals the
        // inner functional evaluated at the tilt itself.
        ProbabilityVector pie = tilt_inverse(chain, scaled);
        rep.rows.push_back({eps, tilt_value(chain, pie, scaled) / (eps * eps)});
    }
    rep.limit = neville_to_zero(rep.rows);
    return rep;
}

LegendreReport legendre_check(const ChainSpec &chain, const SignedMeasure &nu) {
    const int n = chain.num_states();
    if (nu.size() != n)
        throw ValidationError("legendre_check: direction is not on this chain's states");
    auto pi = stationary_distribution(chain);
    auto f = density(nu, pi.weights());

    // Basis of the pi-mean-zero subspace: b_i = 1_{x_i} - (pi_i/pi_0) 1_{x_0}.
    const int d = n - 1;
    std::vector<std::vector<double>> basis(d, std::vector<double>(n, 0.0));
    for (int i = 0; i < d; ++i) {
        basis[i][i + 1] = 1.0;
        basis[i][0] = -pi[i + 1] / pi[0];
    }
    auto sigma2 = [&](const std::vector<double> &g) { return asymptotic_variance(chain, g); };

    // sigma^2 as a quadratic form on the basis, by polarization.
    Mat<double> q(d, d);
    std::vector<double> v(d, 0.0);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            std::vector<double> plus(n), minus(n);
            for (int x = 0; x < n; ++x) {
                plus[x] = basis[i][x] + basis[j][x];
                minus[x] = basis[i][x] - basis[j][x];
            }
            double qij = 0.25 * (sigma2(plus) - sigma2(minus));
            q(i, j) = qij;
            q(j, i) = qij;
        }
        v[i] = inner(pi.weights(), f, basis[i]);
    }
    auto c = lu_solve(std::move(q), v);
    std::vector<double> hstar(n, 0.0);
    double lvalue = 0.0;
    for (int i = 0; i < d; ++i) {
        lvalue += v[i] * c[i]; // v^T Q^{-1} v
        for (int x = 0; x < n; ++x)
            hstar[x] += c[i] * basis[i][x];
    }
    LegendreReport rep;
    rep.legendre_value = lvalue;
    rep.optimizer_value = 2.0 * inner(pi.weights(), f, hstar) - sigma2(hstar);
    rep.second_derivative_value = second_derivative(chain, pi, nu, nu);
    rep.rel_error = std::fabs(rep.legendre_value - rep.second_derivative_value) /
                    std::max(1e-30, std::fabs(rep.second_derivative_value));
    return rep;
}

} // namespace mcld
