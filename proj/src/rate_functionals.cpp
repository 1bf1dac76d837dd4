#include "mcld/rate_functionals.hpp"

#include <algorithm>
#include <cmath>

#include "mcld/chain_kernels.hpp"
#include "mcld/errors.hpp"

namespace mcld {

double phi(double q, double p) {
    if (q < 0.0 || p < 0.0 || !std::isfinite(q) || !std::isfinite(p))
        throw ValidationError("phi is defined on finite nonnegative arguments");
    if (q == 0.0)
        return p;
    if (p == 0.0)
        return infinite_rate;
    // clamp rounding noise near q = p; the true value is nonnegative
    return std::max(0.0, q * std::log(q / p) - (q - p));
}

double upsilon(const ChainSpec &chain, const ProbabilityVector &mu, const Flow &flow) {
    if (mu.size() != chain.num_states() || flow.size() != chain.num_edges())
        throw ValidationError("upsilon: measure/flow not on this chain's universe");
    double total = 0.0;
    const auto &es = chain.edges();
    for (int k = 0; k < chain.num_edges(); ++k) {
        total += phi(flow[k], mu[es[k].from] * es[k].rate);
        if (std::isinf(total))
            return infinite_rate;
    }
    return total;
}

double bfg_rate(const ChainSpec &chain, const ProbabilityVector &mu, const Flow &flow,
                double div_tol) {
    if (!is_divergence_free(chain, flow, div_tol))
        return infinite_rate;
    return upsilon(chain, mu, flow);
}

double tilt_value(const ChainSpec &chain, const ProbabilityVector &mu, const TiltField &h) {
    if (static_cast<int>(h.size()) != chain.num_states())
        throw ValidationError("tilt field is not on this chain's states");
    double total = 0.0;
    for (const auto &e : chain.edges())
        total += mu[e.from] * e.rate * (1.0 - std::exp(h[e.to] - h[e.from]));
    return total;
}

// --- variational form --------------------------------------------------------

TiltField tilt_solver(const ChainSpec &chain, const ProbabilityVector &mu,
                      const SolverOptions &opts) {
    const int n = chain.num_states();
    if (mu.size() != n)
        throw ValidationError("tilt_solver: measure is not on this chain's states");
    for (int i = 0; i < n; ++i)
        if (!(mu[i] > 0.0))
            throw NotStrictlyPositive("tilt_solver requires a strictly positive measure");
    if (!is_irreducible(chain))
        throw NotIrreducible("tilt_solver requires an irreducible chain");

    TiltField h(n, 0.0);
    if (n == 1)
        return h;

    const auto &es = chain.edges();
    std::vector<double> jt(es.size()); // tilted current mu(x) R_H(x,y)

    auto tilted_current = [&](const TiltField &field) {
        for (size_t k = 0; k < es.size(); ++k)
            jt[k] = mu[es[k].from] * es[k].rate * std::exp(field[es[k].to] - field[es[k].from]);
    };
    auto value_of = [&](const TiltField &field) {
        double v = 0.0;
        for (size_t k = 0; k < es.size(); ++k)
            v += mu[es[k].from] * es[k].rate *
                 (1.0 - std::exp(field[es[k].to] - field[es[k].from]));
        return v;
    };

    double value = value_of(h);
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        tilted_current(h);
        // gradient of G at H is the divergence of the tilted current
        std::vector<double> grad(n, 0.0);
        for (size_t k = 0; k < es.size(); ++k) {
            grad[es[k].from] += jt[k];
            grad[es[k].to] -= jt[k];
        }
        double gnorm = 0.0;
        for (int i = 1; i < n; ++i)
            gnorm = std::max(gnorm, std::fabs(grad[i]));
        if (gnorm < opts.grad_tol)
            return h;

        // minus the Hessian, restricted to H(x0) = 0
        Mat<double> a(n - 1, n - 1);
        for (size_t k = 0; k < es.size(); ++k) {
            int x = es[k].from, y = es[k].to;
            if (x > 0)
                a(x - 1, x - 1) += jt[k];
            if (y > 0)
                a(y - 1, y - 1) += jt[k];
            if (x > 0 && y > 0) {
                a(x - 1, y - 1) -= jt[k];
                a(y - 1, x - 1) -= jt[k];
            }
        }
        std::vector<double> rhs(grad.begin() + 1, grad.end());
        std::vector<double> step = lu_solve(std::move(a), std::move(rhs));

        double maxstep = 0.0;
        for (double s : step)
            maxstep = std::max(maxstep, std::fabs(s));
        if (maxstep > 30.0)
            for (double &s : step)
                s *= 30.0 / maxstep;

        // Inside the quadratic basin the objective differences fall below
        // one ulp and a value-based line search stalls; full Newton steps
        // contract the gradient quadratically there.
        if (maxstep < 1e-6) {
            for (int i = 1; i < n; ++i)
                h[i] += step[i - 1];
            value = value_of(h);
            continue;
        }

        double slope = 0.0;
        for (int i = 1; i < n; ++i)
            slope += grad[i] * step[i - 1];

        double alpha = 1.0;
        TiltField trial(n, 0.0);
        while (true) {
            for (int i = 1; i < n; ++i)
                trial[i] = h[i] + alpha * step[i - 1];
            double tv = value_of(trial);
            if (tv >= value + 1e-4 * alpha * slope) {
                h = trial;
                value = tv;
                break;
            }
            alpha *= 0.5;
            if (alpha < 1e-14)
                throw NonConvergence("tilt_solver: line search failed");
        }
    }
    throw NonConvergence("tilt_solver: no convergence within the iteration budget");
}

double dv_rate_variational(const ChainSpec &chain, const ProbabilityVector &mu,
                           const SolverOptions &opts) {
    return tilt_value(chain, mu, tilt_solver(chain, mu, opts));
}

// --- projection form ---------------------------------------------------------

ProjectionResult dv_rate_projection(const ChainSpec &chain, const ProbabilityVector &mu,
                                    const SolverOptions &opts) {
    const int n = chain.num_states();
    if (mu.size() != n)
        throw ValidationError("dv_rate_projection: measure is not on this chain's states");
    const auto &es = chain.edges();
    const int ne = chain.num_edges();

    std::vector<double> p(ne);
    for (int k = 0; k < ne; ++k)
        p[k] = mu[es[k].from] * es[k].rate;

    // Any finite-cost divergence-free flow is supported on directed cycles
    // of the positive-reference subgraph; everything else is pinned at 0 and
    // contributes Phi(0, p) = p.
    std::vector<std::vector<int>> adj(n);
    for (int k = 0; k < ne; ++k)
        if (p[k] > 0.0)
            adj[es[k].from].push_back(es[k].to);
    int ncomp = 0;
    auto comp = kernels::scc_components(adj, &ncomp);

    std::vector<double> jopt(ne, 0.0);
    double forced = 0.0;
    std::vector<std::vector<int>> comp_edges(ncomp);
    for (int k = 0; k < ne; ++k) {
        if (p[k] > 0.0 && comp[es[k].from] == comp[es[k].to])
            comp_edges[comp[es[k].from]].push_back(k);
        else
            forced += p[k]; // Phi(0, p); zero off the positive subgraph
    }

    ProjectionResult result;
    result.value = forced;

    for (int c = 0; c < ncomp; ++c) {
        if (comp_edges[c].empty())
            continue;
        std::vector<int> comp_states;
        for (int v = 0; v < n; ++v)
            if (comp[v] == c)
                comp_states.push_back(v);

        // Strictly positive divergence-free start: the induced current of
        // the stationary state of the component-restricted chain.
        const int ns = static_cast<int>(comp_states.size());
        std::vector<int> local_state(n, -1);
        for (int i = 0; i < ns; ++i)
            local_state[comp_states[i]] = i;
        Mat<double> rates(ns, ns);
        for (int k : comp_edges[c])
            rates(local_state[es[k].from], local_state[es[k].to]) = es[k].rate;
        auto nu = gth_stationary(rates);

        const int m = static_cast<int>(comp_edges[c].size());
        std::vector<double> j(m), pe(m);
        for (int i = 0; i < m; ++i) {
            int k = comp_edges[c][i];
            j[i] = nu[local_state[es[k].from]] * es[k].rate;
            pe[i] = p[k];
        }

        std::vector<std::pair<int, int>> local_edges;
        local_edges.reserve(m);
        for (int k : comp_edges[c])
            local_edges.push_back({local_state[es[k].from], local_state[es[k].to]});
        auto basis = cycle_basis(ns, local_edges);
        const int dim = static_cast<int>(basis.size());

        auto cost = [&](const std::vector<double> &flow) {
            double v = 0.0;
            for (int i = 0; i < m; ++i)
                v += phi(flow[i], pe[i]);
            return v;
        };

        double fval = cost(j);
        double kkt = 0.0;
        int iter = 0;
        if (dim > 0) {
            for (iter = 0; iter < opts.max_iterations; ++iter) {
                std::vector<double> glog(m);
                for (int i = 0; i < m; ++i)
                    glog[i] = std::log(j[i] / pe[i]);
                std::vector<double> grad(dim, 0.0);
                for (int b = 0; b < dim; ++b)
                    for (int i = 0; i < m; ++i)
                        grad[b] += basis[b][i] * glog[i];
                kkt = 0.0;
                for (double g : grad)
                    kkt = std::max(kkt, std::fabs(g));
                if (kkt < opts.kkt_tol)
                    break;

                Mat<double> hess(dim, dim);
                for (int b = 0; b < dim; ++b)
                    for (int d = b; d < dim; ++d) {
                        double s = 0.0;
                        for (int i = 0; i < m; ++i)
                            s += basis[b][i] * basis[d][i] / j[i];
                        hess(b, d) = s;
                        hess(d, b) = s;
                    }
                std::vector<double> step = lu_solve(std::move(hess), grad);
                for (double &s : step)
                    s = -s;

                std::vector<double> dir(m, 0.0);
                for (int b = 0; b < dim; ++b)
                    for (int i = 0; i < m; ++i)
                        dir[i] += step[b] * basis[b][i];

                double alpha = 1.0;
                for (int i = 0; i < m; ++i)
                    if (dir[i] < 0.0)
                        alpha = std::min(alpha, -0.99 * j[i] / dir[i]);

                // Full steps once the relative move is tiny; value-based
                // backtracking cannot resolve sub-ulp decrements.
                double relmove = 0.0;
                for (int i = 0; i < m; ++i)
                    relmove = std::max(relmove, std::fabs(alpha * dir[i]) / j[i]);
                if (relmove < 1e-6) {
                    for (int i = 0; i < m; ++i)
                        j[i] += alpha * dir[i];
                    fval = cost(j);
                    continue;
                }

                double slope = 0.0;
                for (int b = 0; b < dim; ++b)
                    slope += grad[b] * step[b];

                bool moved = false;
                std::vector<double> trial(m);
                while (alpha > 1e-16) {
                    for (int i = 0; i < m; ++i)
                        trial[i] = j[i] + alpha * dir[i];
                    double tv = cost(trial);
                    if (tv <= fval + 1e-4 * alpha * slope) {
                        j = trial;
                        fval = tv;
                        moved = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                if (!moved)
                    throw NonConvergence("dv_rate_projection: line search failed");
            }
            if (kkt >= opts.kkt_tol)
                throw NonConvergence("dv_rate_projection: KKT residual did not converge");
        }

        result.value += fval;
        result.kkt_residual = std::max(result.kkt_residual, kkt);
        result.iterations = std::max(result.iterations, iter);
        for (int i = 0; i < m; ++i)
            jopt[comp_edges[c][i]] = j[i];
    }

    result.minimizer = Flow(std::move(jopt));
    return result;
}

double dv_rate(const ChainSpec &chain, const ProbabilityVector &mu, const SolverOptions &opts) {
    return dv_rate_projection(chain, mu, opts).value;
}

// --- tilt machinery -----------------------------------------------------------

ChainSpec tilted_chain(const ChainSpec &chain, const TiltField &h) {
    if (static_cast<int>(h.size()) != chain.num_states())
        throw ValidationError("tilt field is not on this chain's states");
    std::vector<Edge> es = chain.edges();
    for (auto &e : es)
        e.rate *= std::exp(h[e.to] - h[e.from]);
    return ChainSpec(chain.states(), std::move(es));
}

Flow optimal_current(const ChainSpec &chain, const ProbabilityVector &mu,
                     const SolverOptions &opts) {
    TiltField h = tilt_solver(chain, mu, opts);
    std::vector<double> v(chain.num_edges());
    const auto &es = chain.edges();
    for (int k = 0; k < chain.num_edges(); ++k)
        v[k] = mu[es[k].from] * es[k].rate * std::exp(h[es[k].to] - h[es[k].from]);
    return Flow(std::move(v));
}

ProbabilityVector tilt_inverse(const ChainSpec &chain, const TiltField &h) {
    return stationary_distribution(tilted_chain(chain, h));
}

} // namespace mcld
