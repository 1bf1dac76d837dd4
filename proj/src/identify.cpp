#include "mcld/identify.hpp"

#include <algorithm>
#include <cmath>

#include "mcld/errors.hpp"
#include "mcld/rate_functionals.hpp"

namespace mcld {

DvOracle make_dv_oracle(const ChainSpec &hidden) {
    DvOracle oracle;
    oracle.states = hidden.states();
    oracle.eval = [hidden](const std::vector<double> &weights) {
        return dv_rate(hidden, ProbabilityVector(weights));
    };
    return oracle;
}

BfgOracle make_bfg_oracle(const ChainSpec &hidden) {
    BfgOracle oracle;
    oracle.states = hidden.states();
    for (const auto &e : hidden.edges())
        oracle.edges.push_back({e.from, e.to});
    oracle.eval = [hidden](const std::vector<double> &weights, const std::vector<double> &flow) {
        return bfg_rate(hidden, ProbabilityVector(weights), Flow(flow));
    };
    return oracle;
}

HoldingAndProducts recover_holding_and_products(const DvOracle &oracle, double tol) {
    const int n = static_cast<int>(oracle.states.size());
    HoldingAndProducts out;
    out.lambda.resize(n);
    out.products = Mat<double>(n, n);
    for (int z = 0; z < n; ++z) {
        std::vector<double> dirac(n, 0.0);
        dirac[z] = 1.0;
        out.lambda[z] = oracle.eval(dirac);
    }
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            std::vector<double> half(n, 0.0);
            half[x] = half[y] = 0.5;
            double value = oracle.eval(half);
            double root = 0.5 * (out.lambda[x] + out.lambda[y]) - value;
            if (root < -tol)
                throw NegativeRoot("pair evaluation at {" + oracle.states[x] + "," +
                                   oracle.states[y] + "} exceeds the holding-rate mean");
            if (root < 0.0)
                root = 0.0;
            out.products(x, y) = out.products(y, x) = root * root;
        }
    return out;
}

std::vector<std::vector<int>> classes_from_products(const HoldingAndProducts &hp,
                                                    double threshold) {
    const int n = static_cast<int>(hp.lambda.size());
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    for (int s = 0; s < n; ++s) {
        if (comp[s] != -1)
            continue;
        std::vector<int> queue{s};
        comp[s] = ncomp;
        for (size_t qi = 0; qi < queue.size(); ++qi)
            for (int t = 0; t < n; ++t)
                if (comp[t] == -1 && hp.products(queue[qi], t) > threshold) {
                    comp[t] = ncomp;
                    queue.push_back(t);
                }
        ++ncomp;
    }
    std::vector<std::vector<int>> classes(ncomp);
    for (int s = 0; s < n; ++s)
        classes[comp[s]].push_back(s);
    return classes;
}

namespace {

struct FdNewtonOptions {
    double grad_h = 1e-5;
    double grad_tol = 1e-9;
    double floor = 1e-7; // componentwise lower bound kept during the search
    int max_iterations = 120;
};

// Damped Newton with central finite differences on a smooth convex function
// over { x : feasible componentwise via the supplied projection guard }.
std::vector<double> fd_newton_minimize(const std::function<double(const std::vector<double> &)> &f,
                                       std::vector<double> x,
                                       const std::function<bool(const std::vector<double> &)> &ok,
                                       const FdNewtonOptions &opts) {
    const int d = static_cast<int>(x.size());
    if (d == 0)
        return x;
    double fx = f(x);
    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        const double h = opts.grad_h;
        std::vector<double> grad(d);
        Mat<double> hess(d, d);
        {
            std::vector<double> xp(x), xm(x);
            for (int i = 0; i < d; ++i) {
                xp[i] = x[i] + h;
                xm[i] = x[i] - h;
                double fp = f(xp), fm = f(xm);
                grad[i] = (fp - fm) / (2.0 * h);
                hess(i, i) = (fp - 2.0 * fx + fm) / (h * h);
                xp[i] = x[i];
                xm[i] = x[i];
            }
        }
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                std::vector<double> q(x);
                q[i] += h;
                q[j] += h;
                double fpp = f(q);
                q[j] -= 2.0 * h;
                double fpm = f(q);
                q[i] -= 2.0 * h;
                double fmm = f(q);
                q[j] += 2.0 * h;
                double fmp = f(q);
                double v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
                hess(i, j) = v;
                hess(j, i) = v;
            }
        double gnorm = 0.0;
        for (double g : grad)
            gnorm = std::max(gnorm, std::fabs(g));
        if (gnorm < opts.grad_tol)
            return x;

        // Levenberg fallback keeps the step well-posed when the FD Hessian
        // is indefinite from noise.
        std::vector<double> step;
        for (double damp = 0.0;; damp = damp == 0.0 ? 1e-8 : damp * 100.0) {
            Mat<double> a(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    a(i, j) = hess(i, j) + (i == j ? damp : 0.0);
            try {
                step = lu_solve(std::move(a), grad);
            } catch (const SingularSystem &) {
                continue;
            }
            double descent = 0.0;
            for (int i = 0; i < d; ++i)
                descent += grad[i] * step[i];
            if (descent > 0.0)
                break;
            if (damp > 1e6) {
                step = grad; // plain gradient step as a last resort
                break;
            }
        }

        double alpha = 1.0;
        bool moved = false;
        std::vector<double> trial(d);
        while (alpha > 1e-13) {
            for (int i = 0; i < d; ++i)
                trial[i] = x[i] - alpha * step[i];
            if (ok(trial)) {
                double ft = f(trial);
                if (ft < fx) {
                    x = trial;
                    fx = ft;
                    moved = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!moved)
            return x; // stationary to within the FD noise floor
    }
    throw NonConvergence("fd_newton_minimize: iteration budget exhausted");
}

} // namespace

std::vector<ProbabilityVector>
recover_stationary_profiles(const DvOracle &oracle, const std::vector<std::vector<int>> &classes) {
    const int n = static_cast<int>(oracle.states.size());
    std::vector<ProbabilityVector> profiles;
    for (const auto &cls : classes) {
        const int d = static_cast<int>(cls.size());
        std::vector<double> full(n, 0.0);
        if (d == 1) {
            full[cls[0]] = 1.0;
            profiles.push_back(ProbabilityVector(full));
            continue;
        }
        auto embed = [&](const std::vector<double> &free) {
            std::vector<double> w(n, 0.0);
            double rest = 1.0;
            for (int i = 0; i + 1 < d; ++i) {
                w[cls[i]] = free[i];
                rest -= free[i];
            }
            w[cls[d - 1]] = rest;
            return w;
        };
        FdNewtonOptions opts;
        auto feasible = [&](const std::vector<double> &free) {
            double rest = 1.0;
            for (double v : free) {
                if (v < opts.floor)
                    return false;
                rest -= v;
            }
            return rest >= opts.floor;
        };
        auto objective = [&](const std::vector<double> &free) { return oracle.eval(embed(free)); };
        std::vector<double> x0(d - 1, 1.0 / d);
        auto sol = fd_newton_minimize(objective, x0, feasible, opts);
        profiles.push_back(ProbabilityVector(embed(sol)));
    }
    return profiles;
}

ChainSpec recover_reversible(const DvOracle &oracle) {
    constexpr double product_threshold = 1e-6; // same gate as class discovery
    auto hp = recover_holding_and_products(oracle);
    auto classes = classes_from_products(hp, product_threshold);
    auto profiles = recover_stationary_profiles(oracle, classes);

    std::vector<Edge> edges;
    for (size_t c = 0; c < classes.size(); ++c) {
        const auto &cls = classes[c];
        const auto &pi = profiles[c];
        for (int a : cls)
            for (int b : cls) {
                if (a == b || !(hp.products(a, b) > product_threshold))
                    continue;
                double rate = std::sqrt(pi[b] / pi[a] * hp.products(a, b));
                if (rate > 0.0)
                    edges.push_back({a, b, rate});
            }
    }
    return ChainSpec(std::vector<std::string>(oracle.states), std::move(edges));
}

ChainSpec recover_from_bfg(const BfgOracle &oracle) {
    const int n = static_cast<int>(oracle.states.size());
    const int ne = static_cast<int>(oracle.edges.size());

    // classes = connected components of the (undirected) edge graph
    std::vector<int> comp(n, -1);
    int ncomp = 0;
    {
        std::vector<std::vector<int>> und(n);
        for (auto [a, b] : oracle.edges) {
            und[a].push_back(b);
            und[b].push_back(a);
        }
        for (int s = 0; s < n; ++s) {
            if (comp[s] != -1)
                continue;
            std::vector<int> queue{s};
            comp[s] = ncomp;
            for (size_t qi = 0; qi < queue.size(); ++qi)
                for (int t : und[queue[qi]])
                    if (comp[t] == -1) {
                        comp[t] = ncomp;
                        queue.push_back(t);
                    }
            ++ncomp;
        }
    }

    std::vector<double> recovered_rate(ne, 0.0);
    for (int c = 0; c < ncomp; ++c) {
        std::vector<int> cls;
        for (int s = 0; s < n; ++s)
            if (comp[s] == c)
                cls.push_back(s);
        std::vector<int> cls_edges;
        for (int k = 0; k < ne; ++k)
            if (comp[oracle.edges[k].first] == c)
                cls_edges.push_back(k);
        const int d = static_cast<int>(cls.size());
        if (d == 1)
            continue; // isolated state, no edges to recover

        // strictly positive divergence-free start: unit-rate circulation
        std::vector<int> local(n, -1);
        for (int i = 0; i < d; ++i)
            local[cls[i]] = i;
        Mat<double> unit(d, d);
        for (int k : cls_edges)
            unit(local[oracle.edges[k].first], local[oracle.edges[k].second]) = 1.0;
        auto nu0 = gth_stationary(unit);

        std::vector<std::pair<int, int>> local_edges;
        for (int k : cls_edges)
            local_edges.push_back({local[oracle.edges[k].first], local[oracle.edges[k].second]});
        auto basis = cycle_basis(d, local_edges);
        const int zdim = static_cast<int>(basis.size());
        const int me = static_cast<int>(cls_edges.size());
        std::vector<double> j0(me);
        for (int i = 0; i < me; ++i)
            j0[i] = nu0[local_edges[i].first];

        // variables: d-1 free class weights, then zdim cycle coordinates
        FdNewtonOptions opts;
        opts.grad_tol = 1e-10;
        auto unpack = [&](const std::vector<double> &v, std::vector<double> &mu,
                          std::vector<double> &flow) {
            mu.assign(n, 0.0);
            double rest = 1.0;
            for (int i = 0; i + 1 < d; ++i) {
                mu[cls[i]] = v[i];
                rest -= v[i];
            }
            mu[cls[d - 1]] = rest;
            flow.assign(ne, 0.0);
            for (int i = 0; i < me; ++i) {
                double je = j0[i];
                for (int b = 0; b < zdim; ++b)
                    je += v[d - 1 + b] * basis[b][i];
                flow[cls_edges[i]] = je;
            }
        };
        auto feasible = [&](const std::vector<double> &v) {
            std::vector<double> mu, flow;
            unpack(v, mu, flow);
            for (int s : cls)
                if (mu[s] < opts.floor)
                    return false;
            for (int k : cls_edges)
                if (flow[k] < opts.floor * 1e-2)
                    return false;
            return true;
        };
        auto objective = [&](const std::vector<double> &v) {
            std::vector<double> mu, flow;
            unpack(v, mu, flow);
            return oracle.eval(mu, flow);
        };
        std::vector<double> x0(d - 1 + zdim, 0.0);
        for (int i = 0; i + 1 < d; ++i)
            x0[i] = 1.0 / d;
        auto sol = fd_newton_minimize(objective, x0, feasible, opts);
        std::vector<double> mu, flow;
        unpack(sol, mu, flow);
        for (int k : cls_edges)
            recovered_rate[k] = flow[k] / mu[oracle.edges[k].first];
    }

    std::vector<Edge> edges;
    for (int k = 0; k < ne; ++k)
        if (recovered_rate[k] > 0.0)
            edges.push_back({oracle.edges[k].first, oracle.edges[k].second, recovered_rate[k]});
    return ChainSpec(std::vector<std::string>(oracle.states), std::move(edges));
}

double oracle_deviation(const ChainSpec &candidate, const DvOracle &oracle) {
    const int n = static_cast<int>(oracle.states.size());
    double worst = 0.0;
    auto probe = [&](const std::vector<double> &w) {
        double mine = dv_rate(candidate, ProbabilityVector(w));
        worst = std::max(worst, std::fabs(mine - oracle.eval(w)));
    };
    for (int z = 0; z < n; ++z) {
        std::vector<double> dirac(n, 0.0);
        dirac[z] = 1.0;
        probe(dirac);
    }
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            std::vector<double> half(n, 0.0);
            half[x] = half[y] = 0.5;
            probe(half);
        }
    return worst;
}

CounterexampleDvReport counterexample_dv(int resolution) {
    auto fwd = ChainSpec::from_named_edges({"a", "b", "c"},
                                           {{"a", "b", 1.0}, {"b", "c", 1.0}, {"c", "a", 1.0}});
    auto rev = ChainSpec::from_named_edges({"a", "b", "c"},
                                           {{"a", "c", 1.0}, {"c", "b", 1.0}, {"b", "a", 1.0}});
    CounterexampleDvReport rep;
    for (int i = 0; i <= resolution; ++i)
        for (int j = 0; i + j <= resolution; ++j) {
            int k = resolution - i - j;
            std::vector<double> w{static_cast<double>(i) / resolution,
                                  static_cast<double>(j) / resolution,
                                  static_cast<double>(k) / resolution};
            ProbabilityVector mu(w);
            double vf = dv_rate(fwd, mu);
            double vr = dv_rate(rev, mu);
            double closed = 1.0 - 3.0 * std::cbrt(w[0] * w[1] * w[2]);
            rep.grid_points += 1;
            rep.max_orientation_gap = std::max(rep.max_orientation_gap, std::fabs(vf - vr));
            rep.max_closed_form_gap =
                std::max({rep.max_closed_form_gap, std::fabs(vf - closed), std::fabs(vr - closed)});
        }
    return rep;
}

CounterexampleBfgReport counterexample_bfg(int samples, uint64_t seed) {
    auto first = ChainSpec::from_named_edges({"a", "b", "c"},
                                             {{"a", "b", 2.0}, {"b", "c", 1.0}, {"c", "b", 1.0}});
    auto second = ChainSpec::from_named_edges({"a", "b", "c"},
                                              {{"a", "c", 2.0}, {"b", "c", 1.0}, {"c", "b", 1.0}});
    CounterexampleBfgReport rep;
    Xoshiro256 rng(seed);
    for (int s = 0; s < samples; ++s) {
        std::vector<double> w(3);
        double total = 0.0;
        for (double &x : w) {
            x = -std::log(1.0 - rng.uniform01());
            total += x;
        }
        for (double &x : w)
            x /= total;
        double t = 2.0 * rng.uniform01();
        ProbabilityVector mu(w);

        std::vector<double> v1(first.num_edges(), 0.0);
        v1[first.edge_index(1, 2)] = t;
        v1[first.edge_index(2, 1)] = t;
        std::vector<double> v2(second.num_edges(), 0.0);
        v2[second.edge_index(1, 2)] = t;
        v2[second.edge_index(2, 1)] = t;
        double i1 = bfg_rate(first, mu, Flow(v1));
        double i2 = bfg_rate(second, mu, Flow(v2));
        double formula = 2.0 * w[0] + phi(t, w[1]) + phi(t, w[2]);
        rep.samples += 1;
        rep.max_gap = std::max(rep.max_gap, std::fabs(i1 - i2));
        rep.max_formula_gap =
            std::max({rep.max_formula_gap, std::fabs(i1 - formula), std::fabs(i2 - formula)});
    }
    // non-divergence-free controls are infinite on both chains
    std::vector<double> c1(first.num_edges(), 0.0);
    c1[first.edge_index(0, 1)] = 0.5;
    std::vector<double> c2(second.num_edges(), 0.0);
    c2[second.edge_index(0, 2)] = 0.5;
    ProbabilityVector mu = ProbabilityVector::uniform(3);
    rep.infinite_controls_agree =
        std::isinf(bfg_rate(first, mu, Flow(c1))) && std::isinf(bfg_rate(second, mu, Flow(c2)));
    return rep;
}

} // namespace mcld
