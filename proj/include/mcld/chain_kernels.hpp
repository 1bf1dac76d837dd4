#ifndef MCLD_CHAIN_KERNELS_HPP
#define MCLD_CHAIN_KERNELS_HPP

// Scalar-generic kernels on dense rate matrices.  The public double API in
// chain.hpp wraps these; the hierarchy module instantiates them with dd when
// sweeping the n-grid, where capacities underflow double conditioning.

#include <vector>

#include "mcld/numerics.hpp"

namespace mcld::kernels {

// Strongly connected components of the positivity pattern, Tarjan,
// components renumbered in order of first appearance by state index.
std::vector<int> scc_components(const std::vector<std::vector<int>> &adj, int *count = nullptr);

template <class S> std::vector<std::vector<int>> adjacency(const Mat<S> &rates) {
    const int n = rates.rows();
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && to_double(rates(i, j)) > 0.0)
                adj[i].push_back(j);
    return adj;
}

template <class S> std::vector<S> holding(const Mat<S> &rates) {
    const int n = rates.rows();
    std::vector<S> lam(n, S(0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (j != i)
                lam[i] += rates(i, j);
    return lam;
}

// States from which `goal` is unreachable (following directed edges).
std::vector<int> unreachable_states(const std::vector<std::vector<int>> &adj,
                                    const std::vector<char> &goal);

// h(x) = P_x[H_target < H_avoid], solved by dense LU on the free states.
// Requires target/avoid disjoint and every state able to reach their union.
template <class S>
std::vector<S> hitting_probability(const Mat<S> &rates, const std::vector<char> &target,
                                   const std::vector<char> &avoid) {
    const int n = rates.rows();
    std::vector<int> free_ix;
    std::vector<int> pos(n, -1);
    for (int i = 0; i < n; ++i)
        if (!target[i] && !avoid[i]) {
            pos[i] = static_cast<int>(free_ix.size());
            free_ix.push_back(i);
        }
    std::vector<char> goal(n, 0);
    for (int i = 0; i < n; ++i)
        goal[i] = target[i] || avoid[i];
    {
        auto adj = adjacency(rates);
        auto bad = unreachable_states(adj, goal);
        if (!bad.empty())
            throw SingularSystem("hitting_probability: some state cannot reach target or avoid");
    }
    const int m = static_cast<int>(free_ix.size());
    std::vector<S> h(n, S(0));
    for (int i = 0; i < n; ++i)
        if (target[i])
            h[i] = S(1);
    if (m == 0)
        return h;
    Mat<S> a(m, m);
    std::vector<S> b(m, S(0));
    for (int r = 0; r < m; ++r) {
        int x = free_ix[r];
        S lam(0);
        for (int y = 0; y < n; ++y) {
            if (y == x)
                continue;
            const S &rate = rates(x, y);
            if (!(to_double(rate) > 0.0))
                continue;
            lam += rate;
            if (pos[y] >= 0)
                a(r, pos[y]) -= rate;
            else if (target[y])
                b[r] += rate;
        }
        a(r, r) += lam;
    }
    auto sol = lu_solve(std::move(a), std::move(b));
    for (int r = 0; r < m; ++r)
        h[free_ix[r]] = sol[r];
    return h;
}

// Cap(A,B) = sum_{x in A} pi(x) sum_y R(x,y) h(y) with h = 1 on B, 0 on A,
// h = hitting probability elsewhere (one-step decomposition of the return
// probability).
template <class S>
S capacity_from_pi(const Mat<S> &rates, const std::vector<S> &pi, const std::vector<char> &a_set,
                   const std::vector<char> &b_set) {
    const int n = rates.rows();
    std::vector<S> h = hitting_probability(rates, b_set, a_set);
    S cap(0);
    for (int x = 0; x < n; ++x) {
        if (!a_set[x])
            continue;
        S flux(0);
        for (int y = 0; y < n; ++y)
            if (y != x && to_double(rates(x, y)) > 0.0)
                flux += rates(x, y) * h[y];
        cap += pi[x] * flux;
    }
    return cap;
}

// Jump rates of the trace process on `keep`, by censoring elimination of the
// deleted states one at a time:
//   R'(x,z) += R(x,y) R(y,z) / lambda(y),   then drop y (and any self-rates).
// Subtraction-free, hence accurate entrywise; equals
//   R(x,z) + sum_{y not kept} R(x,y) P_y[X_{H_keep} = z].
template <class S> Mat<S> trace_rates(Mat<S> rates, const std::vector<char> &keep) {
    const int n = rates.rows();
    {
        auto adj = adjacency(rates);
        auto bad = unreachable_states(adj, keep);
        for (int x : bad)
            if (!keep[x])
                throw mcld::Unreachable("trace_chain: deleted state cannot reach kept set");
    }
    std::vector<char> alive(n, 1);
    for (int y = 0; y < n; ++y) {
        if (keep[y])
            continue;
        S lam(0);
        for (int z = 0; z < n; ++z)
            if (alive[z] && z != y)
                lam += rates(y, z);
        if (!(to_double(lam) > 0.0))
            throw mcld::Unreachable("trace_chain: deleted state cannot reach kept set");
        for (int x = 0; x < n; ++x) {
            if (!alive[x] || x == y || !(to_double(rates(x, y)) > 0.0))
                continue;
            S f = rates(x, y) / lam;
            for (int z = 0; z < n; ++z)
                if (alive[z] && z != y && z != x)
                    rates(x, z) += f * rates(y, z);
            rates(x, y) = S(0);
        }
        alive[y] = 0;
        for (int z = 0; z < n; ++z)
            rates(y, z) = S(0);
    }
    return rates;
}

// Expected hitting time of `target` from every state, +0 on the target.
template <class S> std::vector<S> mean_hitting_time(const Mat<S> &rates, const std::vector<char> &target) {
    const int n = rates.rows();
    std::vector<int> free_ix;
    std::vector<int> pos(n, -1);
    for (int i = 0; i < n; ++i)
        if (!target[i]) {
            pos[i] = static_cast<int>(free_ix.size());
            free_ix.push_back(i);
        }
    {
        auto adj = adjacency(rates);
        auto bad = unreachable_states(adj, target);
        if (!bad.empty())
            throw SingularSystem("mean_hitting_time: target unreachable from some state");
    }
    const int m = static_cast<int>(free_ix.size());
    std::vector<S> u(n, S(0));
    if (m == 0)
        return u;
    Mat<S> a(m, m);
    std::vector<S> b(m, S(1));
    for (int r = 0; r < m; ++r) {
        int x = free_ix[r];
        S lam(0);
        for (int y = 0; y < n; ++y) {
            if (y == x)
                continue;
            const S &rate = rates(x, y);
            if (!(to_double(rate) > 0.0))
                continue;
            lam += rate;
            if (pos[y] >= 0)
                a(r, pos[y]) -= rate;
        }
        a(r, r) += lam;
    }
    auto sol = lu_solve(std::move(a), std::move(b));
    for (int r = 0; r < m; ++r)
        u[free_ix[r]] = sol[r];
    return u;
}

} // namespace mcld::kernels

#endif
