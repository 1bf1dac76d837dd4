#include "mcld/flows.hpp"

#include <algorithm>
#include <cmath>

#include "mcld/chain_kernels.hpp"
#include "mcld/errors.hpp"

namespace mcld {

Flow::Flow(std::vector<double> values) : v_(std::move(values)) {
    for (double x : v_)
        if (x < 0.0 || !std::isfinite(x))
            throw ValidationError("flow values must be finite and nonnegative");
}

Flow Flow::zero(const ChainSpec &chain) {
    return Flow(std::vector<double>(chain.num_edges(), 0.0));
}

static void check_flow_size(const ChainSpec &chain, const Flow &flow, const char *where) {
    if (flow.size() != chain.num_edges())
        throw ValidationError(std::string(where) + ": flow is not on this chain's edge universe");
}

std::vector<double> divergence(const ChainSpec &chain, const Flow &flow) {
    check_flow_size(chain, flow, "divergence");
    std::vector<double> div(chain.num_states(), 0.0);
    const auto &es = chain.edges();
    for (size_t k = 0; k < es.size(); ++k) {
        div[es[k].from] += flow[static_cast<int>(k)];
        div[es[k].to] -= flow[static_cast<int>(k)];
    }
    return div;
}

double divergence_sup_norm(const ChainSpec &chain, const Flow &flow) {
    double m = 0.0;
    for (double d : divergence(chain, flow))
        m = std::max(m, std::fabs(d));
    return m;
}

bool is_divergence_free(const ChainSpec &chain, const Flow &flow, double tol) {
    return divergence_sup_norm(chain, flow) <= tol;
}

Flow induced_current(const ChainSpec &chain, const ProbabilityVector &mu) {
    if (mu.size() != chain.num_states())
        throw ValidationError("induced_current: measure is not on this chain's states");
    std::vector<double> v(chain.num_edges());
    const auto &es = chain.edges();
    for (size_t k = 0; k < es.size(); ++k)
        v[k] = mu[es[k].from] * es[k].rate;
    return Flow(std::move(v));
}

std::vector<Cycle> cycle_decomposition(const ChainSpec &chain, const Flow &flow, double tol) {
    check_flow_size(chain, flow, "cycle_decomposition");
    if (!is_divergence_free(chain, flow, tol))
        throw NotDivergenceFree("cycle_decomposition requires a divergence-free flow");

    const auto &es = chain.edges();
    const int ne = chain.num_edges();
    std::vector<double> j(flow.values());

    // Outgoing edge indices per state, in declared edge order.
    std::vector<std::vector<int>> out(chain.num_states());
    for (int k = 0; k < ne; ++k)
        out[es[k].from].push_back(k);

    std::vector<Cycle> cycles;
    for (int iter = 0; iter <= ne; ++iter) {
        // Minimum positive edge, first declared on ties; values at or below
        // the divergence tolerance are treated as zero.
        int start = -1;
        for (int k = 0; k < ne; ++k)
            if (j[k] > tol && (start == -1 || j[k] < j[start]))
                start = k;
        if (start == -1)
            break;
        double amp = j[start];

        // Depth-first over positive edges from the head of `start` back to
        // its tail; positivity plus zero divergence guarantees a cycle.
        const int home = es[start].from;
        std::vector<int> path{start};
        std::vector<char> visited(chain.num_states(), 0);
        visited[home] = 1;
        std::vector<size_t> cursor; // cursor[i] indexes out[head(path[i])]
        while (!path.empty()) {
            int cur = es[path.back()].to;
            if (cur == home)
                break;
            if (cursor.size() < path.size()) {
                visited[cur] = 1;
                cursor.push_back(0);
            }
            bool advanced = false;
            for (size_t &c = cursor.back(); c < out[cur].size(); ++c) {
                int k = out[cur][c];
                if (j[k] <= tol)
                    continue;
                int head = es[k].to;
                if (head != home && visited[head])
                    continue; // would revisit an interior state
                ++c;
                path.push_back(k);
                advanced = true;
                break;
            }
            if (!advanced) {
                visited[cur] = 0;
                cursor.pop_back();
                path.pop_back();
            }
        }
        if (path.empty())
            throw NumericalError("cycle_decomposition: no cycle through the minimum edge");
        for (int k : path) {
            j[k] = std::max(0.0, j[k] - amp); // the minimum edge lands on exact 0
            if (j[k] <= tol)
                j[k] = 0.0; // drop subtraction residue below the tolerance
        }
        cycles.push_back({path, amp});
    }
    return cycles;
}

Flow flow_of_cycles(const ChainSpec &chain, const std::vector<Cycle> &cycles) {
    std::vector<double> v(chain.num_edges(), 0.0);
    for (const auto &c : cycles)
        for (int k : c.edge_indices)
            v.at(k) += c.amplitude;
    return Flow(std::move(v));
}

std::vector<std::vector<int>> equivalence_classes(const ChainSpec &chain) {
    const int n = chain.num_states();
    std::vector<std::vector<int>> adj(n);
    for (const auto &e : chain.edges())
        adj[e.from].push_back(e.to);
    int ncomp = 0;
    auto comp = kernels::scc_components(adj, &ncomp);
    std::vector<std::vector<int>> classes(ncomp);
    for (int v = 0; v < n; ++v)
        classes[comp[v]].push_back(v);
    return classes;
}

std::vector<std::vector<double>> cycle_basis(int num_states,
                                             const std::vector<std::pair<int, int>> &edges) {
    const int ne = static_cast<int>(edges.size());
    std::vector<std::vector<std::pair<int, int>>> und(num_states); // (neighbor, edge)
    for (int k = 0; k < ne; ++k) {
        auto [u, v] = edges[k];
        und[u].push_back({v, k});
        und[v].push_back({u, k});
    }
    // BFS spanning forest of the undirected version.
    std::vector<int> parent(num_states, -1), parent_edge(num_states, -1), depth(num_states, 0);
    std::vector<char> seen(num_states, 0), in_tree(ne, 0);
    for (int root = 0; root < num_states; ++root) {
        if (seen[root])
            continue;
        std::vector<int> queue{root};
        seen[root] = 1;
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            int u = queue[qi];
            for (auto [v, k] : und[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    parent[v] = u;
                    parent_edge[v] = k;
                    depth[v] = depth[u] + 1;
                    in_tree[k] = 1;
                    queue.push_back(v);
                }
        }
    }
    std::vector<std::vector<double>> basis;
    for (int k = 0; k < ne; ++k) {
        if (in_tree[k])
            continue;
        std::vector<double> vec(ne, 0.0);
        vec[k] = 1.0;
        // Close the cycle through the tree path between head and tail,
        // signing tree edges by traversal direction.
        int a = edges[k].second, b = edges[k].first;
        while (a != b) {
            if (depth[a] >= depth[b]) {
                int pe = parent_edge[a];
                vec[pe] += (edges[pe].first == a) ? 1.0 : -1.0;
                a = parent[a];
            } else {
                int pe = parent_edge[b];
                vec[pe] += (edges[pe].first == b) ? -1.0 : 1.0;
                b = parent[b];
            }
        }
        basis.push_back(std::move(vec));
    }
    return basis;
}

std::vector<Flow> class_structure_decomposition(const ChainSpec &chain, const Flow &flow,
                                                double div_tol) {
    check_flow_size(chain, flow, "class_structure_decomposition");
    if (!is_divergence_free(chain, flow, div_tol))
        throw NotDivergenceFree("class_structure_decomposition requires a divergence-free flow");

    const int n = chain.num_states();
    auto classes = equivalence_classes(chain);
    std::vector<int> comp(n, -1);
    for (size_t c = 0; c < classes.size(); ++c)
        for (int v : classes[c])
            comp[v] = static_cast<int>(c);

    const auto &es = chain.edges();
    for (int k = 0; k < chain.num_edges(); ++k)
        if (flow[k] > 0.0 && comp[es[k].from] != comp[es[k].to])
            throw CrossClassFlow("divergence-free flow is positive on the cross-class edge " +
                                 chain.state_name(es[k].from) + "->" + chain.state_name(es[k].to));

    std::vector<Flow> parts;
    parts.reserve(classes.size());
    for (size_t c = 0; c < classes.size(); ++c) {
        std::vector<double> v(chain.num_edges(), 0.0);
        for (int k = 0; k < chain.num_edges(); ++k)
            if (comp[es[k].from] == static_cast<int>(c) && comp[es[k].to] == static_cast<int>(c))
                v[k] = flow[k];
        parts.push_back(Flow(std::move(v)));
    }
    return parts;
}

} // namespace mcld
