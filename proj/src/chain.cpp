#include "mcld/chain.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "mcld/chain_kernels.hpp"
#include "mcld/errors.hpp"

namespace mcld {

namespace {

std::vector<char> mask_of(int n, const std::vector<int> &subset, const char *what) {
    std::vector<char> m(n, 0);
    for (int s : subset) {
        if (s < 0 || s >= n)
            throw ValidationError(std::string(what) + ": state index out of range");
        m[s] = 1;
    }
    return m;
}

} // namespace

// --- kernels with no scalar dependence --------------------------------------

namespace kernels {

std::vector<int> scc_components(const std::vector<std::vector<int>> &adj, int *count) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> comp(n, -1), low(n, 0), num(n, -1), stack;
    std::vector<char> on_stack(n, 0);
    int timer = 0, ncomp = 0;

    // Iterative Tarjan.
    struct Frame {
        int v;
        size_t edge;
    };
    std::vector<Frame> call;
    for (int root = 0; root < n; ++root) {
        if (num[root] != -1)
            continue;
        call.push_back({root, 0});
        num[root] = low[root] = timer++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            auto &[v, ei] = call.back();
            if (ei < adj[v].size()) {
                int w = adj[v][ei++];
                if (num[w] == -1) {
                    num[w] = low[w] = timer++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], num[w]);
                }
            } else {
                if (low[v] == num[v]) {
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp[w] = ncomp;
                        if (w == v)
                            break;
                    }
                    ++ncomp;
                }
                call.pop_back();
                if (!call.empty())
                    low[call.back().v] = std::min(low[call.back().v], low[v]);
            }
        }
    }
    // Renumber components by first appearance in state order.
    std::vector<int> remap(ncomp, -1);
    int next = 0;
    for (int v = 0; v < n; ++v)
        if (remap[comp[v]] == -1)
            remap[comp[v]] = next++;
    for (int v = 0; v < n; ++v)
        comp[v] = remap[comp[v]];
    if (count)
        *count = ncomp;
    return comp;
}

std::vector<int> unreachable_states(const std::vector<std::vector<int>> &adj,
                                    const std::vector<char> &goal) {
    const int n = static_cast<int>(adj.size());
    // Backward BFS from the goal set over reversed edges.
    std::vector<std::vector<int>> radj(n);
    for (int v = 0; v < n; ++v)
        for (int w : adj[v])
            radj[w].push_back(v);
    std::vector<char> seen(n, 0);
    std::vector<int> queue;
    for (int v = 0; v < n; ++v)
        if (goal[v]) {
            seen[v] = 1;
            queue.push_back(v);
        }
    for (size_t qi = 0; qi < queue.size(); ++qi)
        for (int w : radj[queue[qi]])
            if (!seen[w]) {
                seen[w] = 1;
                queue.push_back(w);
            }
    std::vector<int> bad;
    for (int v = 0; v < n; ++v)
        if (!seen[v])
            bad.push_back(v);
    return bad;
}

} // namespace kernels

// --- ChainSpec ---------------------------------------------------------------

ChainSpec::ChainSpec(std::vector<std::string> states, std::vector<Edge> edges)
    : states_(std::move(states)), edges_(std::move(edges)) {
    const int n = num_states();
    if (n == 0)
        throw ValidationError("chain needs at least one state");
    {
        auto sorted = states_;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw ValidationError("duplicate state name");
    }
    edge_lookup_.assign(static_cast<size_t>(n) * n, -1);
    for (size_t k = 0; k < edges_.size(); ++k) {
        const Edge &e = edges_[k];
        if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n)
            throw ValidationError("edge endpoint is not a declared state");
        if (e.from == e.to)
            throw ValidationError("self-loop edge " + states_[e.from] + "->" + states_[e.to]);
        if (!(e.rate > 0.0) || !std::isfinite(e.rate))
            throw ValidationError("edge " + states_[e.from] + "->" + states_[e.to] +
                                  " must have a finite positive rate");
        int &slot = edge_lookup_[static_cast<size_t>(e.from) * n + e.to];
        if (slot != -1)
            throw ValidationError("duplicate edge " + states_[e.from] + "->" + states_[e.to]);
        slot = static_cast<int>(k);
    }
}

ChainSpec ChainSpec::from_named_edges(
    std::vector<std::string> states,
    const std::vector<std::tuple<std::string, std::string, double>> &edges) {
    std::map<std::string, int> ix;
    for (size_t i = 0; i < states.size(); ++i)
        ix[states[i]] = static_cast<int>(i);
    std::vector<Edge> es;
    es.reserve(edges.size());
    for (const auto &[f, t, r] : edges) {
        auto fi = ix.find(f), ti = ix.find(t);
        if (fi == ix.end() || ti == ix.end())
            throw ValidationError("edge endpoint '" + (fi == ix.end() ? f : t) + "' is not a declared state");
        es.push_back({fi->second, ti->second, r});
    }
    return ChainSpec(std::move(states), std::move(es));
}

int ChainSpec::state_index(const std::string &name) const {
    for (int i = 0; i < num_states(); ++i)
        if (states_[i] == name)
            return i;
    throw ValidationError("unknown state '" + name + "'");
}

int ChainSpec::edge_index(int from, int to) const {
    if (from < 0 || to < 0 || from >= num_states() || to >= num_states())
        return -1;
    return edge_lookup_[static_cast<size_t>(from) * num_states() + to];
}

double ChainSpec::rate(int from, int to) const {
    int k = edge_index(from, to);
    return k < 0 ? 0.0 : edges_[k].rate;
}

Mat<double> ChainSpec::rate_matrix() const {
    Mat<double> r(num_states(), num_states());
    for (const auto &e : edges_)
        r(e.from, e.to) = e.rate;
    return r;
}

// --- ParamChainSpec ----------------------------------------------------------

ParamChainSpec::ParamChainSpec(std::vector<std::string> states, std::vector<ParamEdge> edges)
    : states_(std::move(states)), edges_(std::move(edges)) {
    for (const auto &e : edges_) {
        if (!(e.coeff > 0.0) || !std::isfinite(e.coeff))
            throw ValidationError("parametrized edge must have a positive coefficient");
        if (e.exponent.value() < 0.0)
            throw ValidationError("parametrized edge exponent must be nonnegative");
    }
    // Delegate the structural checks (duplicates, endpoints, self-loops).
    std::vector<Edge> probe;
    probe.reserve(edges_.size());
    for (const auto &e : edges_)
        probe.push_back({e.from, e.to, e.coeff});
    ChainSpec check(states_, probe);
}

int ParamChainSpec::state_index(const std::string &name) const {
    for (int i = 0; i < num_states(); ++i)
        if (states_[i] == name)
            return i;
    throw ValidationError("unknown state '" + name + "'");
}

bool ParamChainSpec::is_fixed() const {
    return std::all_of(edges_.begin(), edges_.end(),
                       [](const ParamEdge &e) { return e.exponent.is_zero(); });
}

ChainSpec ParamChainSpec::instantiate(double n) const {
    if (!(n >= 1.0))
        throw ValidationError("instantiate requires n >= 1");
    std::vector<Edge> es;
    es.reserve(edges_.size());
    for (const auto &e : edges_)
        es.push_back({e.from, e.to, e.coeff * std::pow(n, -e.exponent.value())});
    return ChainSpec(states_, std::move(es));
}

ChainSpec ParamChainSpec::limit_chain() const {
    std::vector<Edge> es;
    for (const auto &e : edges_)
        if (e.exponent.is_zero())
            es.push_back({e.from, e.to, e.coeff});
    if (es.empty())
        throw EmptyLimit("limit chain has no surviving edges");
    return ChainSpec(states_, std::move(es));
}

// --- ProbabilityVector --------------------------------------------------------

ProbabilityVector::ProbabilityVector(std::vector<double> weights) : w_(std::move(weights)) {
    if (w_.empty())
        throw ValidationError("empty probability vector");
    double total = 0.0;
    for (double v : w_) {
        if (v < 0.0 || !std::isfinite(v))
            throw ValidationError("probability vector has a negative or non-finite weight");
        total += v;
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw ValidationError("probability vector does not sum to 1 (off by " +
                              std::to_string(total - 1.0) + ")");
}

ProbabilityVector ProbabilityVector::dirac(int n, int state) {
    std::vector<double> w(n, 0.0);
    w.at(state) = 1.0;
    return ProbabilityVector(std::move(w));
}

ProbabilityVector ProbabilityVector::uniform(int n) {
    return ProbabilityVector(std::vector<double>(n, 1.0 / n));
}

ProbabilityVector ProbabilityVector::normalized(std::vector<double> weights) {
    double total = 0.0;
    for (double v : weights) {
        if (v < 0.0 || !std::isfinite(v))
            throw ValidationError("cannot normalize negative weights");
        total += v;
    }
    if (!(total > 0.0))
        throw ValidationError("cannot normalize the zero measure");
    for (double &v : weights)
        v /= total;
    return ProbabilityVector(std::move(weights));
}

double ProbabilityVector::mass(const std::vector<int> &states) const {
    double s = 0.0;
    for (int i : states)
        s += w_.at(i);
    return s;
}

ProbabilityVector conditioned_on(const ProbabilityVector &pi, const std::vector<int> &subset) {
    std::vector<double> w(pi.size(), 0.0);
    for (int i : subset)
        w.at(i) = pi[i];
    return ProbabilityVector::normalized(std::move(w));
}

// --- operations ----------------------------------------------------------------

std::vector<double> holding_rates(const ChainSpec &chain) {
    std::vector<double> lam(chain.num_states(), 0.0);
    for (const auto &e : chain.edges())
        lam[e.from] += e.rate;
    return lam;
}

std::vector<double> apply_generator(const ChainSpec &chain, const std::vector<double> &f) {
    if (static_cast<int>(f.size()) != chain.num_states())
        throw ValidationError("apply_generator: f must be defined on all states");
    std::vector<double> g(chain.num_states(), 0.0);
    for (const auto &e : chain.edges())
        g[e.from] += e.rate * (f[e.to] - f[e.from]);
    return g;
}

ClassDecomposition class_decomposition(const ChainSpec &chain) {
    const int n = chain.num_states();
    std::vector<std::vector<int>> adj(n);
    for (const auto &e : chain.edges())
        adj[e.from].push_back(e.to);
    int ncomp = 0;
    auto comp = kernels::scc_components(adj, &ncomp);
    std::vector<char> closed(ncomp, 1);
    for (const auto &e : chain.edges())
        if (comp[e.from] != comp[e.to])
            closed[comp[e.from]] = 0;
    ClassDecomposition out;
    std::vector<std::vector<int>> members(ncomp);
    for (int v = 0; v < n; ++v)
        members[comp[v]].push_back(v);
    for (int c = 0; c < ncomp; ++c) {
        if (closed[c])
            out.closed_classes.push_back(members[c]);
        else
            out.transient.insert(out.transient.end(), members[c].begin(), members[c].end());
    }
    std::sort(out.transient.begin(), out.transient.end());
    return out;
}

bool is_irreducible(const ChainSpec &chain) {
    auto d = class_decomposition(chain);
    return d.closed_classes.size() == 1 && d.transient.empty();
}

ProbabilityVector stationary_distribution(const ChainSpec &chain) {
    if (!is_irreducible(chain))
        throw NotIrreducible("stationary_distribution requires an irreducible chain");
    auto pi = gth_stationary(chain.rate_matrix());
    return ProbabilityVector(std::move(pi));
}

ProbabilityVector stationary_by_arborescences(const ChainSpec &chain) {
    const int n = chain.num_states();
    if (n > 8)
        throw ValidationError("arborescence enumeration is enabled only for |V| <= 8");
    if (!is_irreducible(chain))
        throw NotIrreducible("stationary_by_arborescences requires an irreducible chain");

    // For each root, every other vertex picks one outgoing edge; keep the
    // assignment iff it is acyclic (all paths then lead to the root).
    std::vector<std::vector<std::pair<int, double>>> out(n);
    for (const auto &e : chain.edges())
        out[e.from].push_back({e.to, e.rate});

    std::vector<double> weight(n, 0.0);
    std::vector<int> choice(n, -1);
    for (int root = 0; root < n; ++root) {
        std::vector<int> order;
        for (int v = 0; v < n; ++v)
            if (v != root)
                order.push_back(v);
        std::fill(choice.begin(), choice.end(), -1);

        auto closes_cycle = [&](int v, int w) {
            for (int cur = w; cur != root; cur = choice[cur]) {
                if (cur == v)
                    return true;
                if (choice[cur] == -1)
                    return false;
            }
            return false;
        };
        std::function<void(size_t, double)> rec = [&](size_t depth, double prod) {
            if (depth == order.size()) {
                weight[root] += prod;
                return;
            }
            int v = order[depth];
            for (auto [w, r] : out[v]) {
                if (closes_cycle(v, w))
                    continue;
                choice[v] = w;
                rec(depth + 1, prod * r);
                choice[v] = -1;
            }
        };
        rec(0, 1.0);
    }
    return ProbabilityVector::normalized(std::move(weight));
}

std::vector<double> hitting_probability(const ChainSpec &chain, const std::vector<int> &target,
                                        const std::vector<int> &avoid) {
    const int n = chain.num_states();
    if (target.empty())
        throw ValidationError("hitting_probability: empty target");
    auto t = mask_of(n, target, "target");
    auto a = mask_of(n, avoid, "avoid");
    for (int i = 0; i < n; ++i)
        if (t[i] && a[i])
            throw ValidationError("hitting_probability: target and avoid overlap");
    return kernels::hitting_probability(chain.rate_matrix(), t, a);
}

double capacity(const ChainSpec &chain, const std::vector<int> &a_set, const std::vector<int> &b_set) {
    const int n = chain.num_states();
    if (a_set.empty() || b_set.empty())
        throw ValidationError("capacity: sets must be nonempty");
    auto a = mask_of(n, a_set, "A");
    auto b = mask_of(n, b_set, "B");
    for (int i = 0; i < n; ++i)
        if (a[i] && b[i])
            throw ValidationError("capacity: sets must be disjoint");
    auto pi = stationary_distribution(chain);
    return kernels::capacity_from_pi(chain.rate_matrix(), pi.weights(), a, b);
}

ChainSpec trace_chain(const ChainSpec &chain, const std::vector<int> &keep) {
    const int n = chain.num_states();
    if (keep.empty())
        throw ValidationError("trace_chain: kept set must be nonempty");
    auto mask = mask_of(n, keep, "keep");
    auto traced = kernels::trace_rates(chain.rate_matrix(), mask);
    std::vector<int> kept_sorted;
    for (int i = 0; i < n; ++i)
        if (mask[i])
            kept_sorted.push_back(i);
    std::vector<std::string> names;
    names.reserve(kept_sorted.size());
    for (int i : kept_sorted)
        names.push_back(chain.state_name(i));
    std::vector<Edge> es;
    for (size_t a = 0; a < kept_sorted.size(); ++a)
        for (size_t b = 0; b < kept_sorted.size(); ++b) {
            if (a == b)
                continue;
            double r = traced(kept_sorted[a], kept_sorted[b]);
            if (r > 0.0)
                es.push_back({static_cast<int>(a), static_cast<int>(b), r});
        }
    return ChainSpec(std::move(names), std::move(es));
}

std::vector<double> mean_hitting_time(const ChainSpec &chain, const std::vector<int> &target) {
    const int n = chain.num_states();
    if (target.empty())
        throw ValidationError("mean_hitting_time: empty target");
    return kernels::mean_hitting_time(chain.rate_matrix(), mask_of(n, target, "target"));
}

} // namespace mcld
