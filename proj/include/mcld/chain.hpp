#ifndef MCLD_CHAIN_HPP
#define MCLD_CHAIN_HPP

// Finite-state continuous-time Markov chains and scale-parametrized rate
// families: representation, generator, stationary states, class structure,
// hitting probabilities, capacities and trace chains.

#include <string>
#include <tuple>
#include <vector>

#include "mcld/numerics.hpp"

namespace mcld {

struct Edge {
    int from = -1;
    int to = -1;
    double rate = 0.0; // 1/time, strictly positive
};

/// A fixed chain: ordered states and a list of directed edges with positive
/// rates.  Absent edges are absent, never rate zero.  Self-loops and
/// duplicate (from, to) pairs are rejected.  The declared edge order is
/// preserved; flows index into it.
class ChainSpec {
public:
    ChainSpec(std::vector<std::string> states, std::vector<Edge> edges);

    static ChainSpec from_named_edges(std::vector<std::string> states,
                                      const std::vector<std::tuple<std::string, std::string, double>> &edges);

    int num_states() const { return static_cast<int>(states_.size()); }
    const std::vector<std::string> &states() const { return states_; }
    const std::string &state_name(int i) const { return states_[i]; }
    int state_index(const std::string &name) const; // throws ValidationError when absent

    const std::vector<Edge> &edges() const { return edges_; }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int edge_index(int from, int to) const; // -1 when absent
    double rate(int from, int to) const;    // 0 when absent

    Mat<double> rate_matrix() const;

private:
    std::vector<std::string> states_;
    std::vector<Edge> edges_;
    std::vector<int> edge_lookup_; // n*n -> edge index or -1
};

struct ParamEdge {
    int from = -1;
    int to = -1;
    double coeff = 0.0;    // > 0
    Rational exponent{0};  // >= 0;  R_n = coeff * n^(-exponent)
};

/// A family R_n(x,y) = coeff(x,y) * n^(-k(x,y)) with rational k >= 0.  The
/// edge set does not depend on n, and all products of rates are monomials in
/// n, so every pair of them is comparable.
class ParamChainSpec {
public:
    ParamChainSpec(std::vector<std::string> states, std::vector<ParamEdge> edges);

    int num_states() const { return static_cast<int>(states_.size()); }
    const std::vector<std::string> &states() const { return states_; }
    const std::vector<ParamEdge> &edges() const { return edges_; }
    int state_index(const std::string &name) const;
    bool is_fixed() const; // all exponents zero

    /// Substitutes a finite n >= 1.
    ChainSpec instantiate(double n) const;

    /// Keeps exactly the exponent-zero edges at their coefficients.
    /// Throws EmptyLimit when no edge survives.
    ChainSpec limit_chain() const;

    /// Rate matrix at n in the requested scalar (dd for the grid sweeps).
    template <class S> Mat<S> rate_matrix_at(S n) const {
        Mat<S> r(num_states(), num_states());
        for (const auto &e : edges_) {
            S v = S(e.coeff);
            if (!e.exponent.is_zero())
                v = v * exp(S(-e.exponent.value()) * log(n));
            r(e.from, e.to) = v;
        }
        return r;
    }

private:
    std::vector<std::string> states_;
    std::vector<ParamEdge> edges_;
};

/// A probability measure on a chain's state list (indexed like the states).
class ProbabilityVector {
public:
    explicit ProbabilityVector(std::vector<double> weights); // validates

    static ProbabilityVector dirac(int n, int state);
    static ProbabilityVector uniform(int n);
    static ProbabilityVector normalized(std::vector<double> weights);

    int size() const { return static_cast<int>(w_.size()); }
    double operator[](int i) const { return w_[i]; }
    const std::vector<double> &weights() const { return w_; }

    double mass(const std::vector<int> &states) const;

private:
    std::vector<double> w_;
};

struct ClassDecomposition {
    std::vector<std::vector<int>> closed_classes; // state indices, sorted
    std::vector<int> transient;                   // sorted
};

// --- chain_core operations --------------------------------------------------

/// lambda(x) = sum_y R(x,y); zero exactly on absorbing states.
std::vector<double> holding_rates(const ChainSpec &chain);

/// (L f)(x) = sum_y R(x,y) (f(y) - f(x)).
std::vector<double> apply_generator(const ChainSpec &chain, const std::vector<double> &f);

/// Unique stationary state of an irreducible chain, by GTH elimination
/// (subtraction-free, accurate entrywise).  Throws NotIrreducible.
ProbabilityVector stationary_distribution(const ChainSpec &chain);

/// Markov-chain tree theorem evaluation: pi(x) proportional to the total
/// weight of spanning arborescences rooted at x.  Exponential-cost recursive
/// enumeration, accepted only for |V| <= 8; used as an independent
/// cross-check of stationary_distribution.
ProbabilityVector stationary_by_arborescences(const ChainSpec &chain);

/// Closed irreducible classes (SCCs without outgoing edges) plus the
/// transient remainder.
ClassDecomposition class_decomposition(const ChainSpec &chain);

bool is_irreducible(const ChainSpec &chain);

/// h(x) = P_x[H_target < H_avoid], with h = 1 on target, 0 on avoid.
std::vector<double> hitting_probability(const ChainSpec &chain, const std::vector<int> &target,
                                        const std::vector<int> &avoid);

/// Cap(A,B) = sum_{x in A} pi(x) lambda(x) P_x[H_B < H_A^+] for an
/// irreducible chain and disjoint nonempty A, B.
double capacity(const ChainSpec &chain, const std::vector<int> &a_set, const std::vector<int> &b_set);

/// Trace of the chain on `keep`: deleted states are censored out and their
/// excursions folded into effective jump rates.
ChainSpec trace_chain(const ChainSpec &chain, const std::vector<int> &keep);

/// Expected time to reach `target` from each state.
std::vector<double> mean_hitting_time(const ChainSpec &chain, const std::vector<int> &target);

/// Stationary measure conditioned on a subset.
ProbabilityVector conditioned_on(const ProbabilityVector &pi, const std::vector<int> &subset);

} // namespace mcld

#endif
