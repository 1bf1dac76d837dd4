#ifndef MCLD_FLOWS_HPP
#define MCLD_FLOWS_HPP

// Nonnegative flows on a chain's directed edge set: divergence, induced
// currents, cycle decomposition, and the class-structure decomposition of
// divergence-free flows on a limit edge set.

#include <vector>

#include "mcld/chain.hpp"

namespace mcld {

/// A nonnegative function on the edge universe of a chain, indexed in the
/// chain's declared edge order.  Omitted edges carry 0.
class Flow {
public:
    explicit Flow(std::vector<double> values); // validates nonnegativity
    static Flow zero(const ChainSpec &chain);

    int size() const { return static_cast<int>(v_.size()); }
    double operator[](int e) const { return v_[e]; }
    const std::vector<double> &values() const { return v_; }

private:
    std::vector<double> v_;
};

struct Cycle {
    std::vector<int> edge_indices; // distinct, consecutive, closed
    double amplitude = 0.0;        // > 0
};

/// (div J)(x) = sum_y J(x,y) - sum_y J(y,x); the entries always sum to 0.
std::vector<double> divergence(const ChainSpec &chain, const Flow &flow);

double divergence_sup_norm(const ChainSpec &chain, const Flow &flow);

bool is_divergence_free(const ChainSpec &chain, const Flow &flow, double tol = 1e-12);

/// J_{mu,R}(x,y) = mu(x) R(x,y).
Flow induced_current(const ChainSpec &chain, const ProbabilityVector &mu);

/// Peels cycles off a divergence-free flow: repeatedly pick the positive
/// edge of minimum value (first in declared order on ties), follow positive
/// edges depth-first (declared order) back to its tail, subtract.  Each peel
/// removes at least one positive edge, so at most |E| cycles come out and
/// their sum reconstructs the input.
std::vector<Cycle> cycle_decomposition(const ChainSpec &chain, const Flow &flow, double tol = 1e-12);

Flow flow_of_cycles(const ChainSpec &chain, const std::vector<Cycle> &cycles);

/// Mutual-reachability equivalence classes of the chain's positivity graph
/// (SCCs), in first-appearance order.
std::vector<std::vector<int>> equivalence_classes(const ChainSpec &chain);

/// Splits a divergence-free flow on a limit chain into its per-class
/// components (closed classes and transient classes alike).  Throws
/// CrossClassFlow if the flow is positive on an edge joining two classes.
std::vector<Flow> class_structure_decomposition(const ChainSpec &chain, const Flow &flow,
                                                double div_tol = 1e-12);

/// Fundamental cycle basis of the kernel of the divergence operator on the
/// given directed edge list (entries in {-1, 0, +1}, one vector per
/// independent undirected cycle).
std::vector<std::vector<double>> cycle_basis(int num_states,
                                             const std::vector<std::pair<int, int>> &edges);

} // namespace mcld

#endif
