#ifndef MCLD_IDENTIFY_HPP
#define MCLD_IDENTIFY_HPP

// Recovery of chain parameters from black-box rate-functional oracles (values
// only, no gradients), and the two counterexamples showing the hypotheses
// are sharp: the measure functional cannot see the orientation of a
// non-reversible cycle, and the measure-current functional cannot see where
// a transient state attaches.

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mcld/chain.hpp"
#include "mcld/flows.hpp"

namespace mcld {

/// Black-box evaluator of the measure rate functional of a hidden chain.
struct DvOracle {
    std::vector<std::string> states;
    std::function<double(const std::vector<double> &)> eval; // weights aligned to states
};

/// Black-box evaluator of the measure-current rate functional; the graph
/// structure (edge list) is part of the oracle's signature, its rates are not.
struct BfgOracle {
    std::vector<std::string> states;
    std::vector<std::pair<int, int>> edges;
    std::function<double(const std::vector<double> &, const std::vector<double> &)> eval;
};

DvOracle make_dv_oracle(const ChainSpec &hidden);
BfgOracle make_bfg_oracle(const ChainSpec &hidden);

struct HoldingAndProducts {
    std::vector<double> lambda;  // lambda(z) = oracle(delta_z)
    Mat<double> products;        // R(x,y) R(y,x), symmetric, zero diagonal
};

/// Holding rates from Dirac evaluations and the symmetric rate products from
/// the two-point mixture identity at theta = 1/2.  Throws NegativeRoot when
/// an evaluation exceeds the mean of the holding rates beyond tolerance.
HoldingAndProducts recover_holding_and_products(const DvOracle &oracle, double tol = 1e-7);

/// Connected components of the product-positivity graph; for reversible
/// hidden chains these are the closed classes.
std::vector<std::vector<int>> classes_from_products(const HoldingAndProducts &hp,
                                                    double threshold = 1e-6);

/// Per-class stationary profiles, found by minimizing the oracle over each
/// class simplex (the zero set of the functional).  Returned as measures on
/// the full state set supported on one class each.
std::vector<ProbabilityVector> recover_stationary_profiles(const DvOracle &oracle,
                                                           const std::vector<std::vector<int>> &classes);

/// Full rate recovery for a reversible hidden chain:
/// R(x,y)^2 = (pi(y)/pi(x)) R(x,y) R(y,x) by detailed balance.
ChainSpec recover_reversible(const DvOracle &oracle);

/// Full rate recovery from the measure-current functional when every state
/// is recurrent: per class, locate the zero (pi_j, J*) of the functional by
/// joint convex minimization and read off R(x,y) = J*(x,y)/pi_j(x).
ChainSpec recover_from_bfg(const BfgOracle &oracle);

/// Largest deviation between the functional of a candidate chain and the
/// oracle over Dirac and pairwise-mixture probes; a recovered chain that
/// cannot reproduce the oracle signals a violated hypothesis.
double oracle_deviation(const ChainSpec &candidate, const DvOracle &oracle);

struct CounterexampleDvReport {
    int grid_points = 0;
    double max_orientation_gap = 0.0; // |I_fwd - I_rev| over the simplex grid
    double max_closed_form_gap = 0.0; // against 1 - 3 (mu_a mu_b mu_c)^{1/3}
};

/// Both orientations of the unit-rate 3-cycle have the same measure rate
/// functional, matching the product closed form.
CounterexampleDvReport counterexample_dv(int resolution = 20);

struct CounterexampleBfgReport {
    int samples = 0;
    double max_gap = 0.0;             // |I - I'| over sampled (mu, J)
    double max_formula_gap = 0.0;     // against 2 mu_a + Phi(t,mu_b) + Phi(t,mu_c)
    bool infinite_controls_agree = false;
};

/// The two chains differing only in where the transient state a attaches
/// have identical measure-current functionals.
CounterexampleBfgReport counterexample_bfg(int samples = 200, uint64_t seed = 2024);

} // namespace mcld

#endif
