#ifndef MCLD_GAMMA_HPP
#define MCLD_GAMMA_HPP

// The expansion functionals living on the limit structure of a family: the
// initial-scale functional (limit rates on the surviving edge set), the
// per-level functionals built from the reduced chains, the zero-set and
// hierarchy-of-zeros characterizations, and numeric probes of the pointwise
// and rescaled limits along an n-grid.
//
// Flows here live on the family's declared edge universe; entries on edges
// that vanish in the limit are allowed and charged +inf by the functionals.

#include <vector>

#include "mcld/chain.hpp"
#include "mcld/flows.hpp"
#include "mcld/hierarchy.hpp"

namespace mcld {

struct WellMixture {
    int level = 1;               // p
    std::vector<double> weights; // omega on the level-p wells, sums to 1
};

/// Limit rate per family edge (coefficient when the exponent is 0, else 0).
std::vector<double> limit_rates(const ParamChainSpec &family);

/// J_{mu, R0} on the family edge universe.
Flow limit_induced_current(const ParamChainSpec &family, const ProbabilityVector &mu);

/// Initial-scale functional: +inf unless J is divergence-free (1e-12) and
/// supported on the surviving edges; otherwise the Poisson cost against the
/// limit current.
double rate0(const ParamChainSpec &family, const ProbabilityVector &mu, const Flow &flow);

/// Zero-set test: mu is a mixture of the level-1 measures (weights read off
/// the well masses) and J is the induced limit current, both within tol.
bool zero_set_check_level0(const ParamChainSpec &family, const MetastableTree &tree,
                           const ProbabilityVector &mu, const Flow &flow, double tol = 1e-10);

/// Donsker-Varadhan functional of a reduced chain at a well mixture.
double dv_reduced(const ChainSpec &reduced, const std::vector<double> &omega);

/// Level-p functional: the reduced DV value at the well weights when mu is
/// exactly the level-p mixture and J its induced limit current; +inf
/// otherwise.  1 <= p <= tree.depth().
double rate_p(const ParamChainSpec &family, const MetastableTree &tree, int p,
              const ProbabilityVector &mu, const Flow &flow, double tol = 1e-9);

struct ZeroHierarchyReport {
    int checked = 0;
    int violations = 0;
    int finite_at_p = 0; // how many samples had a finite level-p value
};

/// Over the given samples, verifies that the level-p value is finite exactly
/// when the level-(p-1) value vanishes.
ZeroHierarchyReport
hierarchy_of_zeros_check(const ParamChainSpec &family, const MetastableTree &tree, int p,
                         const std::vector<std::pair<ProbabilityVector, Flow>> &samples,
                         double zero_tol = 1e-12);

struct PointwiseRow {
    double n = 0.0;
    double value = 0.0; // I_n(mu, J)
};

struct PointwiseReport {
    std::vector<PointwiseRow> rows;
    double target = 0.0; // the initial-scale value (possibly +inf)
};

/// I_n(mu, J) along the grid against the initial-scale target.
PointwiseReport pointwise_limit_probe(const ParamChainSpec &family, const ProbabilityVector &mu,
                                      const Flow &flow, const NGrid &grid = {});

struct GammaProbeRow {
    double n = 0.0;
    double theta = 0.0;
    double conditioned_value = 0.0; // theta_n * I_n at the conditioned mixture
    double recovery_value = 0.0;    // theta_n * I_n at the harmonic-profile candidate
};

struct GammaProbeReport {
    std::vector<GammaProbeRow> rows;
    double target = 0.0;            // reduced DV value at omega
    double recovery_rel_gap = 0.0;  // |recovery/target - 1| at the largest n
    double recovery_abs_gap = 0.0;
    bool liminf_ok = false;         // no candidate dips below target - 1e-2 at max n
};

/// Rescaled values theta_n I_n(nu_n, J*_n) = theta_n I_n(nu_n) along the
/// grid for two candidate sequences converging to the level-p mixture:
///   conditioned  nu_n = sum_j omega_j pi_n(.|W_j)   (zero on the transient set)
///   recovery     nu_n proportional to pi_n u_n^2 with u_n the harmonic lift
///                of sqrt(omega_j / pi_n(W_j)) between the wells.
/// The conditioned mixture pays the full boundary conductance of each well
/// and diverges whenever wells exit through vanishing edges; the recovery
/// candidate pays only the crossing cost and tracks the reduced DV value.
GammaProbeReport gamma_probe_level_p(const ParamChainSpec &family, const MetastableTree &tree,
                                     int p, const std::vector<double> &omega,
                                     const HierarchyOptions &opts = {});

} // namespace mcld

#endif
