#ifndef MCLD_HIERARCHY_HPP
#define MCLD_HIERARCHY_HPP

// The metastable tree of a scale-parametrized family: per-level wells,
// time-scales theta_n (via capacities over an n-grid), reduced inter-well
// chains (trace + stationary lumping, rescaled by theta_n), recurrent-class
// coarsening, and the level measures.
//
// The grid evaluations run in double-double arithmetic by default: the
// capacities at large n involve solves whose conditioning grows like powers
// of n, which plain doubles cannot carry across the default grid 2^6..2^16.

#include <optional>
#include <vector>

#include "mcld/chain.hpp"

namespace mcld {

struct AsymptoticScale {
    double coefficient = 0.0; // theta_n ~ coefficient * n^exponent
    double exponent = 0.0;
    double fit_residual = 0.0; // max |log residual| of the fit
};

struct NGrid {
    double base = 2.0;
    int exp_lo = 6;
    int exp_hi = 16;

    std::vector<double> values() const;
};

struct HierarchyOptions {
    NGrid grid{};
    int precision_bits = 106;       // 106 = double-double, 53 = plain double
    double fit_residual_tol = 0.05; // DegenerateFit above this (log units)
    double flat_band = 0.1;         // |exponent| below this is a constant rate
};

struct HierarchyLevel {
    int index = 1;                              // p, starting at 1
    std::vector<std::vector<int>> wells;        // state indices per well
    std::vector<int> transient;                 // Delta_p
    std::vector<ProbabilityVector> level_measures; // pi^(p)_j on V
    // Present on levels 1..q, absent on the terminal level:
    std::optional<AsymptoticScale> timescale;   // theta^(p)_n
    std::optional<ChainSpec> reduced_chain;     // on well labels "1".."k"
};

struct MetastableTree {
    std::vector<HierarchyLevel> levels; // levels[p-1] holds level p
    bool terminal = false;              // single recurrent class reached

    int depth() const { return static_cast<int>(levels.size()) - 1; } // q
};

/// Least-squares fit value ~ coefficient * n^exponent on log-log axes.
/// Needs at least 4 samples with positive entries; DegenerateFit when the
/// max log-residual exceeds the tolerance.
AsymptoticScale fit_scale(const std::vector<std::pair<double, double>> &samples,
                          double residual_tol = 0.05);

/// Raw per-n time-scale 1/theta_n = sum_i Cap_n(W_i, complement)/pi_n(W_i)
/// over the grid.  Exposed for the gamma probes.
std::vector<std::pair<double, double>> timescale_samples(const ParamChainSpec &family,
                                                         const std::vector<std::vector<int>> &wells,
                                                         const HierarchyOptions &opts = {});

/// Fitted time-scale of the partition (needs >= 2 wells).
AsymptoticScale level_timescale(const ParamChainSpec &family,
                                const std::vector<std::vector<int>> &wells,
                                const HierarchyOptions &opts = {});

/// The inter-well chain at scale theta_n: trace on the union of wells, lump
/// each well by its conditioned stationary weights, multiply by theta_n and
/// fit each entry over the grid.  Rates with negative fitted exponent
/// vanish; a surviving rate must be asymptotically constant.  Throws
/// AllRatesVanish when nothing survives.
ChainSpec reduced_chain(const ParamChainSpec &family, const std::vector<std::vector<int>> &wells,
                        const HierarchyOptions &opts = {});

struct Coarsening {
    std::vector<std::vector<int>> wells;     // level p+1 wells (state indices)
    std::vector<int> transient;              // Delta_{p+1}
    std::vector<std::vector<int>> label_classes; // recurrent classes of reduced labels
};

/// Merges wells along the recurrent classes of the reduced chain; wells of
/// transient labels join the transient set.  Throws NotCoarser if nothing
/// changed (violates the strict-coarsening property of the construction).
Coarsening coarsen(const ChainSpec &reduced, const std::vector<std::vector<int>> &wells,
                   const std::vector<int> &transient);

/// pi^(p+1)_m = sum_{j in class m} M_m(j) pi^(p)_j with M_m the stationary
/// state of the reduced chain restricted to the class.
std::vector<ProbabilityVector> level_measures(const std::vector<ProbabilityVector> &previous,
                                              const ChainSpec &reduced,
                                              const std::vector<std::vector<int>> &label_classes);

/// Full tree construction, iterating until a single recurrent class remains.
MetastableTree build_tree(const ParamChainSpec &family, const HierarchyOptions &opts = {});

} // namespace mcld

#endif
