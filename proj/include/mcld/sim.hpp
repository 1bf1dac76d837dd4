#ifndef MCLD_SIM_HPP
#define MCLD_SIM_HPP

// Exact stochastic simulation of the chain (competing exponential clocks, no
// discretization) and empirical measure / empirical flow extraction.  The
// RNG is an explicitly seeded xoshiro256++ driven through inverse-CDF
// sampling, so trajectories are bit-stable across platforms.

#include <cstdint>
#include <utility>
#include <vector>

#include "mcld/chain.hpp"
#include "mcld/flows.hpp"

namespace mcld {

struct Trajectory {
    int initial = 0;
    std::vector<std::pair<double, int>> jumps; // (jump time, destination), increasing
    double horizon = 0.0;
};

/// Simulates the chain started at x0 up to time T.  Throws AbsorbingState if
/// the path reaches a state with no outgoing edges before the horizon.
Trajectory sample_path(const ChainSpec &chain, int x0, double horizon, uint64_t seed);

/// Empirical measure L_T (occupation fractions) and empirical flow Q_T
/// (jump counts over T) of a trajectory.
std::pair<ProbabilityVector, Flow> empirical_pair(const ChainSpec &chain, const Trajectory &traj);

struct VarianceEstimate {
    double estimate = 0.0;  // replica variance of T^{-1/2} int_0^T f(X_s) ds
    double std_error = 0.0; // standard error of that variance estimate
    int replicas = 0;
};

/// Monte Carlo estimate of the CLT asymptotic variance of a pi-mean-zero
/// observable; each replica starts from an independent pi-distributed state
/// and uses a sub-seed derived from the master seed.
VarianceEstimate variance_estimate(const ChainSpec &chain, const std::vector<double> &f,
                                   double horizon, int replicas, uint64_t seed);

} // namespace mcld

#endif
