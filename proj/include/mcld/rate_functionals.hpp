#ifndef MCLD_RATE_FUNCTIONALS_HPP
#define MCLD_RATE_FUNCTIONALS_HPP

// The measure and measure-current large deviations rate functionals of a
// finite-state chain, evaluated through two convex programs:
//
//   variational   sup_H  G(mu, H),  G(mu,H) = sum mu(x) R(x,y) (1 - e^{H(y)-H(x)})
//   projection    inf { Upsilon(mu, J) : J divergence-free }
//
// plus the exponential tilt machinery connecting them (H_mu, tilted chains,
// optimal currents, and the inverse map).  Values live in [0, +inf]; +inf is
// represented by the double infinity and serialized as "inf".

#include <limits>
#include <vector>

#include "mcld/chain.hpp"
#include "mcld/flows.hpp"

namespace mcld {

inline constexpr double infinite_rate = std::numeric_limits<double>::infinity();

/// Poisson cost Phi(q, p): p when q = 0; q log(q/p) - (q - p) when both
/// positive; +inf when q > 0 and p = 0.  Convex in q, vanishing only at q = p.
double phi(double q, double p);

/// Upsilon_{E,R}(mu, J) = sum over edges of Phi(J(x,y), mu(x) R(x,y)).
double upsilon(const ChainSpec &chain, const ProbabilityVector &mu, const Flow &flow);

/// Measure-current rate functional: Upsilon when J is divergence-free
/// (tolerance 1e-12), +inf otherwise.
double bfg_rate(const ChainSpec &chain, const ProbabilityVector &mu, const Flow &flow,
                double div_tol = 1e-12);

/// H normalized so that H(x0) = 0 at the first declared state.
using TiltField = std::vector<double>;

struct SolverOptions {
    double grad_tol = 1e-10; // sup-norm of the tilted-current divergence
    double kkt_tol = 1e-8;   // reduced-gradient sup-norm of the projection
    int max_iterations = 200;
};

/// G(mu, H); the inner functional of the variational form.
double tilt_value(const ChainSpec &chain, const ProbabilityVector &mu, const TiltField &h);

/// The maximizer H_mu of G(mu, .) for strictly positive mu on an irreducible
/// chain; equivalently, the unique tilt making mu stationary.  Damped Newton
/// from H = 0.
TiltField tilt_solver(const ChainSpec &chain, const ProbabilityVector &mu,
                      const SolverOptions &opts = {});

/// sup form of the Donsker-Varadhan functional (interior mu only).
double dv_rate_variational(const ChainSpec &chain, const ProbabilityVector &mu,
                           const SolverOptions &opts = {});

struct ProjectionResult {
    double value = 0.0;
    Flow minimizer{std::vector<double>{}};
    double kkt_residual = 0.0;
    int iterations = 0;
};

/// inf form: minimizes Upsilon(mu, .) over the divergence-free cone.  Edges
/// out of zero-mass states are forced to 0 (the Phi(.,0) barrier), the rest
/// reduces to smooth equality-constrained Newton per strongly connected
/// component of the remaining graph.  Works for boundary mu and for
/// reducible chains.
ProjectionResult dv_rate_projection(const ChainSpec &chain, const ProbabilityVector &mu,
                                    const SolverOptions &opts = {});

/// Projection-backed evaluation (valid on the whole simplex).
double dv_rate(const ChainSpec &chain, const ProbabilityVector &mu, const SolverOptions &opts = {});

/// R_H(x,y) = R(x,y) exp(H(y) - H(x)).
ChainSpec tilted_chain(const ChainSpec &chain, const TiltField &h);

/// J*_mu(x,y) = mu(x) R(x,y) exp(H_mu(y) - H_mu(x)); the unique
/// divergence-free minimizer of the measure-current functional at mu.
Flow optimal_current(const ChainSpec &chain, const ProbabilityVector &mu,
                     const SolverOptions &opts = {});

/// Stationary state of the chain tilted by H; inverse of mu -> H_mu.
ProbabilityVector tilt_inverse(const ChainSpec &chain, const TiltField &h);

} // namespace mcld

#endif
