#ifndef MCLD_CALCULUS_HPP
#define MCLD_CALCULUS_HPP

// Functional calculus of the Donsker-Varadhan rate functional: first and
// second derivatives in the measure, the derivative of the tilt map, the
// asymptotic variance of additive path functionals, the quadratic small-tilt
// limit, and the Legendre-duality identity at stationarity.

#include <vector>

#include "mcld/chain.hpp"
#include "mcld/rate_functionals.hpp"

namespace mcld {

/// A direction in measure space: entries sum to 0 (tolerance 1e-12).
class SignedMeasure {
public:
    explicit SignedMeasure(std::vector<double> values);

    int size() const { return static_cast<int>(v_.size()); }
    double operator[](int i) const { return v_[i]; }
    const std::vector<double> &values() const { return v_; }

private:
    std::vector<double> v_;
};

/// Generator, L^2(mu)-adjoint and symmetric part of the tilted dynamics at a
/// base point (chain, mu); mu is stationary for `generator` by construction.
struct OperatorBundle {
    std::vector<double> mu;
    TiltField h;             // H_mu
    Mat<double> generator;   // L_{H_mu}
    Mat<double> adjoint;     // L*_{H_mu} in L^2(mu)
    Mat<double> symmetric;   // (L + L*)/2
};

OperatorBundle make_operator_bundle(const ChainSpec &chain, const ProbabilityVector &mu,
                                    const SolverOptions &opts = {});

/// (delta I / delta mu)(mu; nu) = sum nu(x) R(x,y) [1 - e^{H_mu(y)-H_mu(x)}].
double first_derivative(const ChainSpec &chain, const ProbabilityVector &mu,
                        const SignedMeasure &nu, const SolverOptions &opts = {});

/// Derivative of mu -> H_mu in direction nu: (1/2) (L^s)^{-1} L* f with
/// f = d nu / d mu, normalized to vanish at the anchor state.
std::vector<double> tilt_derivative(const ChainSpec &chain, const ProbabilityVector &mu,
                                    const SignedMeasure &nu, const SolverOptions &opts = {});

/// (1/2) < f1, L (-L^s)^{-1} L* f2 >_mu; symmetric in the two directions.
double second_derivative(const ChainSpec &chain, const ProbabilityVector &mu,
                         const SignedMeasure &nu1, const SignedMeasure &nu2,
                         const SolverOptions &opts = {});

/// sigma^2(f) = 2 < L^{-1} f, (-L^s) L^{-1} f >_pi for pi-mean-zero f.
double asymptotic_variance(const ChainSpec &chain, const std::vector<double> &f);

struct QuadraticTiltReport {
    double limit = 0.0;  // Richardson-extrapolated eps^-2 I(pi_eps)
    double target = 0.0; // <(-L^s) H, H>_pi
    std::vector<std::pair<double, double>> rows; // (eps, value)
};

/// eps^-2 I(pi_eps) for pi_eps stationary under the eps H tilt, extrapolated
/// to eps = 0; converges to the Dirichlet-type quadratic form of H.
QuadraticTiltReport quadratic_tilt_limit(const ChainSpec &chain, const TiltField &h);

struct LegendreReport {
    double second_derivative_value = 0.0; // (d2 I)(pi; nu, nu)
    double legendre_value = 0.0;          // sup_h 2<f,h>_pi - sigma^2(h)
    double optimizer_value = 0.0;         // 2<f,h*> - sigma^2(h*) re-evaluated
    double rel_error = 0.0;
};

/// Checks (d2 I)(pi; nu, nu) = sup over pi-mean-zero h of 2<f,h>_pi -
/// sigma^2(h), computing the right side through the sigma^2 quadratic form.
LegendreReport legendre_check(const ChainSpec &chain, const SignedMeasure &nu);

} // namespace mcld

#endif
