#include "mcld/gamma.hpp"

#include <algorithm>
#include <cmath>

#include "mcld/chain_kernels.hpp"
#include "mcld/errors.hpp"
#include "mcld/rate_functionals.hpp"

namespace mcld {

std::vector<double> limit_rates(const ParamChainSpec &family) {
    std::vector<double> r;
    r.reserve(family.edges().size());
    for (const auto &e : family.edges())
        r.push_back(e.exponent.is_zero() ? e.coeff : 0.0);
    return r;
}

Flow limit_induced_current(const ParamChainSpec &family, const ProbabilityVector &mu) {
    if (mu.size() != family.num_states())
        throw ValidationError("limit_induced_current: measure is not on this family's states");
    auto r0 = limit_rates(family);
    std::vector<double> v(r0.size());
    for (size_t k = 0; k < r0.size(); ++k)
        v[k] = mu[family.edges()[k].from] * r0[k];
    return Flow(std::move(v));
}

namespace {

void check_universe(const ParamChainSpec &family, const ProbabilityVector &mu, const Flow &flow,
                    const char *who) {
    if (mu.size() != family.num_states())
        throw ValidationError(std::string(who) + ": measure is not on this family's states");
    if (flow.size() != static_cast<int>(family.edges().size()))
        throw ValidationError(std::string(who) + ": flow is not on this family's edge universe");
}

double divergence_sup(const ParamChainSpec &family, const Flow &flow) {
    std::vector<double> div(family.num_states(), 0.0);
    for (size_t k = 0; k < family.edges().size(); ++k) {
        div[family.edges()[k].from] += flow[static_cast<int>(k)];
        div[family.edges()[k].to] -= flow[static_cast<int>(k)];
    }
    double m = 0.0;
    for (double d : div)
        m = std::max(m, std::fabs(d));
    return m;
}

} // namespace

double rate0(const ParamChainSpec &family, const ProbabilityVector &mu, const Flow &flow) {
    check_universe(family, mu, flow, "rate0");
    if (divergence_sup(family, flow) > 1e-12)
        return infinite_rate;
    auto r0 = limit_rates(family);
    double total = 0.0;
    for (size_t k = 0; k < r0.size(); ++k) {
        if (r0[k] == 0.0) {
            if (flow[static_cast<int>(k)] > 0.0)
                return infinite_rate; // supported outside the limit edge set
            continue;
        }
        total += phi(flow[static_cast<int>(k)], mu[family.edges()[k].from] * r0[k]);
        if (std::isinf(total))
            return infinite_rate;
    }
    return total;
}

bool zero_set_check_level0(const ParamChainSpec &family, const MetastableTree &tree,
                           const ProbabilityVector &mu, const Flow &flow, double tol) {
    const auto &level = tree.levels.front();
    std::vector<double> mix(family.num_states(), 0.0);
    for (size_t j = 0; j < level.wells.size(); ++j) {
        double omega = mu.mass(level.wells[j]);
        for (int x = 0; x < family.num_states(); ++x)
            mix[x] += omega * level.level_measures[j][x];
    }
    for (int x = 0; x < family.num_states(); ++x)
        if (std::fabs(mix[x] - mu[x]) > tol)
            return false;
    auto jmu = limit_induced_current(family, mu);
    for (int k = 0; k < flow.size(); ++k)
        if (std::fabs(flow[k] - jmu[k]) > tol)
            return false;
    return true;
}

double dv_reduced(const ChainSpec &reduced, const std::vector<double> &omega) {
    return dv_rate(reduced, ProbabilityVector(omega));
}

double rate_p(const ParamChainSpec &family, const MetastableTree &tree, int p,
              const ProbabilityVector &mu, const Flow &flow, double tol) {
    if (p < 1 || p > tree.depth())
        throw ValidationError("rate_p: level out of range");
    const auto &level = tree.levels[p - 1];
    std::vector<double> omega;
    omega.reserve(level.wells.size());
    for (const auto &well : level.wells)
        omega.push_back(mu.mass(well));

    // mass on the transient set disqualifies a mixture immediately
    std::vector<double> mix(family.num_states(), 0.0);
    for (size_t j = 0; j < level.wells.size(); ++j)
        for (int x = 0; x < family.num_states(); ++x)
            mix[x] += omega[j] * level.level_measures[j][x];
    for (int x = 0; x < family.num_states(); ++x)
        if (std::fabs(mix[x] - mu[x]) > tol)
            return infinite_rate;

    auto jmu = limit_induced_current(family, mu);
    for (int k = 0; k < flow.size(); ++k)
        if (std::fabs(flow[k] - jmu[k]) > tol)
            return infinite_rate;

    double total = 0.0;
    for (double w : omega)
        total += w;
    std::vector<double> normalized(omega);
    for (double &w : normalized)
        w /= total;
    return dv_reduced(*level.reduced_chain, normalized);
}

ZeroHierarchyReport
hierarchy_of_zeros_check(const ParamChainSpec &family, const MetastableTree &tree, int p,
                         const std::vector<std::pair<ProbabilityVector, Flow>> &samples,
                         double zero_tol) {
    ZeroHierarchyReport rep;
    for (const auto &[mu, flow] : samples) {
        double vp = rate_p(family, tree, p, mu, flow);
        double prev = p == 1 ? rate0(family, mu, flow) : rate_p(family, tree, p - 1, mu, flow);
        bool finite = std::isfinite(vp);
        bool zero_below = std::isfinite(prev) && prev <= zero_tol;
        rep.checked += 1;
        rep.finite_at_p += finite ? 1 : 0;
        if (finite != zero_below)
            rep.violations += 1;
    }
    return rep;
}

PointwiseReport pointwise_limit_probe(const ParamChainSpec &family, const ProbabilityVector &mu,
                                      const Flow &flow, const NGrid &grid) {
    PointwiseReport rep;
    rep.target = rate0(family, mu, flow);
    for (double n : grid.values()) {
        ChainSpec chain = family.instantiate(n);
        rep.rows.push_back({n, bfg_rate(chain, mu, flow)});
    }
    return rep;
}

GammaProbeReport gamma_probe_level_p(const ParamChainSpec &family, const MetastableTree &tree,
                                     int p, const std::vector<double> &omega,
                                     const HierarchyOptions &opts) {
    if (p < 1 || p > tree.depth())
        throw ValidationError("gamma_probe_level_p: level out of range");
    const auto &level = tree.levels[p - 1];
    const auto &wells = level.wells;
    const int k = static_cast<int>(wells.size());
    if (static_cast<int>(omega.size()) != k)
        throw ValidationError("gamma_probe_level_p: omega size mismatch");
    ProbabilityVector omega_check(omega); // validates simplex membership

    GammaProbeReport rep;
    rep.target = dv_reduced(*level.reduced_chain, omega);

    const int n_states = family.num_states();
    std::vector<int> well_of(n_states, -1);
    for (int j = 0; j < k; ++j)
        for (int x : wells[j])
            well_of[x] = j;

    for (double n : opts.grid.values()) {
        // stationary state, well masses, time-scale and hitting profiles in dd
        Mat<dd> rates = family.rate_matrix_at<dd>(dd(n));
        std::vector<dd> pi = gth_stationary(rates);
        std::vector<dd> mass(k, dd(0));
        for (int x = 0; x < n_states; ++x)
            if (well_of[x] >= 0)
                mass[well_of[x]] += pi[x];
        dd inv_theta(0);
        std::vector<std::vector<dd>> hitting(k);
        for (int j = 0; j < k; ++j) {
            std::vector<char> a(n_states, 0), b(n_states, 0);
            for (int x : wells[j])
                a[x] = 1;
            for (int jj = 0; jj < k; ++jj)
                if (jj != j)
                    for (int x : wells[jj])
                        b[x] = 1;
            inv_theta += kernels::capacity_from_pi(rates, pi, a, b) / mass[j];
            hitting[j] = kernels::hitting_probability(rates, a, b); // 1 on W_j, 0 on others
        }
        double theta = to_double(dd(1) / inv_theta);

        // conditioned mixture: omega_j pi_n(.|W_j), zero on the transient set
        std::vector<double> cond(n_states, 0.0);
        for (int x = 0; x < n_states; ++x)
            if (well_of[x] >= 0)
                cond[x] = omega[well_of[x]] * to_double(pi[x] / mass[well_of[x]]);

        // harmonic recovery profile: nu ~ pi u^2, u = sum_j u_j h_j
        std::vector<double> recov(n_states, 0.0);
        std::vector<dd> uj(k);
        for (int j = 0; j < k; ++j)
            uj[j] = sqrt(dd(omega[j]) / mass[j]);
        for (int x = 0; x < n_states; ++x) {
            dd u(0);
            for (int j = 0; j < k; ++j)
                u += uj[j] * hitting[j][x];
            recov[x] = to_double(pi[x] * u * u);
        }

        ChainSpec chain = family.instantiate(n);
        double val_cond =
            theta * dv_rate_projection(chain, ProbabilityVector::normalized(cond)).value;
        double val_recov =
            theta * dv_rate_projection(chain, ProbabilityVector::normalized(recov)).value;
        rep.rows.push_back({n, theta, val_cond, val_recov});
    }

    const auto &last = rep.rows.back();
    rep.recovery_abs_gap = std::fabs(last.recovery_value - rep.target);
    rep.recovery_rel_gap = rep.recovery_abs_gap / std::max(rep.target, 1e-12);
    rep.liminf_ok = last.recovery_value >= rep.target - 1e-2 &&
                    last.conditioned_value >= rep.target - 1e-2;
    return rep;
}

} // namespace mcld
