#include "mcld/hierarchy.hpp"

#include <algorithm>
#include <cmath>

#include "mcld/chain_kernels.hpp"
#include "mcld/errors.hpp"

namespace mcld {

std::vector<double> NGrid::values() const {
    if (exp_hi - exp_lo + 1 < 4)
        throw ValidationError("n-grid needs at least 4 points");
    if (!(base > 1.0))
        throw ValidationError("n-grid base must exceed 1");
    std::vector<double> v;
    for (int k = exp_lo; k <= exp_hi; ++k)
        v.push_back(std::pow(base, k));
    return v;
}

AsymptoticScale fit_scale(const std::vector<std::pair<double, double>> &samples,
                          double residual_tol) {
    if (samples.size() < 4)
        throw ValidationError("fit_scale needs at least 4 samples");
    auto fit = loglog_least_squares(samples);
    if (fit.max_residual > residual_tol)
        throw DegenerateFit("scale fit residual " + std::to_string(fit.max_residual) +
                            " exceeds tolerance " + std::to_string(residual_tol));
    return {fit.coefficient, fit.exponent, fit.max_residual};
}

namespace {

struct LevelSamples {
    std::vector<double> ns;
    std::vector<double> theta;                       // raw per-n theta
    std::vector<Mat<double>> scaled_rates;           // theta_n * lumped rates
};

template <class S>
LevelSamples eval_level(const ParamChainSpec &family, const std::vector<std::vector<int>> &wells,
                        const NGrid &grid) {
    const int n_states = family.num_states();
    const int k = static_cast<int>(wells.size());
    std::vector<char> in_union(n_states, 0);
    std::vector<int> well_of(n_states, -1);
    for (int j = 0; j < k; ++j)
        for (int x : wells[j]) {
            in_union[x] = 1;
            well_of[x] = j;
        }

    LevelSamples out;
    for (double n : grid.values()) {
        Mat<S> rates = family.rate_matrix_at<S>(S(n));
        std::vector<S> pi = gth_stationary(rates);

        std::vector<S> well_mass(k, S(0));
        for (int x = 0; x < n_states; ++x)
            if (well_of[x] >= 0)
                well_mass[well_of[x]] += pi[x];

        S inv_theta(0);
        for (int j = 0; j < k; ++j) {
            std::vector<char> a(n_states, 0), b(n_states, 0);
            for (int x : wells[j])
                a[x] = 1;
            for (int jj = 0; jj < k; ++jj)
                if (jj != j)
                    for (int x : wells[jj])
                        b[x] = 1;
            S cap = kernels::capacity_from_pi(rates, pi, a, b);
            inv_theta += cap / well_mass[j];
        }
        S theta = S(1) / inv_theta;

        Mat<S> traced = kernels::trace_rates(rates, in_union);
        Mat<double> scaled(k, k);
        for (int j = 0; j < k; ++j)
            for (int jj = 0; jj < k; ++jj) {
                if (jj == j)
                    continue;
                S q(0);
                for (int x : wells[j]) {
                    S row(0);
                    for (int z : wells[jj])
                        row += traced(x, z);
                    q += (pi[x] / well_mass[j]) * row;
                }
                scaled(j, jj) = to_double(theta * q);
            }
        out.ns.push_back(n);
        out.theta.push_back(to_double(theta));
        out.scaled_rates.push_back(std::move(scaled));
    }
    return out;
}

LevelSamples eval_level_dispatch(const ParamChainSpec &family,
                                 const std::vector<std::vector<int>> &wells,
                                 const HierarchyOptions &opts) {
    if (wells.size() < 2)
        throw ValidationError("a level time-scale needs at least 2 wells");
    if (opts.precision_bits > 53)
        return eval_level<dd>(family, wells, opts.grid);
    return eval_level<double>(family, wells, opts.grid);
}

ChainSpec reduced_from_samples(const LevelSamples &samples, int k, const HierarchyOptions &opts) {
    std::vector<std::string> labels;
    for (int j = 0; j < k; ++j)
        labels.push_back(std::to_string(j + 1));
    std::vector<Edge> edges;
    for (int j = 0; j < k; ++j)
        for (int jj = 0; jj < k; ++jj) {
            if (jj == j)
                continue;
            std::vector<std::pair<double, double>> pair_samples;
            bool positive = true;
            for (size_t i = 0; i < samples.ns.size(); ++i) {
                double s = samples.scaled_rates[i](j, jj);
                if (!(s > 0.0)) {
                    positive = false;
                    break;
                }
                pair_samples.push_back({samples.ns[i], s});
            }
            if (!positive)
                continue; // the trace never connects these wells
            auto fit = loglog_least_squares(pair_samples);
            if (fit.exponent <= -opts.flat_band)
                continue; // vanishing at this scale
            if (fit.exponent >= opts.flat_band)
                throw DegenerateFit("reduced rate " + labels[j] + "->" + labels[jj] +
                                    " grows with n (exponent " + std::to_string(fit.exponent) +
                                    "); the time-scale is inconsistent");
            if (fit.max_residual > opts.fit_residual_tol)
                throw DegenerateFit("reduced rate " + labels[j] + "->" + labels[jj] +
                                    " has residual " + std::to_string(fit.max_residual) +
                                    "; refine the n-grid");
            edges.push_back({j, jj, fit.coefficient});
        }
    if (edges.empty())
        throw AllRatesVanish("no reduced rate survives at this time-scale");
    return ChainSpec(std::move(labels), std::move(edges));
}

} // namespace

std::vector<std::pair<double, double>> timescale_samples(const ParamChainSpec &family,
                                                         const std::vector<std::vector<int>> &wells,
                                                         const HierarchyOptions &opts) {
    auto samples = eval_level_dispatch(family, wells, opts);
    std::vector<std::pair<double, double>> rows;
    for (size_t i = 0; i < samples.ns.size(); ++i)
        rows.push_back({samples.ns[i], samples.theta[i]});
    return rows;
}

AsymptoticScale level_timescale(const ParamChainSpec &family,
                                const std::vector<std::vector<int>> &wells,
                                const HierarchyOptions &opts) {
    return fit_scale(timescale_samples(family, wells, opts), opts.fit_residual_tol);
}

ChainSpec reduced_chain(const ParamChainSpec &family, const std::vector<std::vector<int>> &wells,
                        const HierarchyOptions &opts) {
    auto samples = eval_level_dispatch(family, wells, opts);
    return reduced_from_samples(samples, static_cast<int>(wells.size()), opts);
}

Coarsening coarsen(const ChainSpec &reduced, const std::vector<std::vector<int>> &wells,
                   const std::vector<int> &transient) {
    const int k = reduced.num_states();
    if (static_cast<int>(wells.size()) != k)
        throw ValidationError("coarsen: reduced chain and wells disagree");
    auto classes = class_decomposition(reduced);
    if (classes.transient.empty() && static_cast<int>(classes.closed_classes.size()) == k)
        throw NotCoarser("coarsening step changed nothing; the reduced rates are inconsistent");

    Coarsening out;
    out.label_classes = classes.closed_classes;
    out.transient = transient;
    for (const auto &cls : classes.closed_classes) {
        std::vector<int> merged;
        for (int label : cls)
            merged.insert(merged.end(), wells[label].begin(), wells[label].end());
        std::sort(merged.begin(), merged.end());
        out.wells.push_back(std::move(merged));
    }
    for (int label : classes.transient)
        out.transient.insert(out.transient.end(), wells[label].begin(), wells[label].end());
    std::sort(out.transient.begin(), out.transient.end());
    return out;
}

std::vector<ProbabilityVector> level_measures(const std::vector<ProbabilityVector> &previous,
                                              const ChainSpec &reduced,
                                              const std::vector<std::vector<int>> &label_classes) {
    std::vector<ProbabilityVector> next;
    for (const auto &cls : label_classes) {
        // stationary weight of each label within its recurrent class
        const int m = static_cast<int>(cls.size());
        Mat<double> rates(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                if (a != b)
                    rates(a, b) = reduced.rate(cls[a], cls[b]);
        auto weights = gth_stationary(rates);
        std::vector<double> mix(previous.front().size(), 0.0);
        for (int a = 0; a < m; ++a)
            for (int x = 0; x < previous[cls[a]].size(); ++x)
                mix[x] += weights[a] * previous[cls[a]][x];
        next.push_back(ProbabilityVector::normalized(std::move(mix)));
    }
    return next;
}

MetastableTree build_tree(const ParamChainSpec &family, const HierarchyOptions &opts) {
    MetastableTree tree;
    ChainSpec limit = family.limit_chain();
    auto decomp = class_decomposition(limit);

    HierarchyLevel level;
    level.index = 1;
    level.wells = decomp.closed_classes;
    level.transient = decomp.transient;
    for (const auto &well : level.wells) {
        // stationary state of the limit chain restricted to the closed class
        const int m = static_cast<int>(well.size());
        Mat<double> rates(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b)
                if (a != b)
                    rates(a, b) = limit.rate(well[a], well[b]);
        auto w = gth_stationary(rates);
        std::vector<double> full(family.num_states(), 0.0);
        for (int a = 0; a < m; ++a)
            full[well[a]] = w[a];
        level.level_measures.push_back(ProbabilityVector::normalized(std::move(full)));
    }
    tree.levels.push_back(std::move(level));

    while (static_cast<int>(tree.levels.back().wells.size()) > 1) {
        if (static_cast<int>(tree.levels.size()) > family.num_states())
            throw IterationBound("tree construction exceeded the state count; coarsening is broken");
        HierarchyLevel &cur = tree.levels.back();

        auto samples = eval_level_dispatch(family, cur.wells, opts);
        std::vector<std::pair<double, double>> theta_rows;
        for (size_t i = 0; i < samples.ns.size(); ++i)
            theta_rows.push_back({samples.ns[i], samples.theta[i]});
        cur.timescale = fit_scale(theta_rows, opts.fit_residual_tol);
        if (cur.index > 1) {
            const auto &prev = tree.levels[cur.index - 2].timescale;
            if (prev && cur.timescale->exponent <= prev->exponent + 0.1)
                throw NumericalError("time-scale exponents failed to increase strictly between levels");
        }
        cur.reduced_chain = reduced_from_samples(samples, static_cast<int>(cur.wells.size()), opts);

        auto coarse = coarsen(*cur.reduced_chain, cur.wells, cur.transient);
        HierarchyLevel next;
        next.index = cur.index + 1;
        next.wells = coarse.wells;
        next.transient = coarse.transient;
        next.level_measures = level_measures(cur.level_measures, *cur.reduced_chain, coarse.label_classes);
        tree.levels.push_back(std::move(next));
    }
    tree.terminal = true;
    return tree;
}

} // namespace mcld
