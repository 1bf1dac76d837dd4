#include <doctest.h>

#include <cmath>

#include "mcld/errors.hpp"
#include "mcld/gamma.hpp"
#include "mcld/rate_functionals.hpp"
#include "test_support.hpp"

using namespace mcld;
using namespace mcld::testing;

namespace {

// mu = sum omega_j pi^(p)_j over the level wells, as a full-V measure.
ProbabilityVector mixture(const MetastableTree &tree, int p, const std::vector<double> &omega) {
    const auto &level = tree.levels[p - 1];
    std::vector<double> w(level.level_measures[0].size(), 0.0);
    for (size_t j = 0; j < level.wells.size(); ++j)
        for (int x = 0; x < level.level_measures[j].size(); ++x)
            w[x] += omega[j] * level.level_measures[j][x];
    return ProbabilityVector::normalized(std::move(w));
}

} // namespace

TEST_CASE("rate0 on the rm5 limit") {
    auto fam = rm5_family();
    const int ne = static_cast<int>(fam.edges().size());

    // Dirac at -1 with zero flow: only the surviving edge -1 -> -2 charges
    auto mu = ProbabilityVector::dirac(fam.num_states(), fam.state_index("-1"));
    CHECK(rate0(fam, mu, Flow(std::vector<double>(ne, 0.0))) == doctest::Approx(1.0));

    // mixtures with their induced current are free
    auto tree = build_tree(fam);
    auto mix = mixture(tree, 1, {0.35, 0.65});
    CHECK(rate0(fam, mix, limit_induced_current(fam, mix)) == doctest::Approx(0.0));

    // positive flow on a vanishing edge costs +inf
    std::vector<double> v(ne, 0.0);
    // 2-cycle through the vanishing edge (-2,-1) and the surviving edge (-1,-2)
    for (size_t k = 0; k < fam.edges().size(); ++k) {
        const auto &e = fam.edges()[k];
        if ((fam.states()[e.from] == "-2" && fam.states()[e.to] == "-1") ||
            (fam.states()[e.from] == "-1" && fam.states()[e.to] == "-2"))
            v[k] = 0.5;
    }
    CHECK(std::isinf(rate0(fam, mix, Flow(v))));

    // non-divergence-free flow costs +inf
    std::fill(v.begin(), v.end(), 0.0);
    v[0] = 1.0;
    CHECK(std::isinf(rate0(fam, mix, Flow(v))));
}

TEST_CASE("zero set characterization at level 0") {
    auto fam = rm5_family();
    auto tree = build_tree(fam);

    auto good = mixture(tree, 1, {0.5, 0.5});
    CHECK(zero_set_check_level0(fam, tree, good, limit_induced_current(fam, good)));
    CHECK(rate0(fam, good, limit_induced_current(fam, good)) <= 1e-12);

    // level-1 measure with its induced current
    auto one = tree.levels[0].level_measures[0];
    CHECK(zero_set_check_level0(fam, tree, one, limit_induced_current(fam, one)));

    // mass on the transient set fails
    std::vector<double> w(good.weights());
    w[fam.state_index("0")] += 0.1;
    auto offmix = ProbabilityVector::normalized(std::move(w));
    CHECK_FALSE(zero_set_check_level0(fam, tree, offmix, limit_induced_current(fam, offmix)));
    CHECK(rate0(fam, offmix, limit_induced_current(fam, offmix)) > 1e-12);

    // perturbed current fails
    auto j = limit_induced_current(fam, good);
    std::vector<double> jv(j.values());
    for (double &x : jv)
        x *= 1.001;
    CHECK_FALSE(zero_set_check_level0(fam, tree, good, Flow(jv)));
}

TEST_CASE("zero set equivalence over random samples") {
    auto fam = rm5_family();
    auto tree = build_tree(fam);
    Xoshiro256 rng(111);
    int agree = 0, total = 0;
    for (int t = 0; t < 300; ++t) {
        ProbabilityVector mu = [&] {
            if (t % 3 == 0) {
                double w1 = rng.uniform01();
                return mixture(tree, 1, {w1, 1.0 - w1});
            }
            return random_interior_measure(rng, fam.num_states());
        }();
        Flow j = limit_induced_current(fam, mu);
        if (t % 5 == 0) {
            std::vector<double> jv(j.values());
            if (!jv.empty())
                jv[t % jv.size()] += 0.01;
            j = Flow(jv);
        }
        bool member = zero_set_check_level0(fam, tree, mu, j);
        bool zero = rate0(fam, mu, j) <= 1e-12;
        agree += member == zero;
        total += 1;
    }
    CHECK(agree == total);
}

TEST_CASE("dv_reduced closed forms") {
    // two-state reduced chain rates (a, b)
    auto red = two_state(0.5, 0.5);
    for (double th : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        double expected = th * 0.5 + (1.0 - th) * 0.5 - 2.0 * 0.5 * std::sqrt(th * (1.0 - th));
        CHECK(dv_reduced(red, {th, 1.0 - th}) == doctest::Approx(expected).epsilon(1e-9));
    }
    // omega = delta_j gives the holding rate
    auto asym = two_state(1.0, 0.25);
    CHECK(dv_reduced(asym, {1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dv_reduced(asym, {0.0, 1.0}) == doctest::Approx(0.25).epsilon(1e-12));
    // stationary mixture is free
    auto pi = stationary_distribution(asym);
    CHECK(dv_reduced(asym, pi.weights()) < 1e-12);
}

TEST_CASE("rate_p on rm5") {
    auto fam = rm5_family();
    auto tree = build_tree(fam);
    REQUIRE(tree.depth() == 1);

    auto mix = mixture(tree, 1, {0.5, 0.5});
    auto jmix = limit_induced_current(fam, mix);
    double value = rate_p(fam, tree, 1, mix, jmix);
    // symmetric reduced chain at its stationary mixture: zero
    CHECK(value == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));

    auto skew = mixture(tree, 1, {0.9, 0.1});
    double vskew = rate_p(fam, tree, 1, skew, limit_induced_current(fam, skew));
    const auto &red = *tree.levels[0].reduced_chain;
    double a = red.rate(0, 1), b = red.rate(1, 0);
    double expected = 0.9 * a + 0.1 * b - 2.0 * std::sqrt(a * b) * std::sqrt(0.09);
    CHECK(vskew == doctest::Approx(expected).epsilon(1e-8));

    // wrong current: +inf
    std::vector<double> jv(jmix.values());
    jv[0] += 1e-6;
    CHECK(std::isinf(rate_p(fam, tree, 1, mix, Flow(jv))));

    // mass on the transient set: +inf
    std::vector<double> w(mix.weights());
    w[fam.state_index("1")] += 0.05;
    auto off = ProbabilityVector::normalized(std::move(w));
    CHECK(std::isinf(rate_p(fam, tree, 1, off, limit_induced_current(fam, off))));
}

TEST_CASE("hierarchy of zeros on rm5 and the ladder") {
    auto fam = rm5_family();
    auto tree = build_tree(fam);
    Xoshiro256 rng(222);
    std::vector<std::pair<ProbabilityVector, Flow>> samples;
    for (int t = 0; t < 400; ++t) {
        ProbabilityVector mu = [&] {
            switch (t % 3) {
            case 0: {
                double w1 = rng.uniform01();
                return mixture(tree, 1, {w1, 1.0 - w1});
            }
            case 1:
                return random_interior_measure(rng, fam.num_states());
            default:
                return ProbabilityVector::dirac(fam.num_states(),
                                                static_cast<int>(rng.next() % 7));
            }
        }();
        Flow j = limit_induced_current(fam, mu);
        if (t % 7 == 0) {
            std::vector<double> jv(j.values());
            jv[t % jv.size()] += 0.02;
            j = Flow(jv);
        }
        samples.push_back({mu, j});
    }
    auto rep = hierarchy_of_zeros_check(fam, tree, 1, samples);
    CHECK(rep.checked == 400);
    CHECK(rep.violations == 0);
    CHECK(rep.finite_at_p > 0);

    // ladder: check both consecutive level pairs
    auto lad = ladder3_family();
    auto ltree = build_tree(lad);
    REQUIRE(ltree.depth() == 2);
    std::vector<std::pair<ProbabilityVector, Flow>> lsamples;
    for (int t = 0; t < 300; ++t) {
        ProbabilityVector mu = [&] {
            switch (t % 4) {
            case 0: {
                double w1 = rng.uniform01(), w2 = (1.0 - w1) * rng.uniform01();
                return mixture(ltree, 1, {w1, w2, 1.0 - w1 - w2});
            }
            case 1: {
                double w1 = rng.uniform01();
                return mixture(ltree, 2, {w1, 1.0 - w1});
            }
            case 2:
                return random_interior_measure(rng, lad.num_states());
            default:
                return ProbabilityVector::dirac(lad.num_states(),
                                                static_cast<int>(rng.next() % 5));
            }
        }();
        lsamples.push_back({mu, limit_induced_current(lad, mu)});
    }
    for (int p = 1; p <= 2; ++p) {
        auto lrep = hierarchy_of_zeros_check(lad, ltree, p, lsamples);
        CHECK(lrep.checked == 300);
        CHECK(lrep.violations == 0);
    }

    // the root measure has zero value at every level
    auto root = ltree.levels[2].level_measures[0];
    auto jroot = limit_induced_current(lad, root);
    CHECK(rate_p(lad, ltree, 1, root, jroot) <= 1e-10);
    CHECK(rate_p(lad, ltree, 2, root, jroot) <= 1e-10);
    CHECK(rate0(lad, root, jroot) <= 1e-12);
}

TEST_CASE("pointwise limit probe") {
    auto fam = rm5_family();
    auto tree = build_tree(fam);
    NGrid grid{2.0, 6, 16};

    // finite target: gap shrinks below 1e-3 at the top of the grid
    auto mix = mixture(tree, 1, {0.3, 0.7});
    auto rep = pointwise_limit_probe(fam, mix, limit_induced_current(fam, mix), grid);
    CHECK(std::isfinite(rep.target));
    double gap_last = std::fabs(rep.rows.back().value - rep.target);
    CHECK(gap_last < 1e-3);
    // gaps shrink monotonically in n on this family
    for (size_t i = 1; i < rep.rows.size(); ++i)
        CHECK(std::fabs(rep.rows[i].value - rep.target) <=
              std::fabs(rep.rows[i - 1].value - rep.target) + 1e-15);

    // +inf target, not divergence-free: I_n is +inf for every n
    std::vector<double> bad(fam.edges().size(), 0.0);
    bad[0] = 1.0;
    auto repinf = pointwise_limit_probe(fam, mix, Flow(bad), grid);
    CHECK(std::isinf(repinf.target));
    for (const auto &row : repinf.rows)
        CHECK(std::isinf(row.value));

    // +inf target via a cycle through a vanishing edge, with an interior
    // measure: I_n stays finite but grows without bound (like log n)
    std::vector<double> v(fam.edges().size(), 0.0);
    for (size_t k = 0; k < fam.edges().size(); ++k) {
        const auto &e = fam.edges()[k];
        if ((fam.states()[e.from] == "-2" && fam.states()[e.to] == "-1") ||
            (fam.states()[e.from] == "-1" && fam.states()[e.to] == "-2"))
            v[k] = 1.0;
    }
    auto interior = ProbabilityVector::uniform(fam.num_states());
    auto repslow = pointwise_limit_probe(fam, interior, Flow(v), grid);
    CHECK(std::isinf(repslow.target));
    for (size_t i = 1; i < repslow.rows.size(); ++i) {
        CHECK(std::isfinite(repslow.rows[i].value));
        CHECK(repslow.rows[i].value > repslow.rows[i - 1].value);
    }
}

TEST_CASE("gamma probe on the ladder at both levels") {
    auto fam = ladder3_family();
    auto tree = build_tree(fam);
    HierarchyOptions opts;

    // level 1 has three wells with an isolated label; weights that are
    // stationary across the coupled pair give target 0
    auto rep0 = gamma_probe_level_p(fam, tree, 1, {0.3, 0.3, 0.4}, opts);
    CHECK(rep0.target == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(std::fabs(rep0.rows.back().recovery_value) < 1e-4);

    // skewed weights across the coupled pair
    auto rep1 = gamma_probe_level_p(fam, tree, 1, {0.5, 0.2, 0.3}, opts);
    const auto &red1 = *tree.levels[0].reduced_chain;
    double a = red1.rate(0, 1), b = red1.rate(1, 0);
    double expect = 0.5 * a + 0.2 * b - 2.0 * std::sqrt(a * b) * std::sqrt(0.1);
    CHECK(rep1.target == doctest::Approx(expect).epsilon(1e-9));
    CHECK(rep1.recovery_rel_gap < 0.05);
    CHECK(rep1.liminf_ok);

    // level 2: merged wells against the deep well
    auto rep2 = gamma_probe_level_p(fam, tree, 2, {0.5, 0.5}, opts);
    const auto &red2 = *tree.levels[1].reduced_chain;
    double c = red2.rate(0, 1), d = red2.rate(1, 0);
    double expect2 = 0.5 * c + 0.5 * d - 2.0 * std::sqrt(c * d) * 0.5;
    CHECK(rep2.target == doctest::Approx(expect2).epsilon(1e-9));
    CHECK(rep2.recovery_rel_gap < 0.05);
    CHECK(rep2.liminf_ok);
}

TEST_CASE("gamma probe with strongly asymmetric wells") {
    // wells of very different depths: the shallow well carries mass ~1/n, so
    // the recovery profile is steep and the probe converges like n^{-1/2};
    // still inside the 5% window at the top of the default grid
    auto fam = asym2_family();
    auto tree = build_tree(fam);
    HierarchyOptions opts;
    auto rep = gamma_probe_level_p(fam, tree, 1, {0.3, 0.7}, opts);
    const auto &red = *tree.levels[0].reduced_chain;
    CHECK(rep.target == doctest::Approx(0.3 * red.rate(0, 1)).epsilon(1e-9));
    CHECK(rep.recovery_rel_gap < 0.05);
    CHECK(rep.liminf_ok);
}

TEST_CASE("gamma probe level 1 on rm5") {
    auto fam = rm5_family();
    auto tree = build_tree(fam);
    HierarchyOptions opts;

    // stationary mixture: both candidates sit at (essentially) zero
    auto rep_half = gamma_probe_level_p(fam, tree, 1, {0.5, 0.5}, opts);
    CHECK(rep_half.target == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(std::fabs(rep_half.rows.back().recovery_value) < 1e-6);
    CHECK(rep_half.liminf_ok);

    // skewed mixture: the recovery candidate lands within 5%, while the
    // conditioned mixture pays the well-boundary conductance and blows up;
    // here theta_n = 2n(n+1) and its rescaled value is exactly n + 1,
    // independent of the weights
    auto rep_skew = gamma_probe_level_p(fam, tree, 1, {0.9, 0.1}, opts);
    CHECK(rep_skew.target > 0.0);
    CHECK(rep_skew.recovery_rel_gap < 0.05);
    CHECK(rep_skew.liminf_ok);
    for (const auto &row : rep_skew.rows)
        CHECK(row.conditioned_value == doctest::Approx(row.n + 1.0).epsilon(1e-6));

    // Dirac mixture: recovery tracks the exit rate of well 1
    auto rep_dirac = gamma_probe_level_p(fam, tree, 1, {1.0, 0.0}, opts);
    const auto &red = *tree.levels[0].reduced_chain;
    CHECK(rep_dirac.target == doctest::Approx(red.rate(0, 1)).epsilon(1e-9));
    CHECK(rep_dirac.recovery_rel_gap < 0.05);
    CHECK(rep_dirac.liminf_ok);
}
