#ifndef MCLD_TEST_SUPPORT_HPP
#define MCLD_TEST_SUPPORT_HPP

// Shared fixtures: the example chains used across suites and random-instance
// generators with fixed seeds.

#include <string>
#include <vector>

#include "mcld/chain.hpp"
#include "mcld/numerics.hpp"

namespace mcld::testing {

// Unit-rate 3-cycle a -> b -> c -> a, and its reversal.
inline ChainSpec cycle3() {
    return ChainSpec::from_named_edges({"a", "b", "c"}, {{"a", "b", 1.0}, {"b", "c", 1.0}, {"c", "a", 1.0}});
}

inline ChainSpec cycle3_reversed() {
    return ChainSpec::from_named_edges({"a", "b", "c"}, {{"a", "c", 1.0}, {"c", "b", 1.0}, {"b", "a", 1.0}});
}

// Two states exchanging at rates (r, s).
inline ChainSpec two_state(double r, double s) {
    return ChainSpec::from_named_edges({"x", "y"}, {{"x", "y", r}, {"y", "x", s}});
}

// The two indistinguishable chains with a transient state: b <-> c at rate 1,
// plus a -> b (first) or a -> c (second) at rate 2.
inline ChainSpec ex02_first() {
    return ChainSpec::from_named_edges({"a", "b", "c"}, {{"a", "b", 2.0}, {"b", "c", 1.0}, {"c", "b", 1.0}});
}

inline ChainSpec ex02_second() {
    return ChainSpec::from_named_edges({"a", "b", "c"}, {{"a", "c", 2.0}, {"b", "c", 1.0}, {"c", "b", 1.0}});
}

// Nearest-neighbour double-well family on {-3..3}: four edges at rate 1/n
// pointing out of the wells toward the middle, everything else at rate 1.
inline ParamChainSpec rm5_family() {
    std::vector<std::string> states{"-3", "-2", "-1", "0", "1", "2", "3"};
    auto ix = [&](const char *s) {
        for (int i = 0; i < 7; ++i)
            if (states[i] == s)
                return i;
        return -1;
    };
    std::vector<ParamEdge> edges;
    auto add = [&](const char *f, const char *t, Rational e) {
        edges.push_back({ix(f), ix(t), 1.0, e});
    };
    add("-3", "-2", Rational(0));
    add("-2", "-3", Rational(0));
    add("-2", "-1", Rational(1));
    add("-1", "-2", Rational(0));
    add("-1", "0", Rational(1));
    add("0", "-1", Rational(0));
    add("0", "1", Rational(0));
    add("1", "0", Rational(1));
    add("1", "2", Rational(0));
    add("2", "1", Rational(1));
    add("2", "3", Rational(0));
    add("3", "2", Rational(0));
    return ParamChainSpec(std::move(states), std::move(edges));
}

// Three wells {0}, {2}, {4} separated by barriers of order n and n^2.
inline ParamChainSpec ladder3_family() {
    std::vector<std::string> states{"w0", "m1", "w2", "m3", "w4"};
    std::vector<ParamEdge> edges{
        {0, 1, 1.0, Rational(1)}, {1, 0, 1.0, Rational(0)}, {1, 2, 1.0, Rational(0)},
        {2, 1, 1.0, Rational(1)}, {2, 3, 1.0, Rational(2)}, {3, 2, 1.0, Rational(0)},
        {3, 4, 1.0, Rational(0)}, {4, 3, 1.0, Rational(2)},
    };
    return ParamChainSpec(std::move(states), std::move(edges));
}

// Two-state well family with symmetric rate n^{-1}.
inline ParamChainSpec two_well_points_family() {
    return ParamChainSpec({"u", "v"}, {{0, 1, 1.0, Rational(1)}, {1, 0, 1.0, Rational(1)}});
}

// Asymmetric double well: barriers of order n one way and n^2 the other.
inline ParamChainSpec asym2_family() {
    return ParamChainSpec({"x", "m", "y"}, {{0, 1, 1.0, Rational(1)},
                                            {1, 0, 1.0, Rational(0)},
                                            {1, 2, 1.0, Rational(0)},
                                            {2, 1, 1.0, Rational(2)}});
}

// Random irreducible chain: a Hamiltonian cycle plus extra random edges.
inline ChainSpec random_irreducible_chain(Xoshiro256 &rng, int nmin = 2, int nmax = 6) {
    int n = nmin + static_cast<int>(rng.next() % static_cast<uint64_t>(nmax - nmin + 1));
    std::vector<std::string> states;
    for (int i = 0; i < n; ++i)
        states.push_back("s" + std::to_string(i));
    std::vector<Edge> edges;
    auto rate = [&]() { return 0.2 + 2.8 * rng.uniform01(); };
    std::vector<char> present(static_cast<size_t>(n) * n, 0);
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        edges.push_back({i, j, rate()});
        present[static_cast<size_t>(i) * n + j] = 1;
    }
    int extras = static_cast<int>(rng.next() % static_cast<uint64_t>(2 * n + 1));
    for (int t = 0; t < extras; ++t) {
        int i = static_cast<int>(rng.next() % static_cast<uint64_t>(n));
        int j = static_cast<int>(rng.next() % static_cast<uint64_t>(n));
        if (i == j || present[static_cast<size_t>(i) * n + j])
            continue;
        present[static_cast<size_t>(i) * n + j] = 1;
        edges.push_back({i, j, rate()});
    }
    return ChainSpec(std::move(states), std::move(edges));
}

// Random interior probability vector with entries bounded away from zero.
inline ProbabilityVector random_interior_measure(Xoshiro256 &rng, int n, double floor = 0.02) {
    std::vector<double> w(n);
    double s = 0.0;
    for (double &x : w) {
        x = floor + rng.uniform01();
        s += x;
    }
    for (double &x : w)
        x /= s;
    return ProbabilityVector(std::move(w));
}

// Random reversible chain built from a random tree plus extra undirected
// edges, with rates satisfying detailed balance for a random positive pi.
inline ChainSpec random_reversible_chain(Xoshiro256 &rng, int nmin = 2, int nmax = 6) {
    int n = nmin + static_cast<int>(rng.next() % static_cast<uint64_t>(nmax - nmin + 1));
    std::vector<std::string> states;
    for (int i = 0; i < n; ++i)
        states.push_back("s" + std::to_string(i));
    std::vector<double> pi(n);
    double s = 0.0;
    for (double &x : pi) {
        x = 0.1 + rng.uniform01();
        s += x;
    }
    for (double &x : pi)
        x /= s;
    std::vector<Edge> edges;
    auto add_pair = [&](int i, int j) {
        double c = 0.2 + 2.8 * rng.uniform01(); // symmetric conductance
        edges.push_back({i, j, c / pi[i]});
        edges.push_back({j, i, c / pi[j]});
    };
    std::vector<char> linked(static_cast<size_t>(n) * n, 0);
    for (int i = 1; i < n; ++i) {
        int j = static_cast<int>(rng.next() % static_cast<uint64_t>(i));
        add_pair(i, j);
        linked[static_cast<size_t>(i) * n + j] = linked[static_cast<size_t>(j) * n + i] = 1;
    }
    int extras = static_cast<int>(rng.next() % static_cast<uint64_t>(n));
    for (int t = 0; t < extras; ++t) {
        int i = static_cast<int>(rng.next() % static_cast<uint64_t>(n));
        int j = static_cast<int>(rng.next() % static_cast<uint64_t>(n));
        if (i == j || linked[static_cast<size_t>(i) * n + j])
            continue;
        linked[static_cast<size_t>(i) * n + j] = linked[static_cast<size_t>(j) * n + i] = 1;
        add_pair(i, j);
    }
    return ChainSpec(std::move(states), std::move(edges));
}

} // namespace mcld::testing

#endif
