#include "mcld/sim.hpp"

#include <cmath>

#include "mcld/errors.hpp"

namespace mcld {

namespace {

struct Clocks {
    std::vector<std::vector<double>> rates; // per state, aligned with targets
    std::vector<std::vector<int>> targets;
    std::vector<double> lambda;
};

Clocks clocks_of(const ChainSpec &chain) {
    Clocks c;
    c.rates.resize(chain.num_states());
    c.targets.resize(chain.num_states());
    c.lambda.assign(chain.num_states(), 0.0);
    for (const auto &e : chain.edges()) {
        c.rates[e.from].push_back(e.rate);
        c.targets[e.from].push_back(e.to);
        c.lambda[e.from] += e.rate;
    }
    return c;
}

Trajectory sample_with(const ChainSpec &chain, const Clocks &c, int x0, double horizon,
                       Xoshiro256 &rng) {
    if (x0 < 0 || x0 >= chain.num_states())
        throw ValidationError("sample_path: start state out of range");
    if (!(horizon > 0.0))
        throw ValidationError("sample_path: horizon must be positive");
    Trajectory traj;
    traj.initial = x0;
    traj.horizon = horizon;
    int x = x0;
    double t = 0.0;
    while (true) {
        if (c.lambda[x] == 0.0)
            throw AbsorbingState("sample_path: reached absorbing state " + chain.state_name(x));
        t += rng.exponential(c.lambda[x]);
        if (t >= horizon)
            break;
        x = c.targets[x][rng.pick(c.rates[x], c.lambda[x])];
        traj.jumps.push_back({t, x});
    }
    return traj;
}

} // namespace

Trajectory sample_path(const ChainSpec &chain, int x0, double horizon, uint64_t seed) {
    Clocks c = clocks_of(chain);
    Xoshiro256 rng(seed);
    return sample_with(chain, c, x0, horizon, rng);
}

std::pair<ProbabilityVector, Flow> empirical_pair(const ChainSpec &chain, const Trajectory &traj) {
    if (!(traj.horizon > 0.0))
        throw ValidationError("empirical_pair: empty time horizon");
    std::vector<double> occupation(chain.num_states(), 0.0);
    std::vector<double> counts(chain.num_edges(), 0.0);
    int x = traj.initial;
    double last = 0.0;
    for (const auto &[t, dest] : traj.jumps) {
        if (t <= last || t > traj.horizon)
            throw ValidationError("empirical_pair: jump times must increase within the horizon");
        int e = chain.edge_index(x, dest);
        if (e < 0)
            throw ValidationError("empirical_pair: trajectory jumps along a missing edge " +
                                  chain.state_name(x) + "->" + chain.state_name(dest));
        occupation[x] += t - last;
        counts[e] += 1.0;
        last = t;
        x = dest;
    }
    occupation[x] += traj.horizon - last;
    for (double &q : counts)
        q /= traj.horizon;
    return {ProbabilityVector::normalized(std::move(occupation)), Flow(std::move(counts))};
}

VarianceEstimate variance_estimate(const ChainSpec &chain, const std::vector<double> &f,
                                   double horizon, int replicas, uint64_t seed) {
    const int n = chain.num_states();
    if (static_cast<int>(f.size()) != n)
        throw ValidationError("variance_estimate: f is not on this chain's states");
    if (replicas < 2)
        throw ValidationError("variance_estimate: needs at least two replicas");
    auto pi = stationary_distribution(chain);
    double mean = 0.0;
    for (int i = 0; i < n; ++i)
        mean += pi[i] * f[i];
    if (std::fabs(mean) > 1e-12)
        throw NotMeanZero("variance_estimate requires a pi-mean-zero observable");

    Clocks c = clocks_of(chain);
    std::vector<double> values(replicas, 0.0);
    for (int r = 0; r < replicas; ++r) {
        Xoshiro256 rng = Xoshiro256::for_replica(seed, static_cast<uint64_t>(r));
        int x0 = rng.pick(pi.weights(), 1.0); // stationary start
        Trajectory traj = sample_with(chain, c, x0, horizon, rng);
        double integral = 0.0;
        int x = traj.initial;
        double last = 0.0;
        for (const auto &[t, dest] : traj.jumps) {
            integral += (t - last) * f[x];
            last = t;
            x = dest;
        }
        integral += (traj.horizon - last) * f[x];
        values[r] = integral / std::sqrt(horizon);
    }
    double avg = 0.0;
    for (double v : values)
        avg += v;
    avg /= replicas;
    double var = 0.0;
    for (double v : values)
        var += (v - avg) * (v - avg);
    var /= (replicas - 1);

    VarianceEstimate est;
    est.estimate = var;
    est.std_error = var * std::sqrt(2.0 / (replicas - 1));
    est.replicas = replicas;
    return est;
}

} // namespace mcld
