// mcld: rate functionals, metastable trees, scale expansions, functional
// derivatives, chain recovery and exact simulation for finite-state
// continuous-time Markov chains, over JSON chain files.
//
// Exit codes: 0 success, 2 invalid input, 3 numerical non-convergence.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mcld/calculus.hpp"
#include "mcld/errors.hpp"
#include "mcld/gamma.hpp"
#include "mcld/hierarchy.hpp"
#include "mcld/identify.hpp"
#include "mcld/io.hpp"
#include "mcld/rate_functionals.hpp"
#include "mcld/sim.hpp"

namespace {

using mcld::json;

std::string fmt17(double v) {
    if (std::isinf(v))
        return "inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

mcld::NGrid parse_grid(const std::string &spec) {
    mcld::NGrid grid;
    if (spec.empty())
        return grid;
    int lo = 0, hi = 0;
    double base = 2.0;
    int fields = std::sscanf(spec.c_str(), "%d:%d:%lf", &lo, &hi, &base);
    if (fields < 2)
        throw mcld::ValidationError("cannot parse n-grid '" + spec + "' (want lo:hi[:base])");
    grid.exp_lo = lo;
    grid.exp_hi = hi;
    grid.base = base;
    return grid;
}

std::vector<double> parse_comma_list(const std::string &arg) {
    std::vector<double> w;
    size_t pos = 0;
    while (pos <= arg.size()) {
        size_t next = arg.find(',', pos);
        std::string tok = arg.substr(pos, next == std::string::npos ? next : next - pos);
        try {
            w.push_back(std::stod(tok));
        } catch (const std::exception &) {
            throw mcld::ValidationError("cannot parse number '" + tok + "'");
        }
        if (next == std::string::npos)
            break;
        pos = next + 1;
    }
    return w;
}

// A measure argument is an inline comma list or a JSON file path.
std::vector<double> parse_weights(const std::string &arg, const std::vector<std::string> &states) {
    if (arg.find(',') != std::string::npos) {
        auto w = parse_comma_list(arg);
        if (w.size() != states.size())
            throw mcld::ValidationError("inline measure has " + std::to_string(w.size()) +
                                        " entries for " + std::to_string(states.size()) + " states");
        return w;
    }
    return mcld::weights_from_json(mcld::load_json_file(arg), states);
}

// A fixed chain straight from the file, or an instantiation when --n given.
mcld::ChainSpec instantiate_fixed(const mcld::ParamChainSpec &family, double n_value) {
    if (n_value > 0.0)
        return family.instantiate(n_value);
    if (!family.is_fixed())
        throw mcld::ValidationError("the chain file is scale-parametrized; pass --n to instantiate");
    return family.instantiate(1.0);
}

std::vector<std::pair<int, int>> edge_pairs(const mcld::ParamChainSpec &family) {
    std::vector<std::pair<int, int>> out;
    for (const auto &e : family.edges())
        out.push_back({e.from, e.to});
    return out;
}

void emit(const json &doc, const std::string &output, bool machine, const std::string &summary) {
    if (!output.empty())
        mcld::save_json_file(output, doc);
    if (machine)
        std::cout << doc.dump(2) << "\n";
    else
        std::cout << summary;
}

// --- oracle record/replay -----------------------------------------------------

struct OracleTape {
    json manifest;
    std::vector<json> queries;

    void save(const std::string &dir) const {
        std::filesystem::create_directories(dir);
        mcld::save_json_file(dir + "/manifest.json", manifest);
        std::ofstream out(dir + "/oracle.jsonl");
        if (!out)
            throw mcld::ValidationError("cannot write oracle tape in '" + dir + "'");
        for (const auto &q : queries)
            out << q.dump() << "\n";
    }

    static OracleTape load(const std::string &dir) {
        OracleTape tape;
        tape.manifest = mcld::load_json_file(dir + "/manifest.json");
        std::ifstream in(dir + "/oracle.jsonl");
        if (!in)
            throw mcld::ValidationError("cannot open oracle tape in '" + dir + "'");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty())
                continue;
            tape.queries.push_back(json::parse(line));
        }
        return tape;
    }
};

// --- subcommands ----------------------------------------------------------------

int run_analyze(const std::string &chain_path, const std::string &grid_spec,
                const mcld::HierarchyOptions &base, const std::string &output, bool machine) {
    auto family = mcld::load_param_chain(chain_path);
    mcld::HierarchyOptions opts = base;
    opts.grid = parse_grid(grid_spec);
    auto tree = mcld::build_tree(family, opts);
    json doc = mcld::tree_to_json(tree, family.states());

    std::string summary = "metastable tree: depth " + std::to_string(tree.depth()) + "\n";
    for (const auto &level : tree.levels) {
        summary += "  level " + std::to_string(level.index) + ": " +
                   std::to_string(level.wells.size()) + " well(s)";
        if (level.timescale)
            summary += ", time-scale ~ " + fmt17(level.timescale->coefficient) + " * n^" +
                       fmt17(level.timescale->exponent);
        summary += "\n";
    }
    emit(doc, output, machine, summary);
    return 0;
}

int run_rate(const std::string &chain_path, const std::string &mu_arg, const std::string &flow_path,
             double n_value, const mcld::SolverOptions &solver, const std::string &output,
             bool machine) {
    auto family = mcld::load_param_chain(chain_path);
    mcld::ChainSpec chain = instantiate_fixed(family, n_value);

    mcld::ProbabilityVector mu(parse_weights(mu_arg, family.states()));
    auto projection = mcld::dv_rate_projection(chain, mu, solver);

    json doc;
    doc["dv"] = mcld::json_number(projection.value);
    bool interior = true;
    for (int i = 0; i < mu.size(); ++i)
        interior = interior && mu[i] > 0.0;
    if (interior && mcld::is_irreducible(chain)) {
        auto h = mcld::tilt_solver(chain, mu, solver);
        doc["dv_variational"] = mcld::json_number(mcld::tilt_value(chain, mu, h));
        json tilt = json::object();
        for (int i = 0; i < chain.num_states(); ++i)
            tilt[chain.state_name(i)] = h[i];
        doc["tilt"] = tilt;
        doc["optimal_current"] = mcld::flow_values_to_json(
            mcld::optimal_current(chain, mu, solver).values(), family.states(),
            edge_pairs(family));
    } else {
        doc["dv_variational"] = nullptr;
        doc["tilt"] = nullptr;
        doc["optimal_current"] = mcld::flow_values_to_json(projection.minimizer.values(),
                                                           family.states(), edge_pairs(family));
    }
    if (!flow_path.empty()) {
        mcld::Flow flow(mcld::flow_values_from_json(mcld::load_json_file(flow_path),
                                                    family.states(), edge_pairs(family)));
        doc["bfg"] = mcld::json_number(mcld::bfg_rate(chain, mu, flow));
    } else {
        doc["bfg"] = nullptr;
    }

    std::string summary = "dv = " + fmt17(projection.value) + "\n";
    if (!flow_path.empty())
        summary += "bfg = " + std::string(doc["bfg"].is_string() ? "inf" : fmt17(doc["bfg"].get<double>())) + "\n";
    emit(doc, output, machine, summary);
    return 0;
}

int run_gamma(const std::string &chain_path, int level, const std::string &omega_arg,
              const std::string &grid_spec, const mcld::HierarchyOptions &base,
              const std::string &candidate, const std::string &output, bool machine) {
    auto family = mcld::load_param_chain(chain_path);
    mcld::HierarchyOptions opts = base;
    opts.grid = parse_grid(grid_spec);
    auto tree = mcld::build_tree(family, opts);
    if (level < 1 || level > tree.depth())
        throw mcld::ValidationError("level " + std::to_string(level) + " out of range (tree depth " +
                                    std::to_string(tree.depth()) + ")");

    const auto &wells = tree.levels[level - 1].wells;
    std::vector<double> omega = parse_comma_list(omega_arg);
    if (omega.size() != wells.size())
        throw mcld::ValidationError("--omega needs " + std::to_string(wells.size()) + " weights");
    if (candidate != "recovery" && candidate != "conditioned")
        throw mcld::ValidationError("--candidate must be recovery or conditioned");

    auto rep = mcld::gamma_probe_level_p(family, tree, level, omega, opts);

    if (machine) {
        json rows = json::array();
        for (const auto &r : rep.rows)
            rows.push_back({{"n", r.n},
                            {"theta", r.theta},
                            {"conditioned", mcld::json_number(r.conditioned_value)},
                            {"recovery", mcld::json_number(r.recovery_value)}});
        json doc{{"level", level},
                 {"omega", omega},
                 {"target", mcld::json_number(rep.target)},
                 {"rows", rows},
                 {"recovery_rel_gap", rep.recovery_rel_gap},
                 {"liminf_ok", rep.liminf_ok}};
        emit(doc, output, true, "");
        return 0;
    }

    std::string csv = "n,theta_n,value,target\n";
    for (const auto &r : rep.rows) {
        double value = candidate == "conditioned" ? r.conditioned_value : r.recovery_value;
        csv += fmt17(r.n) + "," + fmt17(r.theta) + "," + fmt17(value) + "," + fmt17(rep.target) + "\n";
    }
    if (!output.empty()) {
        std::ofstream out(output);
        if (!out)
            throw mcld::ValidationError("cannot write '" + output + "'");
        out << csv;
        std::cout << "wrote " << output << "\n";
    } else {
        std::cout << csv;
    }
    return 0;
}

int run_deriv(const std::string &chain_path, const std::string &mu_arg, const std::string &nu_path,
              const std::string &nu2_path, double n_value, const std::string &output, bool machine) {
    auto family = mcld::load_param_chain(chain_path);
    auto chain = instantiate_fixed(family, n_value);
    mcld::ProbabilityVector mu(parse_weights(mu_arg, family.states()));
    mcld::SignedMeasure nu(mcld::weights_from_json(mcld::load_json_file(nu_path), family.states()));

    double first = mcld::first_derivative(chain, mu, nu);
    auto dh = mcld::tilt_derivative(chain, mu, nu);

    // central differences with one Richardson step as the validation report
    auto shifted = [&](double eps) {
        std::vector<double> w(mu.weights());
        for (int i = 0; i < mu.size(); ++i)
            w[i] += eps * nu[i];
        return mcld::dv_rate_variational(chain, mcld::ProbabilityVector(w));
    };
    double e0 = 1e-4;
    double d1 = (shifted(e0) - shifted(-e0)) / (2.0 * e0);
    double d2 = (shifted(e0 / 2.0) - shifted(-e0 / 2.0)) / e0;
    double fd_first = (4.0 * d2 - d1) / 3.0;

    json doc;
    doc["first"] = first;
    doc["fd_first"] = fd_first;
    doc["first_rel_error"] = std::fabs(first - fd_first) / (1.0 + std::fabs(first));
    json tilt = json::object();
    for (int i = 0; i < chain.num_states(); ++i)
        tilt[chain.state_name(i)] = dh[i];
    doc["tilt_derivative"] = tilt;

    std::string summary = "first derivative = " + fmt17(first) + "  (finite differences " +
                          fmt17(fd_first) + ")\n";
    if (!nu2_path.empty()) {
        mcld::SignedMeasure nu2(
            mcld::weights_from_json(mcld::load_json_file(nu2_path), family.states()));
        double second = mcld::second_derivative(chain, mu, nu, nu2);
        doc["second"] = second;
        summary += "second derivative = " + fmt17(second) + "\n";
    }
    emit(doc, output, machine, summary);
    return 0;
}

int run_recover(const std::string &mode, const std::string &hidden_path,
                const std::string &oracle_dir, const std::string &dump_dir,
                const std::string &output, bool machine) {
    if (hidden_path.empty() == oracle_dir.empty())
        throw mcld::ValidationError("recover needs exactly one of --hidden or --oracle");

    json report;
    mcld::ChainSpec recovered({"placeholder"}, {});
    OracleTape tape;
    size_t cursor = 0;

    if (mode == "dv") {
        mcld::DvOracle oracle;
        std::optional<mcld::ChainSpec> hidden;
        if (!hidden_path.empty()) {
            hidden = mcld::chain_from_json(mcld::load_json_file(hidden_path));
            auto base = mcld::make_dv_oracle(*hidden);
            oracle.states = base.states;
            oracle.eval = [&tape, base](const std::vector<double> &w) {
                double v = base.eval(w);
                tape.queries.push_back({{"mu", w}, {"value", v}});
                return v;
            };
            tape.manifest = {{"mode", "dv"}, {"states", oracle.states}};
        } else {
            tape = OracleTape::load(oracle_dir);
            if (tape.manifest.at("mode") != "dv")
                throw mcld::ValidationError("oracle tape is not a dv tape");
            oracle.states = tape.manifest.at("states").get<std::vector<std::string>>();
            oracle.eval = [&tape, &cursor](const std::vector<double> &w) {
                if (cursor >= tape.queries.size())
                    throw mcld::ValidationError("oracle tape exhausted; rebuild it with --dump-oracle");
                const auto &q = tape.queries[cursor++];
                auto stored = q.at("mu").get<std::vector<double>>();
                if (stored.size() != w.size())
                    throw mcld::ValidationError("oracle tape query shape mismatch");
                for (size_t i = 0; i < w.size(); ++i)
                    if (std::fabs(stored[i] - w[i]) > 1e-12)
                        throw mcld::ValidationError("oracle tape diverged from the query sequence");
                return q.at("value").get<double>();
            };
        }
        recovered = mcld::recover_reversible(oracle);
        double deviation = mcld::oracle_deviation(recovered, oracle);
        report["oracle_deviation"] = deviation;
        report["reproduces_oracle"] = deviation < 1e-6;
        if (hidden) {
            double worst = 0.0;
            for (const auto &e : hidden->edges()) {
                double r = recovered.rate(e.from, e.to);
                worst = std::max(worst, std::fabs(r - e.rate) / e.rate);
            }
            report["max_rate_rel_error"] = worst;
        }
    } else if (mode == "bfg") {
        mcld::BfgOracle oracle;
        std::optional<mcld::ChainSpec> hidden;
        if (!hidden_path.empty()) {
            hidden = mcld::chain_from_json(mcld::load_json_file(hidden_path));
            auto base = mcld::make_bfg_oracle(*hidden);
            oracle.states = base.states;
            oracle.edges = base.edges;
            oracle.eval = [&tape, base](const std::vector<double> &w, const std::vector<double> &f) {
                double v = base.eval(w, f);
                tape.queries.push_back(
                    {{"mu", w}, {"flow", f}, {"value", mcld::json_number(v)}});
                return v;
            };
            json edges = json::array();
            for (auto [a, b] : oracle.edges)
                edges.push_back({{"from", oracle.states[a]}, {"to", oracle.states[b]}});
            tape.manifest = {{"mode", "bfg"}, {"states", oracle.states}, {"edges", edges}};
        } else {
            tape = OracleTape::load(oracle_dir);
            if (tape.manifest.at("mode") != "bfg")
                throw mcld::ValidationError("oracle tape is not a bfg tape");
            oracle.states = tape.manifest.at("states").get<std::vector<std::string>>();
            for (const auto &e : tape.manifest.at("edges")) {
                int a = -1, b = -1;
                for (size_t i = 0; i < oracle.states.size(); ++i) {
                    if (oracle.states[i] == e.at("from"))
                        a = static_cast<int>(i);
                    if (oracle.states[i] == e.at("to"))
                        b = static_cast<int>(i);
                }
                oracle.edges.push_back({a, b});
            }
            oracle.eval = [&tape, &cursor](const std::vector<double> &w,
                                           const std::vector<double> &f) {
                if (cursor >= tape.queries.size())
                    throw mcld::ValidationError("oracle tape exhausted; rebuild it with --dump-oracle");
                const auto &q = tape.queries[cursor++];
                auto smu = q.at("mu").get<std::vector<double>>();
                auto sfl = q.at("flow").get<std::vector<double>>();
                for (size_t i = 0; i < w.size(); ++i)
                    if (std::fabs(smu[i] - w[i]) > 1e-12)
                        throw mcld::ValidationError("oracle tape diverged from the query sequence");
                for (size_t i = 0; i < f.size(); ++i)
                    if (std::fabs(sfl[i] - f[i]) > 1e-12)
                        throw mcld::ValidationError("oracle tape diverged from the query sequence");
                const auto &v = q.at("value");
                return v.is_string() ? mcld::infinite_rate : v.get<double>();
            };
        }
        recovered = mcld::recover_from_bfg(oracle);
        if (hidden) {
            double worst = 0.0;
            for (const auto &e : hidden->edges()) {
                double r = recovered.rate(e.from, e.to);
                worst = std::max(worst, std::fabs(r - e.rate) / e.rate);
            }
            report["max_rate_rel_error"] = worst;
        }
    } else {
        throw mcld::ValidationError("--mode must be dv or bfg");
    }

    if (!dump_dir.empty())
        tape.save(dump_dir);

    json doc{{"chain", mcld::chain_to_json(recovered)}, {"report", report}};
    std::string summary = "recovered " + std::to_string(recovered.num_edges()) + " edges over " +
                          std::to_string(recovered.num_states()) + " states\n";
    if (report.contains("max_rate_rel_error"))
        summary += "max rate relative error = " + fmt17(report["max_rate_rel_error"].get<double>()) + "\n";
    emit(doc, output, machine, summary);
    return 0;
}

int run_simulate(const std::string &chain_path, double horizon, int replicas, uint64_t seed,
                 const std::string &x0_name, double n_value, const std::string &csv_path,
                 const std::string &output, bool machine) {
    auto family = mcld::load_param_chain(chain_path);
    auto chain = instantiate_fixed(family, n_value);
    int x0 = x0_name.empty() ? 0 : chain.state_index(x0_name);

    std::vector<std::pair<int, int>> ep;
    for (const auto &e : chain.edges())
        ep.push_back({e.from, e.to});

    json reps = json::array();
    std::string csv = "replica,kind,key,value\n";
    std::vector<double> mean_l(chain.num_states(), 0.0), mean_q(chain.num_edges(), 0.0);
    for (int r = 0; r < replicas; ++r) {
        uint64_t sub = replicas == 1 ? seed : mcld::derive_seed(seed, static_cast<uint64_t>(r));
        auto traj = mcld::sample_path(chain, x0, horizon, sub);
        auto [l, q] = mcld::empirical_pair(chain, traj);
        reps.push_back({{"replica", r},
                        {"jumps", traj.jumps.size()},
                        {"empirical_measure", mcld::weights_to_json(l.weights(), chain.states())},
                        {"empirical_flow",
                         mcld::flow_values_to_json(q.values(), chain.states(), ep)}});
        for (int i = 0; i < chain.num_states(); ++i) {
            mean_l[i] += l[i] / replicas;
            csv += std::to_string(r) + ",L," + chain.state_name(i) + "," + fmt17(l[i]) + "\n";
        }
        for (int k = 0; k < chain.num_edges(); ++k) {
            mean_q[k] += q[k] / replicas;
            csv += std::to_string(r) + ",Q," + chain.state_name(chain.edges()[k].from) + "->" +
                   chain.state_name(chain.edges()[k].to) + "," + fmt17(q[k]) + "\n";
        }
    }
    json doc{{"horizon", horizon},
             {"seed", seed},
             {"replicas", reps},
             {"mean_measure", mcld::weights_to_json(mean_l, chain.states())},
             {"mean_flow", mcld::flow_values_to_json(mean_q, chain.states(), ep)}};
    if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        if (!out)
            throw mcld::ValidationError("cannot write '" + csv_path + "'");
        out << csv;
    }
    std::string summary = "simulated " + std::to_string(replicas) + " replica(s) to horizon " +
                          fmt17(horizon) + "\n";
    emit(doc, output, machine, summary);
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"rate functionals and metastable hierarchies of finite-state Markov chains"};
    app.require_subcommand(1);

    bool machine = false;
    app.add_flag("--json", machine, "machine-readable JSON on stdout");

    std::string chain_path, grid_spec, output;
    mcld::HierarchyOptions hier;
    mcld::SolverOptions solver;

    auto *analyze = app.add_subcommand("analyze", "build the metastable tree of a rate family");
    analyze->add_option("chain", chain_path, "chain/family JSON file")->required();
    analyze->add_option("--n-grid", grid_spec, "grid exponents lo:hi[:base], default 6:16:2");
    analyze->add_option("--precision-bits", hier.precision_bits, "53 or 106 (double-double)");
    analyze->add_option("--fit-residual-tol", hier.fit_residual_tol,
                        "max log-residual of scale fits (default 0.05)");
    analyze->add_option("--flat-band", hier.flat_band,
                        "half-width of the constant-exponent band (default 0.1)");
    analyze->add_option("--output,-o", output, "write JSON here");

    std::string mu_arg, flow_path;
    double n_value = 0.0;
    auto *rate = app.add_subcommand("rate", "evaluate the rate functionals at a measure");
    rate->add_option("chain", chain_path, "chain JSON file")->required();
    rate->add_option("--mu", mu_arg, "measure: JSON file or inline w1,w2,...")->required();
    rate->add_option("--flow", flow_path, "optional flow JSON file for the measure-current value");
    rate->add_option("--n", n_value, "instantiate a parametrized family at this n");
    rate->add_option("--grad-tol", solver.grad_tol, "tilt ascent gradient tolerance (default 1e-10)");
    rate->add_option("--kkt-tol", solver.kkt_tol, "projection KKT tolerance (default 1e-8)");
    rate->add_option("--max-iter", solver.max_iterations, "solver iteration budget (default 200)");
    rate->add_option("--output,-o", output, "write JSON here");

    int level = 1;
    std::string omega_arg, candidate = "recovery";
    auto *gamma = app.add_subcommand("gamma", "scale-expansion probe along the n-grid (CSV)");
    gamma->add_option("chain", chain_path, "family JSON file")->required();
    gamma->add_option("--level", level, "tree level p >= 1")->required();
    gamma->add_option("--omega", omega_arg, "well weights w1,w2,...")->required();
    gamma->add_option("--n-grid", grid_spec, "grid exponents lo:hi[:base]");
    gamma->add_option("--precision-bits", hier.precision_bits, "53 or 106");
    gamma->add_option("--fit-residual-tol", hier.fit_residual_tol,
                      "max log-residual of scale fits (default 0.05)");
    gamma->add_option("--candidate", candidate, "recovery (default) or conditioned");
    gamma->add_option("--output,-o", output, "write CSV (or JSON with --json) here");

    std::string nu_path, nu2_path;
    auto *deriv = app.add_subcommand("deriv", "functional derivatives of the measure functional");
    deriv->add_option("chain", chain_path, "chain JSON file")->required();
    deriv->add_option("--mu", mu_arg, "base measure: JSON file or inline list")->required();
    deriv->add_option("--nu", nu_path, "direction JSON file (weights summing to 0)")->required();
    deriv->add_option("--nu2", nu2_path, "second direction for the second derivative");
    deriv->add_option("--n", n_value, "instantiate a parametrized family at this n");
    deriv->add_option("--output,-o", output, "write JSON here");

    std::string mode = "dv", hidden_path, oracle_dir, dump_dir;
    auto *recover = app.add_subcommand("recover", "recover a chain from a rate-functional oracle");
    recover->add_option("--mode", mode, "dv or bfg")->required();
    recover->add_option("--hidden", hidden_path, "hidden chain JSON file (self-test oracle)");
    recover->add_option("--oracle", oracle_dir, "directory with a recorded oracle tape");
    recover->add_option("--dump-oracle", dump_dir, "record all oracle queries into this directory");
    recover->add_option("--output,-o", output, "write JSON here");

    double horizon = 100.0;
    int replicas = 1;
    uint64_t seed = 1;
    std::string x0_name, csv_path;
    auto *simulate = app.add_subcommand("simulate", "exact trajectory simulation");
    simulate->add_option("chain", chain_path, "chain JSON file")->required();
    simulate->add_option("--t", horizon, "time horizon")->required();
    simulate->add_option("--replicas", replicas, "number of replicas");
    simulate->add_option("--seed", seed, "master seed");
    simulate->add_option("--x0", x0_name, "start state (default: first declared)");
    simulate->add_option("--n", n_value, "instantiate a parametrized family at this n");
    simulate->add_option("--csv", csv_path, "write per-replica CSV here");
    simulate->add_option("--output,-o", output, "write JSON here");

    for (auto *sub : app.get_subcommands({}))
        sub->fallthrough();

    try {
        app.parse(argc, argv);
        if (*analyze)
            return run_analyze(chain_path, grid_spec, hier, output, machine);
        if (*rate)
            return run_rate(chain_path, mu_arg, flow_path, n_value, solver, output, machine);
        if (*gamma)
            return run_gamma(chain_path, level, omega_arg, grid_spec, hier, candidate, output,
                             machine);
        if (*deriv)
            return run_deriv(chain_path, mu_arg, nu_path, nu2_path, n_value, output, machine);
        if (*recover)
            return run_recover(mode, hidden_path, oracle_dir, dump_dir, output, machine);
        if (*simulate)
            return run_simulate(chain_path, horizon, replicas, seed, x0_name, n_value, csv_path,
                                output, machine);
        return 0;
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return 2;
    } catch (const mcld::ValidationError &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mcld::NumericalError &e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception &e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 1;
    }
}
