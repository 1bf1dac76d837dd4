#include "mcld/io.hpp"

#include <cmath>
#include <fstream>

#include "mcld/errors.hpp"

namespace mcld {

json json_number(double v) {
    if (std::isinf(v))
        return json("inf");
    return json(v);
}

namespace {

Rational exponent_from_json(const json &e) {
    if (e.is_number_integer())
        return Rational(e.get<long long>());
    if (e.is_string())
        return Rational::parse(e.get<std::string>());
    throw ValidationError("edge exponent must be an integer or a \"p/q\" string");
}

json exponent_to_json(const Rational &r) {
    if (r.den == 1)
        return json(r.num);
    return json(r.str());
}

int index_of(const std::vector<std::string> &states, const std::string &name, const char *what) {
    for (size_t i = 0; i < states.size(); ++i)
        if (states[i] == name)
            return static_cast<int>(i);
    throw ValidationError(std::string(what) + ": unknown state '" + name + "'");
}

} // namespace

ParamChainSpec param_chain_from_json(const json &doc) {
    if (!doc.is_object() || !doc.contains("states") || !doc.contains("edges"))
        throw ValidationError("chain file must be an object with \"states\" and \"edges\"");
    std::vector<std::string> states;
    for (const auto &s : doc.at("states"))
        states.push_back(s.get<std::string>());
    std::vector<ParamEdge> edges;
    for (const auto &e : doc.at("edges")) {
        ParamEdge pe;
        pe.from = index_of(states, e.at("from").get<std::string>(), "edge");
        pe.to = index_of(states, e.at("to").get<std::string>(), "edge");
        if (e.contains("coeff"))
            pe.coeff = e.at("coeff").get<double>();
        else if (e.contains("rate"))
            pe.coeff = e.at("rate").get<double>();
        else
            throw ValidationError("edge needs a \"coeff\" (or \"rate\") field");
        pe.exponent = e.contains("exponent") ? exponent_from_json(e.at("exponent")) : Rational(0);
        edges.push_back(pe);
    }
    return ParamChainSpec(std::move(states), std::move(edges));
}

ParamChainSpec load_param_chain(const std::string &path) {
    return param_chain_from_json(load_json_file(path));
}

json param_chain_to_json(const ParamChainSpec &family) {
    json edges = json::array();
    for (const auto &e : family.edges())
        edges.push_back({{"from", family.states()[e.from]},
                         {"to", family.states()[e.to]},
                         {"coeff", e.coeff},
                         {"exponent", exponent_to_json(e.exponent)}});
    return {{"states", family.states()}, {"edges", edges}};
}

json chain_to_json(const ChainSpec &chain) {
    json edges = json::array();
    for (const auto &e : chain.edges())
        edges.push_back({{"from", chain.states()[e.from]},
                         {"to", chain.states()[e.to]},
                         {"coeff", e.rate},
                         {"exponent", 0}});
    return {{"states", chain.states()}, {"edges", edges}};
}

ChainSpec chain_from_json(const json &doc) {
    auto family = param_chain_from_json(doc);
    if (!family.is_fixed())
        throw ValidationError("expected a fixed chain (all exponents 0); "
                              "instantiate the family with --n first");
    return family.instantiate(1.0);
}

std::vector<double> weights_from_json(const json &doc, const std::vector<std::string> &states) {
    const json &w = doc.is_object() && doc.contains("weights") ? doc.at("weights") : doc;
    if (!w.is_object())
        throw ValidationError("measure file must map state names to weights");
    std::vector<double> out(states.size(), 0.0);
    for (const auto &[name, value] : w.items())
        out[index_of(states, name, "measure")] = value.get<double>();
    return out;
}

json weights_to_json(const std::vector<double> &weights, const std::vector<std::string> &states) {
    json w = json::object();
    for (size_t i = 0; i < states.size(); ++i)
        w[states[i]] = weights[i];
    return {{"weights", w}};
}

std::vector<double> flow_values_from_json(const json &doc, const std::vector<std::string> &states,
                                          const std::vector<std::pair<int, int>> &edges) {
    const json &list = doc.is_object() && doc.contains("flow") ? doc.at("flow") : doc;
    if (!list.is_array())
        throw ValidationError("flow file must be a list of {from,to,value} entries");
    std::vector<double> out(edges.size(), 0.0);
    for (const auto &entry : list) {
        int from = index_of(states, entry.at("from").get<std::string>(), "flow");
        int to = index_of(states, entry.at("to").get<std::string>(), "flow");
        int found = -1;
        for (size_t k = 0; k < edges.size(); ++k)
            if (edges[k].first == from && edges[k].second == to) {
                found = static_cast<int>(k);
                break;
            }
        if (found < 0)
            throw ValidationError("flow entry on a missing edge " + states[from] + "->" + states[to]);
        out[found] = entry.at("value").get<double>();
    }
    return out;
}

json flow_values_to_json(const std::vector<double> &values, const std::vector<std::string> &states,
                         const std::vector<std::pair<int, int>> &edges) {
    json list = json::array();
    for (size_t k = 0; k < edges.size(); ++k)
        list.push_back({{"from", states[edges[k].first]},
                        {"to", states[edges[k].second]},
                        {"value", json_number(values[k])}});
    return list;
}

json tree_to_json(const MetastableTree &tree, const std::vector<std::string> &states) {
    json levels = json::array();
    for (const auto &level : tree.levels) {
        json wells = json::array();
        for (const auto &well : level.wells) {
            json names = json::array();
            for (int x : well)
                names.push_back(states[x]);
            wells.push_back(names);
        }
        json transient = json::array();
        for (int x : level.transient)
            transient.push_back(states[x]);
        json measures = json::array();
        for (const auto &m : level.level_measures)
            measures.push_back(weights_to_json(m.weights(), states));
        json entry{{"index", level.index},
                   {"wells", wells},
                   {"transient", transient},
                   {"level_measures", measures}};
        if (level.timescale)
            entry["timescale"] = {{"coefficient", level.timescale->coefficient},
                                  {"exponent", level.timescale->exponent},
                                  {"residual", level.timescale->fit_residual}};
        else
            entry["timescale"] = nullptr;
        if (level.reduced_chain) {
            json rates = json::array();
            for (const auto &e : level.reduced_chain->edges())
                rates.push_back({{"from", level.reduced_chain->states()[e.from]},
                                 {"to", level.reduced_chain->states()[e.to]},
                                 {"rate", e.rate}});
            entry["reduced_chain"] = {{"labels", level.reduced_chain->states()}, {"rates", rates}};
        } else {
            entry["reduced_chain"] = nullptr;
        }
        levels.push_back(entry);
    }
    return {{"levels", levels}, {"terminal", tree.terminal}, {"depth", tree.depth()}};
}

json load_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception &e) {
        throw ValidationError("cannot parse '" + path + "': " + e.what());
    }
    return doc;
}

void save_json_file(const std::string &path, const json &doc) {
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write '" + path + "'");
    out << doc.dump(2) << "\n";
}

} // namespace mcld
