#ifndef MCLD_IO_HPP
#define MCLD_IO_HPP

// JSON (de)serialization of chains, measures, flows, and trees.  Infinite
// values serialize as the string "inf"; rational exponents as integers or
// "p/q" strings.

#include <string>

#include <json.hpp>

#include "mcld/chain.hpp"
#include "mcld/flows.hpp"
#include "mcld/hierarchy.hpp"

namespace mcld {

using nlohmann::json;

/// Finite doubles pass through; +inf becomes the string "inf".
json json_number(double v);

ParamChainSpec param_chain_from_json(const json &doc);
ParamChainSpec load_param_chain(const std::string &path);
json param_chain_to_json(const ParamChainSpec &family);

/// A fixed chain serializes as an exponent-0 family.
json chain_to_json(const ChainSpec &chain);
ChainSpec chain_from_json(const json &doc); // rejects nonzero exponents

std::vector<double> weights_from_json(const json &doc, const std::vector<std::string> &states);
json weights_to_json(const std::vector<double> &weights, const std::vector<std::string> &states);

/// Flow entries [{"from","to","value"}] against a declared edge list; omitted
/// edges are zero, unknown edges are rejected.
std::vector<double> flow_values_from_json(const json &doc, const std::vector<std::string> &states,
                                          const std::vector<std::pair<int, int>> &edges);
json flow_values_to_json(const std::vector<double> &values, const std::vector<std::string> &states,
                         const std::vector<std::pair<int, int>> &edges);

json tree_to_json(const MetastableTree &tree, const std::vector<std::string> &states);

json load_json_file(const std::string &path);
void save_json_file(const std::string &path, const json &doc);

} // namespace mcld

#endif
