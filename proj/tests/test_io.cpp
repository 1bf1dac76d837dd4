#include <doctest.h>

#include <cmath>

#include "mcld/errors.hpp"
#include "mcld/io.hpp"
#include "mcld/rate_functionals.hpp"
#include "test_support.hpp"

using namespace mcld;
using namespace mcld::testing;

TEST_CASE("param chain json round trip") {
    auto fam = rm5_family();
    auto doc = param_chain_to_json(fam);
    auto back = param_chain_from_json(doc);
    REQUIRE(back.num_states() == fam.num_states());
    REQUIRE(back.edges().size() == fam.edges().size());
    for (size_t k = 0; k < fam.edges().size(); ++k) {
        CHECK(back.edges()[k].coeff == fam.edges()[k].coeff);
        CHECK(back.edges()[k].exponent == fam.edges()[k].exponent);
    }
}

TEST_CASE("rational exponents parse as integers or p/q strings") {
    json doc{{"states", {"a", "b"}},
             {"edges",
              {{{"from", "a"}, {"to", "b"}, {"coeff", 1.0}, {"exponent", "3/2"}},
               {{"from", "b"}, {"to", "a"}, {"coeff", 2.0}, {"exponent", 1}}}}};
    auto fam = param_chain_from_json(doc);
    CHECK(fam.edges()[0].exponent.num == 3);
    CHECK(fam.edges()[0].exponent.den == 2);
    CHECK(fam.edges()[1].exponent == Rational(1));
    // rate alias and default exponent
    json doc2{{"states", {"a", "b"}},
              {"edges", {{{"from", "a"}, {"to", "b"}, {"rate", 4.0}}}}};
    auto fam2 = param_chain_from_json(doc2);
    CHECK(fam2.edges()[0].coeff == 4.0);
    CHECK(fam2.is_fixed());

    json bad{{"states", {"a", "b"}},
             {"edges", {{{"from", "a"}, {"to", "b"}, {"coeff", 1.0}, {"exponent", 0.5}}}}};
    CHECK_THROWS_AS(param_chain_from_json(bad), ValidationError);
}

TEST_CASE("fixed chains reject nonzero exponents") {
    auto rm5 = param_chain_to_json(rm5_family());
    CHECK_THROWS_AS(chain_from_json(rm5), ValidationError);
    auto c3 = chain_to_json(cycle3());
    auto back = chain_from_json(c3);
    CHECK(back.num_edges() == 3);
}

TEST_CASE("measure and flow round trips") {
    auto fam = rm5_family();
    std::vector<double> w(fam.num_states(), 0.0);
    w[0] = 0.25;
    w[1] = 0.75;
    auto doc = weights_to_json(w, fam.states());
    auto back = weights_from_json(doc, fam.states());
    CHECK(back == w);

    std::vector<std::pair<int, int>> edges;
    for (const auto &e : fam.edges())
        edges.push_back({e.from, e.to});
    std::vector<double> v(edges.size(), 0.0);
    v[3] = 1.5;
    auto fdoc = flow_values_to_json(v, fam.states(), edges);
    auto fback = flow_values_from_json(fdoc, fam.states(), edges);
    CHECK(fback == v);

    // unknown edge rejected
    json badflow = json::array({{{"from", "-3"}, {"to", "3"}, {"value", 1.0}}});
    CHECK_THROWS_AS(flow_values_from_json(badflow, fam.states(), edges), ValidationError);
}

TEST_CASE("infinity sentinel") {
    CHECK(json_number(infinite_rate) == json("inf"));
    CHECK(json_number(0.25) == json(0.25));
}

TEST_CASE("doubles round-trip through json text") {
    double v = 0.055059212578845135;
    json doc{{"v", v}};
    auto text = doc.dump();
    auto back = json::parse(text);
    CHECK(back.at("v").get<double>() == v);
}

TEST_CASE("bundled data files match the fixtures") {
    auto fam = load_param_chain(std::string(MCLD_DATA_DIR) + "/rm5.json");
    auto fixture = rm5_family();
    REQUIRE(fam.states() == fixture.states());
    REQUIRE(fam.edges().size() == fixture.edges().size());
    for (size_t k = 0; k < fam.edges().size(); ++k) {
        CHECK(fam.edges()[k].from == fixture.edges()[k].from);
        CHECK(fam.edges()[k].to == fixture.edges()[k].to);
        CHECK(fam.edges()[k].coeff == fixture.edges()[k].coeff);
        CHECK(fam.edges()[k].exponent == fixture.edges()[k].exponent);
    }
    auto lad = load_param_chain(std::string(MCLD_DATA_DIR) + "/ladder3.json");
    CHECK(lad.states() == ladder3_family().states());
    for (const char *name : {"c3.json", "c3_rev.json", "two_state.json", "ex02_first.json",
                             "ex02_second.json", "asym2.json"})
        CHECK_NOTHROW(load_param_chain(std::string(MCLD_DATA_DIR) + "/" + name));
}

TEST_CASE("tree serialization shape") {
    auto fam = rm5_family();
    auto tree = build_tree(fam);
    auto doc = tree_to_json(tree, fam.states());
    CHECK(doc.at("depth") == 1);
    CHECK(doc.at("terminal") == true);
    REQUIRE(doc.at("levels").size() == 2);
    const auto &l1 = doc.at("levels")[0];
    CHECK(l1.at("wells").size() == 2);
    CHECK(l1.at("timescale").at("exponent").get<double>() == doctest::Approx(2.0).epsilon(0.01));
    CHECK(doc.at("levels")[1].at("timescale").is_null());
    CHECK(l1.at("reduced_chain").at("rates").size() == 2);
}
