#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "sna/matpower.hpp"

using namespace sna;

namespace {

const char* kMinimalCase = R"(function mpc = mini
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
  1 3 10 4 0 0 1 1.0 0 12.5 1 1.1 0.9;
  2 1 20 8 0 0 1 1.0 0 12.5 1 1.1 0.9;
];
mpc.gen = [
  1 30 10 50 -50 1.0 100 1 100 0;
];
mpc.branch = [
  1 2 0.01 0.05 0.002 0 0 0 0 0 1 -360 360;
];
mpc.gencost = [
  2 0 0 3 0.1 20 0;
];
)";

std::string data_path(const std::string& name) { return std::string(SNA_DATA_DIR) + "/" + name; }

}  // namespace

TEST_CASE("minimal two-bus case parses") {
  PowerCase c = parse_case(kMinimalCase);
  CHECK(c.base_mva == 100.0);
  REQUIRE(c.buses.size() == 2);
  REQUIRE(c.branches.size() == 1);
  REQUIRE(c.gens.size() == 1);
  CHECK(c.buses[0].pd == 10.0);
  CHECK(c.buses[1].qd == 8.0);
  CHECK(c.branches[0].r == 0.01);
  CHECK(c.branches[0].x == 0.05);
  CHECK(c.branches[0].status == 1);
  CHECK(c.gens[0].bus == 1);
  CHECK(c.gens[0].vg == 1.0);
}

TEST_CASE("bundled case14 parses to the published shape") {
  PowerCase c = parse_case_file(data_path("case14.m"));
  CHECK(c.buses.size() == 14);
  CHECK(c.branches.size() == 20);
  CHECK(c.gens.size() == 5);
  CHECK(c.base_mva == 100.0);
  // spot checks against the published matrices
  CHECK(c.buses[2].pd == doctest::Approx(94.2));
  CHECK(c.buses[3].qd == doctest::Approx(-3.9));
  CHECK(c.branches[0].x == doctest::Approx(0.05917));
  CHECK(c.branches[19].from == 13);
  CHECK(c.branches[19].to == 14);
}

TEST_CASE("whole corpus parses and round-trips at full precision") {
  for (const char* name : {"case14.m", "case_pair.m", "case_chain3.m"}) {
    CAPTURE(name);
    PowerCase c = parse_case_file(data_path(name));
    PowerCase again = parse_case(to_matpower_text(c));
    REQUIRE(again.buses.size() == c.buses.size());
    REQUIRE(again.branches.size() == c.branches.size());
    REQUIRE(again.gens.size() == c.gens.size());
    CHECK(again.base_mva == c.base_mva);
    for (std::size_t i = 0; i < c.buses.size(); ++i) {
      CHECK(again.buses[i].id == c.buses[i].id);
      CHECK(again.buses[i].pd == c.buses[i].pd);
      CHECK(again.buses[i].qd == c.buses[i].qd);
      CHECK(again.buses[i].vm == c.buses[i].vm);
      CHECK(again.buses[i].va == c.buses[i].va);
      CHECK(again.buses[i].base_kv == c.buses[i].base_kv);
    }
    for (std::size_t i = 0; i < c.branches.size(); ++i) {
      CHECK(again.branches[i].r == c.branches[i].r);
      CHECK(again.branches[i].x == c.branches[i].x);
      CHECK(again.branches[i].b == c.branches[i].b);
      CHECK(again.branches[i].status == c.branches[i].status);
    }
  }
}

TEST_CASE("missing mpc.bus raises MissingField") {
  std::string text = "mpc.baseMVA = 100;\nmpc.branch = [1 2 0 0.1 0 0 0 0 0 0 1;];\n"
                     "mpc.gen = [1 0 0 0 0 1 100 1;];\n";
  try {
    parse_case(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseErrorKind::kMissingField);
  }
}

TEST_CASE("ragged matrix raises MalformedMatrix with the offending line") {
  std::string text = "mpc.baseMVA = 100;\n"
                     "mpc.bus = [\n"
                     "  1 3 0 0 0 0 1 1.0 0 10 1 1.1 0.9;\n"
                     "  2 1 0 0 0 0 1 1.0 0 10;\n"  // line 4: short row
                     "];\n"
                     "mpc.gen = [1 0 0 0 0 1 100 1;];\n"
                     "mpc.branch = [1 2 0 0.1 0 0 0 0 0 0 1;];\n";
  try {
    parse_case(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseErrorKind::kMalformedMatrix);
    CHECK(e.line() == 4);
  }
}

TEST_CASE("dangling branch reference raises with line number") {
  std::string text = "mpc.baseMVA = 100;\n"
                     "mpc.bus = [\n"
                     "  1 3 0 0 0 0 1 1.0 0 10 1 1.1 0.9;\n"
                     "  2 1 0 0 0 0 1 1.0 0 10 1 1.1 0.9;\n"
                     "];\n"
                     "mpc.gen = [1 0 0 0 0 1 100 1;];\n"
                     "mpc.branch = [\n"
                     "  1 7 0 0.1 0 0 0 0 0 0 1;\n"  // line 8: bus 7 missing
                     "];\n";
  try {
    parse_case(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseErrorKind::kDanglingReference);
    CHECK(e.line() == 8);
  }
}

TEST_CASE("unparseable token raises NumberSyntax with line number") {
  std::string text = "mpc.baseMVA = 100;\n"
                     "mpc.bus = [\n"
                     "  1 3 0 zero 0 0 1 1.0 0 10 1 1.1 0.9;\n"  // line 3
                     "];\n"
                     "mpc.gen = [1 0 0 0 0 1 100 1;];\n"
                     "mpc.branch = [];\n";
  try {
    parse_case(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseErrorKind::kNumberSyntax);
    CHECK(e.line() == 3);
  }
}

TEST_CASE("agent graph from electrical topology") {
  SUBCASE("passive middle bus collapses to a direct agent edge") {
    std::string text = "mpc.baseMVA = 100;\n"
                       "mpc.bus = [\n"
                       "  1 3 0 0 0 0 1 1.0 0 10 1 1.1 0.9;\n"
                       "  2 1 5 2 0 0 1 1.0 0 10 1 1.1 0.9;\n"
                       "  3 1 0 0 0 0 1 1.0 0 10 1 1.1 0.9;\n"
                       "];\n"
                       "mpc.gen = [1 0 0 0 0 1 100 1;];\n"
                       "mpc.branch = [\n"
                       "  1 2 0.01 0.1 0 0 0 0 0 0 1;\n"
                       "  2 3 0.01 0.1 0 0 0 0 0 0 1;\n"
                       "];\n";
    PowerCase c = parse_case(text);
    AgentGraph g = to_agent_graph(c, {1, 3});
    CHECK(g.n_agents() == 2);
    REQUIRE(g.edges().size() == 1);
    CHECK(g.edges()[0] == std::pair<int, int>{0, 1});
  }

  SUBCASE("agents on every bus reproduce the branch graph") {
    PowerCase c = parse_case_file(data_path("case14.m"));
    std::vector<int> all_buses;
    for (const auto& b : c.buses) all_buses.push_back(b.id);
    AgentGraph g = to_agent_graph(c, all_buses);
    std::set<std::pair<int, int>> expect;
    for (const auto& br : c.branches) {
      int a = c.bus_index(br.from), b = c.bus_index(br.to);
      expect.emplace(std::min(a, b), std::max(a, b));
    }
    std::set<std::pair<int, int>> got(g.edges().begin(), g.edges().end());
    CHECK(got == expect);
  }

  SUBCASE("single agent yields no edges") {
    PowerCase c = parse_case(kMinimalCase);
    AgentGraph g = to_agent_graph(c, {2});
    CHECK(g.n_agents() == 1);
    CHECK(g.edges().empty());
  }

  SUBCASE("unknown bus is rejected") {
    PowerCase c = parse_case(kMinimalCase);
    CHECK_THROWS_AS(to_agent_graph(c, {1, 99}), UnknownBusError);
  }

  SUBCASE("agent graph output is undirected and self-loop free") {
    PowerCase c = parse_case_file(data_path("case14.m"));
    AgentGraph g = to_agent_graph(c, {1, 2, 3, 6, 8, 13});
    for (auto [a, b] : g.edges()) {
      CHECK(a < b);
      CHECK(b < g.n_agents());
    }
  }
}

TEST_CASE("in-service branch with nonpositive reactance is rejected") {
  std::string text = "mpc.baseMVA = 100;\n"
                     "mpc.bus = [\n"
                     "  1 3 0 0 0 0 1 1.0 0 10 1 1.1 0.9;\n"
                     "  2 1 0 0 0 0 1 1.0 0 10 1 1.1 0.9;\n"
                     "];\n"
                     "mpc.gen = [1 0 0 0 0 1 100 1;];\n"
                     "mpc.branch = [1 2 0.01 0 0 0 0 0 0 0 1;];\n";
  CHECK_THROWS_AS(parse_case(text), ParseError);
}
