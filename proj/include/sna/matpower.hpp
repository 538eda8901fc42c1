#pragma once

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sna/graph.hpp"

namespace sna {

// Subset of a MATPOWER case consumed here: baseMVA, bus, branch, gen.
// Extra columns and extra mpc.* fields (gencost, version, ...) are ignored.
struct BusRow {
  int id = 0;
  int type = 1;
  double pd = 0.0;       // MW
  double qd = 0.0;       // MVAr
  double vm = 1.0;       // pu
  double va = 0.0;       // degrees
  double base_kv = 0.0;  // kV
};

struct BranchRow {
  int from = 0;
  int to = 0;
  double r = 0.0;  // pu
  double x = 0.0;  // pu
  double b = 0.0;  // pu total charging
  int status = 1;
};

struct GenRow {
  int bus = 0;
  double pg = 0.0;  // MW
  double qg = 0.0;  // MVAr
  double vg = 1.0;  // pu
  int status = 1;
};

struct PowerCase {
  double base_mva = 100.0;
  std::vector<BusRow> buses;
  std::vector<BranchRow> branches;
  std::vector<GenRow> gens;

  const BusRow* find_bus(int id) const;
  int bus_index(int id) const;  // -1 when absent
};

enum class ParseErrorKind { kMalformedMatrix, kMissingField, kDanglingReference, kNumberSyntax };

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, const std::string& what);
  ParseErrorKind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  ParseErrorKind kind_;
  int line_;
};

class UnknownBusError : public std::runtime_error {
 public:
  explicit UnknownBusError(int bus_id);
  int bus_id() const { return bus_id_; }

 private:
  int bus_id_;
};

// Parses a case file in the restricted grammar: `mpc.<field> = <scalar>;`
// assignments and `mpc.<field> = [ rows ];` numeric matrices with rows
// terminated by `;`, plus `%` line comments. Throws ParseError with the
// offending line number.
PowerCase parse_case(std::istream& in);
PowerCase parse_case(const std::string& text);
PowerCase parse_case_file(const std::string& path);

// Re-emits the consumed fields at full precision; parse(emit(c)) == c.
std::string to_matpower_text(const PowerCase& c);

// One agent per listed bus; agents are adjacent iff their buses are joined
// by an in-service branch path that passes through no other agent bus.
AgentGraph to_agent_graph(const PowerCase& c, const std::vector<int>& dg_buses);

}  // namespace sna
