#include "sna/matpower.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace sna {

namespace {

const char* kind_name(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::kMalformedMatrix: return "MalformedMatrix";
    case ParseErrorKind::kMissingField: return "MissingField";
    case ParseErrorKind::kDanglingReference: return "DanglingReference";
    case ParseErrorKind::kNumberSyntax: return "NumberSyntax";
  }
  return "ParseError";
}

std::string format_error(ParseErrorKind kind, int line, const std::string& what) {
  std::ostringstream os;
  os << kind_name(kind) << " (line " << line << "): " << what;
  return os.str();
}

// Character cursor over the comment-stripped file, tracking line numbers.
class Scanner {
 public:
  explicit Scanner(std::istream& in) {
    std::string line;
    while (std::getline(in, line)) {
      auto pct = line.find('%');
      if (pct != std::string::npos) line.erase(pct);
      lines_.push_back(line);
    }
  }

  bool eof() const { return row_ >= lines_.size(); }
  int line_number() const { return static_cast<int>(row_) + 1; }

  char peek() const { return eof() ? '\0' : current()[col_]; }

  char get() {
    char c = peek();
    advance();
    return c;
  }

  void skip_ws() {
    while (!eof()) {
      if (col_ >= current().size()) {
        ++row_;
        col_ = 0;
        continue;
      }
      char c = current()[col_];
      if (c == ' ' || c == '\t' || c == '\r' || c == ',') {
        ++col_;
        continue;
      }
      break;
    }
  }

  void skip_line() {
    ++row_;
    col_ = 0;
  }

  // Reads up to whitespace or any of the stop characters.
  std::string token(const std::string& stops) {
    std::string out;
    while (!eof() && col_ < current().size()) {
      char c = current()[col_];
      if (c == ' ' || c == '\t' || c == '\r' || c == ',' || stops.find(c) != std::string::npos)
        break;
      out.push_back(c);
      ++col_;
    }
    return out;
  }

 private:
  const std::string& current() const { return lines_[row_]; }
  void advance() {
    if (eof()) return;
    if (col_ >= current().size()) {
      ++row_;
      col_ = 0;
    } else {
      ++col_;
    }
  }

  std::vector<std::string> lines_;
  std::size_t row_ = 0;
  std::size_t col_ = 0;
};

double parse_number(const std::string& tok, int line) {
  const char* begin = tok.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ParseError(ParseErrorKind::kNumberSyntax, line, "unparseable token '" + tok + "'");
  return v;
}

int as_int(double v) { return static_cast<int>(std::llround(v)); }

struct RawMatrix {
  bool present = false;
  int start_line = 0;
  std::vector<std::vector<double>> rows;
  std::vector<int> row_lines;
};

// Parses `[ rows ]`, validating numbers when `strict` (known fields); for
// unknown fields the content is structurally skipped only.
RawMatrix parse_matrix(Scanner& sc, bool strict) {
  RawMatrix m;
  m.present = true;
  m.start_line = sc.line_number();
  sc.get();  // '['
  std::vector<double> row;
  int row_line = sc.line_number();
  while (true) {
    sc.skip_ws();
    if (sc.eof())
      throw ParseError(ParseErrorKind::kMalformedMatrix, m.start_line, "unterminated matrix");
    char c = sc.peek();
    if (c == ';') {
      sc.get();
      if (!row.empty()) {
        m.rows.push_back(std::move(row));
        m.row_lines.push_back(row_line);
        row.clear();
      }
      continue;
    }
    if (c == ']') {
      sc.get();
      if (!row.empty()) {
        m.rows.push_back(std::move(row));
        m.row_lines.push_back(row_line);
      }
      break;
    }
    if (row.empty()) row_line = sc.line_number();
    int tok_line = sc.line_number();
    std::string tok = sc.token(";]");
    if (tok.empty())
      throw ParseError(ParseErrorKind::kMalformedMatrix, tok_line, "unexpected character in matrix");
    if (strict)
      row.push_back(parse_number(tok, tok_line));
    else
      row.push_back(0.0);
  }
  sc.skip_ws();
  if (sc.peek() == ';') sc.get();
  return m;
}

void require_rectangular(const RawMatrix& m, std::size_t min_cols, const std::string& name) {
  if (m.rows.empty())
    throw ParseError(ParseErrorKind::kMalformedMatrix, m.start_line, "empty " + name + " matrix");
  std::size_t width = m.rows.front().size();
  for (std::size_t r = 0; r < m.rows.size(); ++r) {
    if (m.rows[r].size() != width)
      throw ParseError(ParseErrorKind::kMalformedMatrix, m.row_lines[r],
                       "ragged row in " + name + " matrix");
  }
  if (width < min_cols)
    throw ParseError(ParseErrorKind::kMalformedMatrix, m.start_line,
                     name + " matrix has too few columns");
}

}  // namespace

ParseError::ParseError(ParseErrorKind kind, int line, const std::string& what)
    : std::runtime_error(format_error(kind, line, what)), kind_(kind), line_(line) {}

UnknownBusError::UnknownBusError(int bus_id)
    : std::runtime_error("unknown bus id " + std::to_string(bus_id)), bus_id_(bus_id) {}

const BusRow* PowerCase::find_bus(int id) const {
  for (const auto& b : buses)
    if (b.id == id) return &b;
  return nullptr;
}

int PowerCase::bus_index(int id) const {
  for (std::size_t i = 0; i < buses.size(); ++i)
    if (buses[i].id == id) return static_cast<int>(i);
  return -1;
}

PowerCase parse_case(std::istream& in) {
  Scanner sc(in);
  bool have_base = false;
  double base_mva = 0.0;
  int base_line = 0;
  std::map<std::string, RawMatrix> matrices;

  while (true) {
    sc.skip_ws();
    if (sc.eof()) break;
    std::string head = sc.token("=[];");
    if (head.rfind("mpc.", 0) != 0) {
      sc.skip_line();  // e.g. the `function mpc = ...` header
      continue;
    }
    std::string field = head.substr(4);
    sc.skip_ws();
    if (sc.peek() != '=') {
      sc.skip_line();
      continue;
    }
    sc.get();  // '='
    sc.skip_ws();
    bool known_matrix = (field == "bus" || field == "branch" || field == "gen");
    if (sc.peek() == '[') {
      RawMatrix m = parse_matrix(sc, known_matrix);
      if (known_matrix) matrices[field] = std::move(m);
    } else if (field == "baseMVA") {
      int line = sc.line_number();
      std::string tok = sc.token(";");
      base_mva = parse_number(tok, line);
      base_line = line;
      have_base = true;
      sc.skip_ws();
      if (sc.peek() == ';') sc.get();
    } else {
      // Unknown scalar (version string etc.): skip to the terminator.
      while (!sc.eof() && sc.peek() != ';') sc.get();
      if (!sc.eof()) sc.get();
    }
  }

  if (!have_base)
    throw ParseError(ParseErrorKind::kMissingField, 0, "mpc.baseMVA not found");
  if (!matrices.count("bus"))
    throw ParseError(ParseErrorKind::kMissingField, 0, "mpc.bus not found");
  if (!matrices.count("branch"))
    throw ParseError(ParseErrorKind::kMissingField, 0, "mpc.branch not found");
  if (!matrices.count("gen"))
    throw ParseError(ParseErrorKind::kMissingField, 0, "mpc.gen not found");
  if (base_mva <= 0.0)
    throw ParseError(ParseErrorKind::kNumberSyntax, base_line, "baseMVA must be positive");

  PowerCase c;
  c.base_mva = base_mva;

  const RawMatrix& bus = matrices["bus"];
  require_rectangular(bus, 10, "bus");
  for (const auto& row : bus.rows) {
    BusRow b;
    b.id = as_int(row[0]);
    b.type = as_int(row[1]);
    b.pd = row[2];
    b.qd = row[3];
    b.vm = row[7];
    b.va = row[8];
    b.base_kv = row[9];
    c.buses.push_back(b);
  }

  const RawMatrix& branch = matrices["branch"];
  require_rectangular(branch, 11, "branch");
  for (std::size_t r = 0; r < branch.rows.size(); ++r) {
    const auto& row = branch.rows[r];
    BranchRow br;
    br.from = as_int(row[0]);
    br.to = as_int(row[1]);
    br.r = row[2];
    br.x = row[3];
    br.b = row[4];
    br.status = as_int(row[10]);
    if (c.find_bus(br.from) == nullptr || c.find_bus(br.to) == nullptr)
      throw ParseError(ParseErrorKind::kDanglingReference, branch.row_lines[r],
                       "branch references unknown bus");
    if (br.status != 0 && (br.r < 0.0 || br.x <= 0.0))
      throw ParseError(ParseErrorKind::kMalformedMatrix, branch.row_lines[r],
                       "in-service branch needs r >= 0 and x > 0");
    c.branches.push_back(br);
  }

  const RawMatrix& gen = matrices["gen"];
  require_rectangular(gen, 8, "gen");
  for (std::size_t r = 0; r < gen.rows.size(); ++r) {
    const auto& row = gen.rows[r];
    GenRow g;
    g.bus = as_int(row[0]);
    g.pg = row[1];
    g.qg = row[2];
    g.vg = row[5];
    g.status = as_int(row[7]);
    if (c.find_bus(g.bus) == nullptr)
      throw ParseError(ParseErrorKind::kDanglingReference, gen.row_lines[r],
                       "generator references unknown bus");
    c.gens.push_back(g);
  }
  return c;
}

PowerCase parse_case(const std::string& text) {
  std::istringstream is(text);
  return parse_case(is);
}

PowerCase parse_case_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open case file: " + path);
  return parse_case(in);
}

std::string to_matpower_text(const PowerCase& c) {
  auto num = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "function mpc = exported\n";
  os << "mpc.baseMVA = " << num(c.base_mva) << ";\n";
  os << "mpc.bus = [\n";
  for (const auto& b : c.buses)
    os << "  " << b.id << " " << b.type << " " << num(b.pd) << " " << num(b.qd) << " 0 0 1 "
       << num(b.vm) << " " << num(b.va) << " " << num(b.base_kv) << " 1 1.1 0.9;\n";
  os << "];\n";
  os << "mpc.gen = [\n";
  for (const auto& g : c.gens)
    os << "  " << g.bus << " " << num(g.pg) << " " << num(g.qg) << " 0 0 " << num(g.vg)
       << " 100 " << g.status << " 0 0;\n";
  os << "];\n";
  os << "mpc.branch = [\n";
  for (const auto& br : c.branches)
    os << "  " << br.from << " " << br.to << " " << num(br.r) << " " << num(br.x) << " "
       << num(br.b) << " 0 0 0 0 0 " << br.status << ";\n";
  os << "];\n";
  return os.str();
}

AgentGraph to_agent_graph(const PowerCase& c, const std::vector<int>& dg_buses) {
  if (dg_buses.empty()) throw std::invalid_argument("to_agent_graph: dg_buses is empty");
  for (int id : dg_buses)
    if (c.find_bus(id) == nullptr) throw UnknownBusError(id);

  // Bus-level adjacency over in-service branches.
  std::map<int, std::vector<int>> bus_adj;
  for (const auto& br : c.branches) {
    if (br.status == 0) continue;
    bus_adj[br.from].push_back(br.to);
    bus_adj[br.to].push_back(br.from);
  }
  std::map<int, std::vector<int>> agents_on_bus;
  for (std::size_t a = 0; a < dg_buses.size(); ++a)
    agents_on_bus[dg_buses[a]].push_back(static_cast<int>(a));

  std::vector<std::pair<int, int>> edges;
  // Co-located agents are adjacent.
  for (const auto& [bus, agents] : agents_on_bus) {
    (void)bus;
    for (std::size_t i = 0; i < agents.size(); ++i)
      for (std::size_t j = i + 1; j < agents.size(); ++j)
        edges.emplace_back(agents[i], agents[j]);
  }
  // BFS from each agent bus through passive buses only; any agent bus on the
  // frontier boundary is a neighbor.
  for (const auto& [src_bus, src_agents] : agents_on_bus) {
    std::set<int> visited{src_bus};
    std::deque<int> queue{src_bus};
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      auto it = bus_adj.find(u);
      if (it == bus_adj.end()) continue;
      for (int v : it->second) {
        if (visited.count(v)) continue;
        visited.insert(v);
        auto at = agents_on_bus.find(v);
        if (at != agents_on_bus.end()) {
          for (int a : src_agents)
            for (int b : at->second) edges.emplace_back(a, b);
          continue;  // do not expand through agent buses
        }
        queue.push_back(v);
      }
    }
  }
  return AgentGraph(static_cast<int>(dg_buses.size()), std::move(edges));
}

}  // namespace sna
