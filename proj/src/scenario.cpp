#include "fluidq/scenario.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "fluidq/error.hpp"

namespace fluidq {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct RawValue {
  std::string text;
  int line = 0;
};

using Section = std::map<std::string, RawValue>;

struct RawScenario {
  std::map<std::string, Section> sections;
  std::string source;
};

[[noreturn]] void parse_fail(const std::string& source, int line, int col,
                             const std::string& msg) {
  fail(ErrorCode::ParseError,
       source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
}

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> k = {
      {"network", {"topology", "v", "w", "theta", "c1", "c2", "c3", "a", "a1", "a2"}},
      {"generator", {"rates"}},
      {"analysis",
       {"beta_min", "beta_max", "beta_points", "alpha_min", "bisect_tol",
        "oracle_grid", "audit_alpha", "audit_beta"}},
      {"sim", {"q0", "i0", "horizon", "dt", "seed"}},
  };
  return k;
}

RawScenario tokenize(const std::string& text, const std::string& source) {
  RawScenario raw;
  raw.source = source;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string s = trim(line);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        parse_fail(source, lineno, static_cast<int>(line.size()), "expected ']'");
      section = trim(s.substr(1, s.size() - 2));
      if (!known_keys().count(section))
        fail(ErrorCode::UnknownKey, source + ":" + std::to_string(lineno) +
                                        ": unknown section [" + section + "]");
      raw.sections[section];  // may legitimately be empty
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      parse_fail(source, lineno, 1, "expected 'key = value'");
    if (section.empty())
      parse_fail(source, lineno, 1, "key outside of any [section]");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) parse_fail(source, lineno, 1, "empty key");
    if (value.empty())
      parse_fail(source, lineno, static_cast<int>(eq + 2), "empty value");
    if (!known_keys().at(section).count(key))
      fail(ErrorCode::UnknownKey, source + ":" + std::to_string(lineno) +
                                      ": unknown key '" + key + "' in [" + section + "]");
    auto [it, inserted] = raw.sections[section].emplace(key, RawValue{value, lineno});
    if (!inserted)
      parse_fail(source, lineno, 1, "duplicate key '" + key + "'");
  }
  return raw;
}

class Reader {
 public:
  Reader(const RawScenario& raw) : raw_(raw) {}

  bool has(const std::string& sec, const std::string& key) const {
    auto s = raw_.sections.find(sec);
    return s != raw_.sections.end() && s->second.count(key) > 0;
  }

  const RawValue& get(const std::string& sec, const std::string& key) const {
    return raw_.sections.at(sec).at(key);
  }

  double number(const std::string& sec, const std::string& key) const {
    const RawValue& rv = get(sec, key);
    return parse_number(rv.text, rv.line, 1);
  }

  std::vector<double> list(const std::string& sec, const std::string& key) const {
    const RawValue& rv = get(sec, key);
    return parse_list(rv.text, rv.line);
  }

  std::vector<std::vector<double>> matrix(const std::string& sec,
                                          const std::string& key) const {
    const RawValue& rv = get(sec, key);
    std::vector<std::vector<double>> rows;
    std::size_t start = 0;
    std::string text = rv.text;
    while (true) {
      std::size_t semi = text.find(';', start);
      std::string row = text.substr(start, semi == std::string::npos
                                               ? std::string::npos
                                               : semi - start);
      rows.push_back(parse_list(row, rv.line));
      if (semi == std::string::npos) break;
      start = semi + 1;
    }
    return rows;
  }

  double parse_number(const std::string& tok, int line, int col) const {
    std::string t = trim(tok);
    const char* begin = t.data();
    const char* end = begin + t.size();
    double out = 0;
    auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc{} || res.ptr != end)
      parse_fail(raw_.source, line, col, "not a number: '" + t + "'");
    return out;
  }

  std::vector<double> parse_list(const std::string& text, int line) const {
    std::vector<double> out;
    std::istringstream ss(text);
    std::string tok;
    int col = 1;
    while (ss >> tok) {
      out.push_back(parse_number(tok, line, col));
      ++col;
    }
    if (out.empty()) parse_fail(raw_.source, line, 1, "empty list");
    return out;
  }

  const std::string& source() const { return raw_.source; }

 private:
  const RawScenario& raw_;
};

[[noreturn]] void invalid(const std::string& msg) {
  fail(ErrorCode::ValidationError, msg);
}

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<double>& xs, const char* sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += shortest(xs[i]);
  }
  return out;
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source_name) {
  RawScenario raw = tokenize(text, source_name);
  Reader r(raw);
  Scenario sc;

  // --- network ---
  if (!r.has("network", "topology")) invalid("missing network.topology");
  std::string topo = trim(r.get("network", "topology").text);
  if (topo == "single") sc.network.topology = Topology::Single;
  else if (topo == "tandem") sc.network.topology = Topology::Tandem;
  else if (topo == "merge") sc.network.topology = Topology::Merge;
  else invalid("topology must be single, tandem or merge, got '" + topo + "'");

  for (const char* key : {"v", "w", "theta"})
    if (!r.has("network", key)) invalid(std::string("missing network.") + key);
  sc.network.v = r.number("network", "v");
  sc.network.w = r.number("network", "w");
  sc.network.theta = r.number("network", "theta");

  int nq = queues_for_topology(sc.network.topology);
  for (int j = 0; j < 3; ++j) {
    std::string key = "c" + std::to_string(j + 1);
    bool present = r.has("network", key);
    if (j < nq && !present)
      invalid("topology " + topo + " needs capacity row " + key);
    if (j >= nq && present)
      invalid("capacity row " + key + " does not belong to a " + topo + " network");
    if (present) sc.network.capacities.push_back(r.list("network", key));
  }
  if (sc.network.topology == Topology::Merge) {
    if (r.has("network", "a")) invalid("merge networks use a1 and a2, not a");
    if (!r.has("network", "a1") || !r.has("network", "a2"))
      invalid("merge networks need inflows a1 and a2");
    sc.network.inflows = {r.number("network", "a1"), r.number("network", "a2")};
  } else {
    if (r.has("network", "a1") || r.has("network", "a2"))
      invalid(topo + " networks use a, not a1/a2");
    if (!r.has("network", "a")) invalid("missing network.a");
    sc.network.inflows = {r.number("network", "a")};
  }

  // --- generator ---
  if (!r.has("generator", "rates")) invalid("missing generator.rates");
  sc.generator = validate_generator(r.matrix("generator", "rates"));

  if (sc.network.num_modes() != sc.generator.m)
    invalid("capacity rows have " + std::to_string(sc.network.num_modes()) +
            " modes but the generator has " + std::to_string(sc.generator.m));

  for (const auto& issue : validate_network(sc.network)) {
    if (issue.error) invalid(issue.message);
    sc.warnings.push_back(issue.message);
  }

  // --- analysis ---
  if (r.has("analysis", "beta_min")) sc.analysis.cert.beta_min = r.number("analysis", "beta_min");
  if (r.has("analysis", "beta_max")) sc.analysis.cert.beta_max = r.number("analysis", "beta_max");
  if (r.has("analysis", "beta_points"))
    sc.analysis.cert.beta_points = static_cast<int>(r.number("analysis", "beta_points"));
  if (r.has("analysis", "alpha_min")) sc.analysis.cert.alpha_min = r.number("analysis", "alpha_min");
  if (r.has("analysis", "bisect_tol")) sc.analysis.bisect_tol = r.number("analysis", "bisect_tol");
  if (r.has("analysis", "oracle_grid"))
    sc.analysis.oracle.max_resolution = static_cast<int>(r.number("analysis", "oracle_grid"));
  if (r.has("analysis", "audit_alpha")) sc.analysis.audit_alpha = r.list("analysis", "audit_alpha");
  if (r.has("analysis", "audit_beta")) sc.analysis.audit_beta = r.number("analysis", "audit_beta");

  if (sc.analysis.cert.beta_min <= 0 || sc.analysis.cert.beta_max <= sc.analysis.cert.beta_min)
    invalid("need 0 < beta_min < beta_max");
  if (sc.analysis.cert.beta_points < 2) invalid("beta_points must be at least 2");
  if (sc.analysis.cert.alpha_min <= 0) invalid("alpha_min must be positive");
  if (sc.analysis.bisect_tol <= 0) invalid("bisect_tol must be positive");
  if (sc.analysis.oracle.max_resolution < 9) invalid("oracle_grid must be at least 9");
  if (sc.analysis.audit_alpha &&
      static_cast<int>(sc.analysis.audit_alpha->size()) != sc.generator.m)
    invalid("audit_alpha needs one entry per mode");

  // --- sim ---
  sc.sim.q0.assign(static_cast<std::size_t>(nq), 0.0);
  if (r.has("sim", "q0")) sc.sim.q0 = r.list("sim", "q0");
  if (static_cast<int>(sc.sim.q0.size()) != nq)
    invalid("q0 needs " + std::to_string(nq) + " entries");
  if (r.has("sim", "i0")) {
    int i0 = static_cast<int>(r.number("sim", "i0"));
    if (i0 < 1 || i0 > sc.generator.m)
      invalid("i0 must be a 1-based mode index in [1, " + std::to_string(sc.generator.m) + "]");
    sc.sim.i0 = i0 - 1;
  }
  if (r.has("sim", "horizon")) sc.sim.horizon = r.number("sim", "horizon");
  if (r.has("sim", "dt")) sc.sim.dt = r.number("sim", "dt");
  if (r.has("sim", "seed")) {
    const RawValue& rv = r.get("sim", "seed");
    std::string t = trim(rv.text);
    std::uint64_t seed = 0;
    auto res = std::from_chars(t.data(), t.data() + t.size(), seed);
    if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
      fail(ErrorCode::ParseError, source_name + ":" + std::to_string(rv.line) +
                                      ":1: seed must be an unsigned integer");
    sc.sim.seed = seed;
  }
  if (sc.sim.dt <= 0) invalid("dt must be positive");
  if (sc.sim.horizon < sc.sim.dt) invalid("horizon must be at least dt");
  std::vector<double> clamped = clamp_to_domain(sc.sim.q0, sc.network);
  for (std::size_t k = 0; k < clamped.size(); ++k)
    if (std::abs(clamped[k] - sc.sim.q0[k]) > 1e-12)
      invalid("q0 outside the state domain");

  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::ParseError, path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "[network]\n";
  out << "topology = " << topology_name(s.network.topology) << "\n";
  out << "v = " << shortest(s.network.v) << "\n";
  out << "w = " << shortest(s.network.w) << "\n";
  out << "theta = " << shortest(s.network.theta) << "\n";
  for (int j = 0; j < s.network.num_queues(); ++j)
    out << "c" << j + 1 << " = " << join(s.network.capacities[static_cast<std::size_t>(j)])
        << "\n";
  if (s.network.topology == Topology::Merge) {
    out << "a1 = " << shortest(s.network.inflows[0]) << "\n";
    out << "a2 = " << shortest(s.network.inflows[1]) << "\n";
  } else {
    out << "a = " << shortest(s.network.inflows[0]) << "\n";
  }

  out << "\n[generator]\nrates = ";
  for (int i = 0; i < s.generator.m; ++i) {
    if (i) out << " ; ";
    for (int j = 0; j < s.generator.m; ++j) {
      if (j) out << " ";
      out << shortest(s.generator.rate(i, j));
    }
  }
  out << "\n";

  out << "\n[analysis]\n";
  out << "beta_min = " << shortest(s.analysis.cert.beta_min) << "\n";
  out << "beta_max = " << shortest(s.analysis.cert.beta_max) << "\n";
  out << "beta_points = " << s.analysis.cert.beta_points << "\n";
  out << "alpha_min = " << shortest(s.analysis.cert.alpha_min) << "\n";
  out << "bisect_tol = " << shortest(s.analysis.bisect_tol) << "\n";
  out << "oracle_grid = " << s.analysis.oracle.max_resolution << "\n";
  if (s.analysis.audit_alpha)
    out << "audit_alpha = " << join(*s.analysis.audit_alpha) << "\n";
  if (s.analysis.audit_beta)
    out << "audit_beta = " << shortest(*s.analysis.audit_beta) << "\n";

  out << "\n[sim]\n";
  out << "q0 = " << join(s.sim.q0) << "\n";
  out << "i0 = " << s.sim.i0 + 1 << "\n";
  out << "horizon = " << shortest(s.sim.horizon) << "\n";
  out << "dt = " << shortest(s.sim.dt) << "\n";
  out << "seed = " << s.sim.seed << "\n";
  return out.str();
}

}  // namespace fluidq
