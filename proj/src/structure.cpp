#include "fsp/structure.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fsp/error.hpp"
#include "fsp/level_operator.hpp"
#include "fsp/union_find.hpp"

namespace fsp {

using nlohmann::json;

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::InvalidStructure: return "InvalidStructure";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::SizeCapExceeded: return "SizeCapExceeded";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyInterior: return "EmptyInterior";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::NonpositiveMass: return "NonpositiveMass";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::SolverFailure: return "SolverFailure";
  }
  return "Unknown";
}

SizeCaps SizeCaps::from_environment() {
  SizeCaps caps;
  if (const char* env = std::getenv("FRACTAL_SPECTRA_CAP"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      caps.max_vertices = static_cast<std::size_t>(v);
      caps.max_dense = static_cast<std::size_t>(v);
    }
  }
  return caps;
}

int SelfSimilarStructure::label_index(std::string_view label) const {
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    if (boundary[i].label == label) return static_cast<int>(i);
  }
  return -1;
}

double SelfSimilarStructure::conductance(int u, int v) const {
  const auto& lu = boundary[static_cast<std::size_t>(u)].label;
  const auto& lv = boundary[static_cast<std::size_t>(v)].label;
  double a = 0.0;
  for (const auto& c : conductances) {
    if ((c.u == lu && c.v == lv) || (c.u == lv && c.v == lu)) a = c.a;
  }
  return a;
}

double SelfSimilarStructure::mass(int z) const {
  return base_mass.at(boundary[static_cast<std::size_t>(z)].label);
}

namespace {

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorKind::SchemaError, msg); }

const json& field(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema("missing field '" + std::string(key) + "' in " + where);
  return *it;
}

int as_int(const json& j, const std::string& what) {
  if (!j.is_number_integer()) schema(what + " must be an integer");
  return j.get<int>();
}

double as_number(const json& j, const std::string& what) {
  if (!j.is_number()) schema(what + " must be a number");
  return j.get<double>();
}

std::string as_string(const json& j, const std::string& what) {
  if (!j.is_string()) schema(what + " must be a string");
  return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& what) {
  if (!j.is_array()) schema(what + " must be an array");
  return j;
}

void require_keys(const json& obj, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  if (!obj.is_object()) schema(where + " must be an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) schema("unexpected field '" + it.key() + "' in " + where);
  }
}

CellPoint cell_point(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) schema(where + " must be [cell, label]");
  return {as_int(j[0], where + " cell"), as_string(j[1], where + " label")};
}

std::optional<double> common_gamma(const std::vector<double>& alpha, const std::vector<double>& beta) {
  if (alpha.empty() || alpha.size() != beta.size()) return std::nullopt;
  const double g0 = 1.0 / (alpha[0] * beta[0]);
  if (!std::isfinite(g0) || g0 <= 0.0) return std::nullopt;
  for (std::size_t i = 1; i < alpha.size(); ++i) {
    const double gi = 1.0 / (alpha[i] * beta[i]);
    if (!(std::abs(gi - g0) <= kHypothesisTolerance * std::abs(g0))) return std::nullopt;
  }
  return g0;
}

}  // namespace

SelfSimilarStructure parse_structure(std::string_view text) {
  // nlohmann keeps the last of duplicated keys silently; track them per object.
  std::vector<std::set<std::string>> seen;
  std::string duplicate;
  json::parser_callback_t cb = [&](int, json::parse_event_t ev, json& parsed) {
    if (ev == json::parse_event_t::object_start) {
      seen.emplace_back();
    } else if (ev == json::parse_event_t::object_end) {
      seen.pop_back();
    } else if (ev == json::parse_event_t::key) {
      const auto key = parsed.get<std::string>();
      if (!seen.back().insert(key).second && duplicate.empty()) duplicate = key;
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), cb);
  } catch (const json::parse_error& e) {
    schema(std::string("malformed JSON: ") + e.what());
  }
  if (!duplicate.empty()) schema("duplicate field '" + duplicate + "'");
  require_keys(doc, {"name", "description", "n", "boundary", "gluings", "conductances", "mass",
                     "alpha", "beta"},
               "structure");

  SelfSimilarStructure s;
  s.n_cells = as_int(field(doc, "n", "structure"), "n");
  if (s.n_cells < 1) schema("n must be positive");

  std::set<std::string> labels;
  for (const auto& b : as_array(field(doc, "boundary", "structure"), "boundary")) {
    require_keys(b, {"label", "cell"}, "boundary entry");
    BoundaryLabel bl{as_string(field(b, "label", "boundary entry"), "boundary label"),
                     as_int(field(b, "cell", "boundary entry"), "boundary cell")};
    if (!labels.insert(bl.label).second) schema("duplicate boundary label '" + bl.label + "'");
    s.boundary.push_back(std::move(bl));
  }

  for (const auto& g : as_array(field(doc, "gluings", "structure"), "gluings")) {
    if (!g.is_array() || g.size() != 2) schema("each gluing must be a pair [[cell,label],[cell,label]]");
    s.gluings.push_back({cell_point(g[0], "gluing"), cell_point(g[1], "gluing")});
  }

  for (const auto& c : as_array(field(doc, "conductances", "structure"), "conductances")) {
    require_keys(c, {"u", "v", "a"}, "conductance entry");
    s.conductances.push_back({as_string(field(c, "u", "conductance"), "conductance u"),
                              as_string(field(c, "v", "conductance"), "conductance v"),
                              as_number(field(c, "a", "conductance"), "conductance a")});
  }

  for (const auto& m : as_array(field(doc, "mass", "structure"), "mass")) {
    require_keys(m, {"label", "b"}, "mass entry");
    const auto label = as_string(field(m, "label", "mass entry"), "mass label");
    const double b = as_number(field(m, "b", "mass entry"), "mass b");
    if (!s.base_mass.emplace(label, b).second) schema("duplicate mass for label '" + label + "'");
  }
  for (const auto& b : s.boundary) {
    if (!s.base_mass.contains(b.label)) schema("missing mass for boundary label '" + b.label + "'");
  }

  for (const auto& a : as_array(field(doc, "alpha", "structure"), "alpha")) s.alpha.push_back(as_number(a, "alpha"));
  for (const auto& b : as_array(field(doc, "beta", "structure"), "beta")) s.beta.push_back(as_number(b, "beta"));
  if (s.alpha.size() != static_cast<std::size_t>(s.n_cells)) schema("alpha must have n entries");
  if (s.beta.size() != static_cast<std::size_t>(s.n_cells)) schema("beta must have n entries");

  s.gamma = common_gamma(s.alpha, s.beta);
  return s;
}

SelfSimilarStructure load_structure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) schema("cannot open structure file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_structure(ss.str());
}

ValidationReport validate_structure(const SelfSimilarStructure& s) {
  ValidationReport r;
  auto fail = [&r](std::string rule, std::string msg) {
    r.violations.push_back({std::move(rule), std::move(msg)});
  };
  const int big_n = s.n_cells;
  const std::size_t k = s.boundary.size();

  if (big_n < 2) fail("TooFewCells", "N must be at least 2");
  if (k < 2) fail("TooFewBoundaryPoints", "at least two boundary labels are required");

  std::set<int> tagged;
  for (const auto& b : s.boundary) {
    if (b.cell < 1 || b.cell > big_n) {
      fail("CellOutOfRange", "boundary label '" + b.label + "' has cell " + std::to_string(b.cell));
    } else if (!tagged.insert(b.cell).second) {
      fail("DuplicateFixedPoint", "cell " + std::to_string(b.cell) + " carries two boundary labels");
    }
  }
  for (int i = 1; i <= big_n; ++i) {
    if (!tagged.contains(i)) r.notes.push_back("cell " + std::to_string(i) + " contributes no boundary label");
  }

  std::set<std::pair<CellPoint, CellPoint>> glued;
  bool gluings_ok = true;
  for (const auto& g : s.gluings) {
    for (const auto* p : {&g.first, &g.second}) {
      if (p->cell < 1 || p->cell > big_n) {
        fail("CellOutOfRange", "gluing refers to cell " + std::to_string(p->cell));
        gluings_ok = false;
      }
      if (s.label_index(p->label) < 0) {
        fail("UnknownLabel", "gluing refers to unknown label '" + p->label + "'");
        gluings_ok = false;
      }
    }
    if (g.first.cell == g.second.cell) {
      fail("SelfGluing", "gluing within cell " + std::to_string(g.first.cell));
      gluings_ok = false;
    }
    auto key = std::minmax(g.first, g.second);
    if (!glued.insert(key).second) fail("DuplicateGluing", "gluing listed twice");
  }

  bool conductances_ok = true;
  std::map<std::pair<std::string, std::string>, double> seen_a;
  for (const auto& c : s.conductances) {
    if (s.label_index(c.u) < 0 || s.label_index(c.v) < 0) {
      fail("UnknownLabel", "conductance between unknown labels '" + c.u + "', '" + c.v + "'");
      conductances_ok = false;
      continue;
    }
    if (c.u == c.v) {
      fail("SelfConductance", "conductance on the diagonal at '" + c.u + "'");
      conductances_ok = false;
    }
    if (!(c.a >= 0.0) || !std::isfinite(c.a)) {
      fail("NegativeConductance", "conductance '" + c.u + "'-'" + c.v + "' must be >= 0");
      conductances_ok = false;
    }
    const auto key = std::minmax(c.u, c.v);
    if (auto [it, inserted] = seen_a.emplace(key, c.a); !inserted && it->second != c.a) {
      fail("AsymmetricConductance", "conflicting values for '" + c.u + "'-'" + c.v + "'");
      conductances_ok = false;
    }
  }

  for (const auto& [label, b] : s.base_mass) {
    if (s.label_index(label) < 0) fail("UnknownLabel", "mass for unknown label '" + label + "'");
    if (!(b > 0.0) || !std::isfinite(b)) fail("NonpositiveMass", "mass of '" + label + "' must be > 0");
  }

  bool weights_ok = s.alpha.size() == static_cast<std::size_t>(big_n) &&
                    s.beta.size() == static_cast<std::size_t>(big_n);
  if (!weights_ok) fail("WeightArity", "alpha and beta need N entries");
  for (double a : s.alpha) {
    if (!(a > 0.0 && a < 1.0)) {
      fail("AlphaRange", "alpha entries must lie in (0,1)");
      weights_ok = false;
      break;
    }
  }
  double beta_sum = 0.0;
  for (double b : s.beta) {
    beta_sum += b;
    if (!(b > 0.0 && b < 1.0)) {
      fail("BetaRange", "beta entries must lie in (0,1)");
      weights_ok = false;
      break;
    }
  }
  if (weights_ok && std::abs(beta_sum - 1.0) > kHypothesisTolerance) {
    fail("BetaSum", "beta must sum to 1");
    weights_ok = false;
  }
  std::optional<double> gamma;
  if (weights_ok) {
    gamma = common_gamma(s.alpha, s.beta);
    if (!gamma) fail("HypothesisH", "alpha_i * beta_i is not constant across cells");
  }

  // Irreducibility of A0 on the labels.
  if (conductances_ok && k >= 2) {
    UnionFind uf(k);
    for (std::size_t u = 0; u < k; ++u) {
      for (std::size_t v = u + 1; v < k; ++v) {
        if (s.conductance(static_cast<int>(u), static_cast<int>(v)) > 0.0) uf.unite(u, v);
      }
    }
    bool connected = true;
    for (std::size_t u = 1; u < k; ++u) connected = connected && uf.find(u) == uf.find(0);
    if (!connected) fail("NotIrreducible", "positive conductances do not connect the boundary labels");
  }

  // Level-1 connectivity: cells linked by gluings.
  if (gluings_ok && big_n >= 2) {
    UnionFind uf(static_cast<std::size_t>(big_n));
    for (const auto& g : s.gluings) {
      uf.unite(static_cast<std::size_t>(g.first.cell - 1), static_cast<std::size_t>(g.second.cell - 1));
    }
    bool connected = true;
    for (int i = 1; i < big_n; ++i) connected = connected && uf.find(static_cast<std::size_t>(i)) == uf.find(0);
    if (!connected) fail("Level1Disconnected", "gluings do not connect the N cells");
  }

  r.ok = r.violations.empty();
  if (r.ok) {
    r.derived["gamma"] = *gamma;
    r.derived["K"] = norm_bound(s);
  }
  return r;
}

void require_valid(const SelfSimilarStructure& s) {
  const ValidationReport r = validate_structure(s);
  if (r.ok) return;
  std::string msg = "invalid structure:";
  for (const auto& v : r.violations) msg += " [" + v.rule + "] " + v.message + ";";
  throw Error(ErrorKind::InvalidStructure, msg);
}

SelfSimilarStructure builtin_structure(std::string_view name) {
  SelfSimilarStructure s;
  if (name == "interval") {
    s.n_cells = 2;
    s.boundary = {{"q0", 1}, {"q1", 2}};
    s.gluings = {{{1, "q1"}, {2, "q0"}}};
    s.conductances = {{"q0", "q1", 1.0}};
    s.base_mass = {{"q0", 0.5}, {"q1", 0.5}};
    s.alpha = {0.5, 0.5};
    s.beta = {0.5, 0.5};
  } else if (name == "sg3") {
    s.n_cells = 3;
    s.boundary = {{"q1", 1}, {"q2", 2}, {"q3", 3}};
    for (int i = 1; i <= 3; ++i) {
      for (int j = i + 1; j <= 3; ++j) {
        s.gluings.push_back({{i, "q" + std::to_string(j)}, {j, "q" + std::to_string(i)}});
        s.conductances.push_back({"q" + std::to_string(i), "q" + std::to_string(j), 1.0});
      }
    }
    s.base_mass = {{"q1", 1.0 / 3}, {"q2", 1.0 / 3}, {"q3", 1.0 / 3}};
    s.alpha = {0.6, 0.6, 0.6};
    s.beta = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  } else {
    throw Error(ErrorKind::UnknownName, "unknown builtin structure '" + std::string(name) + "'");
  }
  s.gamma = common_gamma(s.alpha, s.beta);
  return s;
}

}  // namespace fsp
