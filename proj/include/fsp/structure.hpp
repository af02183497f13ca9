#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fsp {

/// A boundary point of the base figure: the fixed point of cell `cell`.
struct BoundaryLabel {
  std::string label;
  int cell = 0;  // 1-based
};

/// One side of a gluing: boundary label `label` of the copy in cell `cell`.
struct CellPoint {
  int cell = 0;  // 1-based
  std::string label;

  auto operator<=>(const CellPoint&) const = default;
};

struct Gluing {
  CellPoint first;
  CellPoint second;
};

struct Conductance {
  std::string u;
  std::string v;
  double a = 0.0;
};

/// Combinatorial blueprint of a finitely ramified self-similar lattice and
/// its energy/measure weights.
struct SelfSimilarStructure {
  int n_cells = 0;
  std::vector<BoundaryLabel> boundary;
  std::vector<Gluing> gluings;
  std::vector<Conductance> conductances;
  std::map<std::string, double> base_mass;
  std::vector<double> alpha;
  std::vector<double> beta;
  /// (alpha_i beta_i)^{-1}; set only when the products agree across cells.
  std::optional<double> gamma;

  std::size_t boundary_size() const { return boundary.size(); }
  /// Index of `label` in `boundary`, or -1.
  int label_index(std::string_view label) const;
  /// Conductance a_{u,v} by boundary index (0 when not listed).
  double conductance(int u, int v) const;
  /// Base mass b by boundary index.
  double mass(int z) const;
};

struct Violation {
  std::string rule;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
  /// Derived quantities: "gamma" and "K" on success.
  std::map<std::string, double> derived;
  /// Non-fatal observations (e.g. cells without a boundary label).
  std::vector<std::string> notes;
};

inline constexpr double kHypothesisTolerance = 1e-12;

/// Parses the JSON structure document. Only the schema shape is checked;
/// semantics are left to validate_structure().
SelfSimilarStructure parse_structure(std::string_view text);
SelfSimilarStructure load_structure_file(const std::string& path);

ValidationReport validate_structure(const SelfSimilarStructure& s);

/// Canonical fixtures: "interval" and "sg3".
SelfSimilarStructure builtin_structure(std::string_view name);

/// Throws SchemaError carrying the report's violations unless `s` is valid.
void require_valid(const SelfSimilarStructure& s);

}  // namespace fsp
