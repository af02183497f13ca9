#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fsp/error.hpp"
#include "fsp/lattice.hpp"
#include "fsp/level_operator.hpp"
#include "fsp/measure.hpp"
#include "fsp/spectra.hpp"
#include "fsp/structure.hpp"

namespace fsp {

struct AnalysisOptions {
  SpectraOptions spectra;
  /// Cross-solve atom matching tolerance, relative to K.
  double match_tol_rel = 1e-7;
  /// Exact identities pass when the atom-wise discrepancy is <= this times
  /// the total mass.
  double identity_tol_rel = 1e-9;
  /// Monte Carlo acceptance band in standard errors.
  double mc_sigmas = 4.0;
  /// Threads for word sweeps; <= 0 means all available, 1 runs the serial
  /// reference path.
  int jobs = 0;
  SizeCaps caps = SizeCaps::from_environment();
};

/// How blow-up words are chosen for a sweep.
struct WordSelection {
  enum class Kind { Enumerate, Sample, Explicit };
  Kind kind = Kind::Enumerate;
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::vector<BlowupWord> words;

  static WordSelection enumerate() { return {}; }
  static WordSelection sample(std::size_t count, std::uint64_t seed) {
    return {Kind::Sample, count, seed, {}};
  }
  static WordSelection explicit_words(std::vector<BlowupWord> w) {
    return {Kind::Explicit, w.size(), 0, std::move(w)};
  }
};

std::vector<BlowupWord> select_words(const SelfSimilarStructure& s, int n, const WordSelection& sel,
                                     const SizeCaps& caps);

struct Verdict {
  std::string check;
  int level = 0;
  double discrepancy = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct LevelRecord {
  int n = 0;
  std::size_t vertices = 0;
  std::size_t atoms = 0;
  double mass = 0.0;
  std::optional<double> distance_to_previous;
  /// Check-specific per-level value (e.g. the deficiency d_n).
  std::optional<double> value;
};

struct ConvergenceReport {
  std::string check;
  std::string mode;
  std::optional<std::uint64_t> seed;
  std::vector<LevelRecord> levels;
  std::vector<Verdict> verdicts;
  std::map<std::string, double> tolerances;
  std::map<std::string, double> metrics;

  bool pass() const;
};

/// Level operator for the constant word (1, ..., 1).
LevelOperator default_operator(const SelfSimilarStructure& s, int n, const SizeCaps& caps);

/// N^{-n} times the counting measure of the level-n Neumann or Dirichlet
/// eigenvalues.
PointMeasure density_of_states(const SelfSimilarStructure& s, int n, BoundaryCondition bc,
                               const AnalysisOptions& opts = {});

/// N^{-n} times the N-D eigenvalue counting measure.
PointMeasure nd_density(const SelfSimilarStructure& s, int n, const AnalysisOptions& opts = {});

/// Density of states per level with Levy distances between consecutive levels.
ConvergenceReport dos_convergence(const SelfSimilarStructure& s, const std::vector<int>& levels,
                                  BoundaryCondition bc, const AnalysisOptions& opts = {});

/// One word's contribution to the expectation identity:
/// sum over base labels z of b(z) / b_n(x)^2 * sigma(delta_x), x = embed(z).
/// With `nd` the spectral measures are those of the N-D projection.
PointMeasure identity_term(const SelfSimilarStructure& s, const LatticeLevel& level,
                           const BlowupWord& w, bool nd, const AnalysisOptions& opts = {});

/// Averages identity_term over words and compares with N^{-n} nu^+_n.
ConvergenceReport verify_state_density_identity(const SelfSimilarStructure& s, int n,
                                                const WordSelection& sel,
                                                const AnalysisOptions& opts = {});
/// Same identity for the N-D projections against N^{-n} nu^ND_n.
ConvergenceReport verify_nd_identity(const SelfSimilarStructure& s, int n, const WordSelection& sel,
                                     const AnalysisOptions& opts = {});

/// Every atom (lambda, m) of `lower` must appear in `upper` with
/// multiplicity >= copies * m (atoms matched within match_tol).
Verdict check_replication(const PointMeasure& lower, const PointMeasure& upper, int copies, int level,
                          double match_tol);
/// nu^ND_{n+1} >= N nu^ND_n.
ConvergenceReport verify_nd_replication(const SelfSimilarStructure& s, int n,
                                        const AnalysisOptions& opts = {});

/// sup over lambda of |#{neumann >= lambda} - #{dirichlet >= lambda}|, with
/// values closer than `tol` treated as equal.
int counting_gap(const std::vector<double>& neumann, const std::vector<double>& dirichlet, double tol);
ConvergenceReport interlacing_check(const SelfSimilarStructure& s, int n,
                                    const AnalysisOptions& opts = {});

struct DeficiencyEntry {
  int n = 0;
  std::size_t vertices = 0;
  int nd_dimension = 0;
  double deficiency = 0.0;
};
/// d_n = (|V_n| - dim E^ND_n) / N^n for n = 1..n_max.
std::vector<DeficiencyEntry> nd_deficiency(const SelfSimilarStructure& s, int n_max,
                                           const AnalysisOptions& opts = {});
/// Deficiency sequence with the verdict that it never increases.
ConvergenceReport deficiency_report(const SelfSimilarStructure& s, int n_max,
                                    const AnalysisOptions& opts = {});

/// Compares supports of sigma(delta_x) for the embedded base vertices across
/// words, and checks each is contained in the support of nu^+_n.
ConvergenceReport spectrum_overlap(const SelfSimilarStructure& s, int n,
                                   const std::vector<BlowupWord>& words,
                                   const AnalysisOptions& opts = {});

}  // namespace fsp
