#include "fsp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>

#include "fsp/sweep.hpp"

namespace fsp {

namespace {

double cells_power(const SelfSimilarStructure& s, int n) {
  return std::pow(static_cast<double>(s.n_cells), n);
}

double match_tol(const SelfSimilarStructure& s, const AnalysisOptions& opts) {
  return opts.match_tol_rel * norm_bound(s);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Common atom grid for several measures: weights[i][c] is the mass of
// measure i in cluster c.
struct AlignedMeasures {
  std::vector<double> positions;
  std::vector<std::vector<double>> weights;
};

AlignedMeasures align(std::span<const PointMeasure> parts, double tol) {
  std::vector<Atom> all;
  for (const auto& p : parts) all.insert(all.end(), p.atoms().begin(), p.atoms().end());
  std::vector<double> xs;
  for (const auto& a : all) xs.push_back(a.lambda);
  std::sort(xs.begin(), xs.end());
  AlignedMeasures out;
  std::vector<double> upper;  // upper edge of each cluster
  std::size_t i = 0;
  while (i < xs.size()) {
    std::size_t j = i + 1;
    while (j < xs.size() && xs[j] - xs[j - 1] <= tol) ++j;
    out.positions.push_back(0.5 * (xs[i] + xs[j - 1]));
    upper.push_back(xs[j - 1]);
    i = j;
  }
  out.weights.assign(parts.size(), std::vector<double>(out.positions.size(), 0.0));
  for (std::size_t p = 0; p < parts.size(); ++p) {
    for (const auto& a : parts[p].atoms()) {
      const auto c = static_cast<std::size_t>(
          std::lower_bound(upper.begin(), upper.end(), a.lambda) - upper.begin());
      out.weights[p][c] += a.weight;
    }
  }
  return out;
}

ConvergenceReport verify_identity(const SelfSimilarStructure& s, int n, const WordSelection& sel,
                                  const AnalysisOptions& opts, bool nd) {
  require_valid(s);
  const std::string check = nd ? "nd-identity" : "identity";
  const LatticeLevel level = build_level(s, n, opts.caps);
  const std::vector<BlowupWord> words = select_words(s, n, sel, opts.caps);
  if (words.empty()) throw Error(ErrorKind::IndexOutOfRange, "no words selected");
  const double tol = match_tol(s, opts);

  auto term = [&](const BlowupWord& w) { return identity_term(s, level, w, nd, opts); };
  const std::span<const BlowupWord> span(words);
  std::vector<PointMeasure> terms = map_words(span, term, opts.jobs);

  const LevelOperator op = assemble_level(s, level, words.front());
  const double scale = 1.0 / cells_power(s, n);
  PointMeasure rhs;
  if (nd) {
    rhs = n == 0 ? PointMeasure({}, tol) : nd_counting_measure(op, scale, opts.spectra);
  } else {
    rhs = counting_measure(solve_pencil(neumann_pencil(op), opts.caps), scale,
                           opts.spectra.cluster_tol);
  }

  terms.push_back(rhs);
  const AlignedMeasures grid = align(terms, tol);
  const std::size_t count = words.size();
  const auto& rhs_w = grid.weights.back();

  const double mass = rhs.total_mass();
  double discrepancy = 0.0;
  double worst_z = 0.0;
  bool pass = true;
  std::string detail;
  for (std::size_t c = 0; c < grid.positions.size(); ++c) {
    double mean = 0.0;
    for (std::size_t k = 0; k < count; ++k) mean += grid.weights[k][c];
    mean /= static_cast<double>(count);
    const double diff = std::abs(mean - rhs_w[c]);
    discrepancy = std::max(discrepancy, diff);
    double allowed = opts.identity_tol_rel * std::max(mass, 1e-300);
    if (sel.kind == WordSelection::Kind::Sample) {
      double var = 0.0;
      for (std::size_t k = 0; k < count; ++k) var += std::pow(grid.weights[k][c] - mean, 2);
      var /= static_cast<double>(count > 1 ? count - 1 : 1);
      const double se = std::sqrt(var / static_cast<double>(count));
      if (se > 0.0) worst_z = std::max(worst_z, diff / se);
      allowed += opts.mc_sigmas * se;
    }
    if (diff > allowed && pass) {
      pass = false;
      detail = "atom at " + fmt(grid.positions[c]) + ": mean " + fmt(mean) + " vs " + fmt(rhs_w[c]);
    }
  }
  if (mass == 0.0 && discrepancy > 0.0) pass = false;

  ConvergenceReport r;
  r.check = check;
  r.mode = sel.kind == WordSelection::Kind::Enumerate ? "enumerate"
           : sel.kind == WordSelection::Kind::Sample  ? "montecarlo"
                                                      : "words";
  if (sel.kind == WordSelection::Kind::Sample) r.seed = sel.seed;
  r.levels.push_back({n, level.vertex_count(), rhs.size(), mass, std::nullopt, std::nullopt});
  const double tolerance = opts.identity_tol_rel * mass;
  r.verdicts.push_back({check, n, discrepancy, tolerance, pass, detail});
  r.tolerances = {{"identity_rel", opts.identity_tol_rel},
                  {"match", tol},
                  {"residual", opts.spectra.residual_tol},
                  {"cluster", opts.spectra.cluster_tol}};
  r.metrics = {{"words", static_cast<double>(count)}, {"mass", mass}};
  if (sel.kind == WordSelection::Kind::Sample) {
    r.tolerances["mc_sigmas"] = opts.mc_sigmas;
    r.metrics["max_standard_score"] = worst_z;
  }
  return r;
}

}  // namespace

bool ConvergenceReport::pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

std::vector<BlowupWord> select_words(const SelfSimilarStructure& s, int n, const WordSelection& sel,
                                     const SizeCaps& caps) {
  switch (sel.kind) {
    case WordSelection::Kind::Enumerate: return enumerate_words(s, n, caps);
    case WordSelection::Kind::Sample: return sample_words(s, n, sel.count, sel.seed);
    case WordSelection::Kind::Explicit:
      for (const auto& w : sel.words) {
        if (static_cast<int>(w.size()) != n) {
          throw Error(ErrorKind::LengthMismatch, "word '" + format_word(w) + "' has length " +
                                                     std::to_string(w.size()) + ", level is " +
                                                     std::to_string(n));
        }
      }
      return sel.words;
  }
  return {};
}

LevelOperator default_operator(const SelfSimilarStructure& s, int n, const SizeCaps& caps) {
  const LatticeLevel level = build_level(s, n, caps);
  BlowupWord w;
  w.letters.assign(static_cast<std::size_t>(n), 1);
  return assemble_level(s, level, w);
}

PointMeasure density_of_states(const SelfSimilarStructure& s, int n, BoundaryCondition bc,
                               const AnalysisOptions& opts) {
  require_valid(s);
  const LevelOperator op = default_operator(s, n, opts.caps);
  const Eigendecomposition d = solve_pencil(make_pencil(op, bc), opts.caps);
  return counting_measure(d, 1.0 / cells_power(s, n), opts.spectra.cluster_tol);
}

PointMeasure nd_density(const SelfSimilarStructure& s, int n, const AnalysisOptions& opts) {
  require_valid(s);
  const LevelOperator op = default_operator(s, n, opts.caps);
  return nd_counting_measure(op, 1.0 / cells_power(s, n), opts.spectra);
}

ConvergenceReport dos_convergence(const SelfSimilarStructure& s, const std::vector<int>& levels,
                                  BoundaryCondition bc, const AnalysisOptions& opts) {
  ConvergenceReport r;
  r.check = "dos";
  r.mode = to_string(bc);
  std::optional<PointMeasure> prev;
  for (int n : levels) {
    if (!r.levels.empty() && n <= r.levels.back().n) {
      throw Error(ErrorKind::IndexOutOfRange, "levels must be strictly increasing");
    }
    PointMeasure mu = density_of_states(s, n, bc, opts);
    LevelRecord rec{n, predicted_vertex_count(s, n), mu.size(), mu.total_mass(), std::nullopt,
                    std::nullopt};
    if (prev) rec.distance_to_previous = levy_distance(*prev, mu);
    r.levels.push_back(rec);
    prev = std::move(mu);
  }
  r.tolerances = {{"cluster", opts.spectra.cluster_tol}};
  return r;
}

PointMeasure identity_term(const SelfSimilarStructure& s, const LatticeLevel& level,
                           const BlowupWord& w, bool nd, const AnalysisOptions& opts) {
  const LevelOperator op = assemble_level(s, level, w);
  const std::vector<int> base = embed_base(level, w);
  const double tol = match_tol(s, opts);
  std::vector<PointMeasure> parts;
  parts.reserve(base.size());
  if (nd) {
    if (level.level() == 0) return PointMeasure({}, tol);
    const NDSubspace sub = nd_subspace(op, opts.spectra);
    for (std::size_t z = 0; z < base.size(); ++z) {
      const double bx = op.mass(base[z]);
      parts.push_back(nd_spectral_measure_delta(op, sub, base[z]).scaled(s.mass(static_cast<int>(z)) / (bx * bx)));
    }
  } else {
    const Eigendecomposition d = solve_pencil(neumann_pencil(op), opts.caps);
    for (std::size_t z = 0; z < base.size(); ++z) {
      const double bx = op.mass(base[z]);
      parts.push_back(spectral_measure_delta(op, d, base[z], opts.spectra.cluster_tol)
                          .scaled(s.mass(static_cast<int>(z)) / (bx * bx)));
    }
  }
  return sum(parts, tol);
}

ConvergenceReport verify_state_density_identity(const SelfSimilarStructure& s, int n,
                                                const WordSelection& sel,
                                                const AnalysisOptions& opts) {
  return verify_identity(s, n, sel, opts, false);
}

ConvergenceReport verify_nd_identity(const SelfSimilarStructure& s, int n, const WordSelection& sel,
                                     const AnalysisOptions& opts) {
  return verify_identity(s, n, sel, opts, true);
}

Verdict check_replication(const PointMeasure& lower, const PointMeasure& upper, int copies, int level,
                          double match_tol) {
  Verdict v{"replication", level, 0.0, 0.0, true, ""};
  for (const auto& a : lower.atoms()) {
    const double have = upper.mass_in(a.lambda - match_tol, a.lambda + match_tol);
    const double need = copies * a.weight;
    const double shortfall = std::max(0.0, need - have);
    // Multiplicities are integers; half a unit absorbs rounding in weights.
    if (shortfall > 0.5 && v.pass) {
      v.pass = false;
      v.detail = "atom at " + fmt(a.lambda) + ": level " + std::to_string(level + 1) +
                 " multiplicity " + fmt(have) + " < " + fmt(need);
    }
    v.discrepancy = std::max(v.discrepancy, shortfall);
  }
  v.tolerance = 0.5;
  return v;
}

ConvergenceReport verify_nd_replication(const SelfSimilarStructure& s, int n,
                                        const AnalysisOptions& opts) {
  require_valid(s);
  if (n < 1) throw Error(ErrorKind::EmptyInterior, "replication needs level >= 1");
  const double tol = match_tol(s, opts);
  const LevelOperator lo = default_operator(s, n, opts.caps);
  const LevelOperator hi = default_operator(s, n + 1, opts.caps);
  const PointMeasure lower = nd_counting_measure(lo, 1.0, opts.spectra);
  const PointMeasure upper = nd_counting_measure(hi, 1.0, opts.spectra);

  ConvergenceReport r;
  r.check = "replication";
  r.levels.push_back({n, lo.level.vertex_count(), lower.size(), lower.total_mass(), std::nullopt, std::nullopt});
  r.levels.push_back({n + 1, hi.level.vertex_count(), upper.size(), upper.total_mass(), std::nullopt,
                      std::nullopt});
  r.verdicts.push_back(check_replication(lower, upper, s.n_cells, n, tol));
  r.tolerances = {{"match", tol}, {"residual", opts.spectra.residual_tol}};
  return r;
}

int counting_gap(const std::vector<double>& neumann, const std::vector<double>& dirichlet, double tol) {
  struct Tagged {
    double lambda;
    int sign;
  };
  std::vector<Tagged> all;
  for (double l : neumann) all.push_back({l, +1});
  for (double l : dirichlet) all.push_back({l, -1});
  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.lambda > b.lambda; });
  // Walk from the top of the spectrum; counts are compared after each cluster.
  int diff = 0;
  int gap = 0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i;
    while (j < all.size() && (j == i || all[j - 1].lambda - all[j].lambda <= tol)) diff += all[j++].sign;
    gap = std::max(gap, std::abs(diff));
    i = j;
  }
  return gap;
}

ConvergenceReport interlacing_check(const SelfSimilarStructure& s, int n, const AnalysisOptions& opts) {
  require_valid(s);
  if (n < 1) throw Error(ErrorKind::EmptyInterior, "interlacing needs level >= 1");
  const LevelOperator op = default_operator(s, n, opts.caps);
  const Eigendecomposition neu = solve_pencil(neumann_pencil(op), opts.caps);
  const Eigendecomposition dir = solve_pencil(restrict_dirichlet(op), opts.caps);
  const double tol = match_tol(s, opts);
  const int gap = counting_gap(neu.lambdas, dir.lambdas, tol);
  const auto bound = static_cast<double>(s.boundary_size());

  ConvergenceReport r;
  r.check = "interlacing";
  r.levels.push_back({n, op.level.vertex_count(), neu.size(), static_cast<double>(neu.size()), std::nullopt,
                      std::nullopt});
  r.verdicts.push_back({"interlacing", n, static_cast<double>(gap), bound, gap <= bound,
                        "max counting-function gap " + std::to_string(gap)});
  r.tolerances = {{"match", tol}};
  return r;
}

std::vector<DeficiencyEntry> nd_deficiency(const SelfSimilarStructure& s, int n_max,
                                           const AnalysisOptions& opts) {
  require_valid(s);
  std::vector<DeficiencyEntry> out;
  for (int n = 1; n <= n_max; ++n) {
    const LevelOperator op = default_operator(s, n, opts.caps);
    const int dim = nd_subspace(op, opts.spectra).dimension();
    const std::size_t nv = op.level.vertex_count();
    out.push_back({n, nv, dim, (static_cast<double>(nv) - dim) / cells_power(s, n)});
  }
  return out;
}

ConvergenceReport deficiency_report(const SelfSimilarStructure& s, int n_max,
                                    const AnalysisOptions& opts) {
  ConvergenceReport r;
  r.check = "deficiency";
  const auto seq = nd_deficiency(s, n_max, opts);
  double worst_rise = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    LevelRecord rec{seq[i].n, seq[i].vertices, static_cast<std::size_t>(seq[i].nd_dimension),
                    static_cast<double>(seq[i].nd_dimension) / cells_power(s, seq[i].n), std::nullopt,
                    seq[i].deficiency};
    if (i > 0) {
      rec.distance_to_previous = seq[i].deficiency - seq[i - 1].deficiency;
      worst_rise = std::max(worst_rise, *rec.distance_to_previous);
    }
    r.levels.push_back(rec);
  }
  const double tol = 1e-12;
  r.verdicts.push_back({"deficiency", n_max, worst_rise, tol, worst_rise <= tol,
                        seq.empty() ? "" : "d_" + std::to_string(n_max) + " = " + fmt(seq.back().deficiency)});
  r.tolerances = {{"residual", opts.spectra.residual_tol}, {"monotone", tol}};
  return r;
}

ConvergenceReport spectrum_overlap(const SelfSimilarStructure& s, int n,
                                   const std::vector<BlowupWord>& words, const AnalysisOptions& opts) {
  require_valid(s);
  const LatticeLevel level = build_level(s, n, opts.caps);
  const std::vector<BlowupWord> ws = select_words(s, n, WordSelection::explicit_words(words), opts.caps);
  if (ws.empty()) throw Error(ErrorKind::IndexOutOfRange, "no words given");
  const double tol = match_tol(s, opts);
  constexpr double kSupportFloor = 1e-12;

  struct WordSupports {
    std::vector<std::vector<double>> per_label;
    std::vector<double> nu;
  };
  auto kernel = [&](const BlowupWord& w) {
    const LevelOperator op = assemble_level(s, level, w);
    const Eigendecomposition d = solve_pencil(neumann_pencil(op), opts.caps);
    WordSupports out;
    out.nu = support(counting_measure(d, 1.0, opts.spectra.cluster_tol));
    for (int x : embed_base(level, w)) {
      const PointMeasure sigma = spectral_measure_delta(op, d, x, opts.spectra.cluster_tol);
      out.per_label.push_back(support(sigma, kSupportFloor * op.mass(x)));
    }
    return out;
  };
  const std::vector<WordSupports> sup = map_words(std::span<const BlowupWord>(ws), kernel, opts.jobs);

  double across = 0.0;
  double to_nu = 0.0;
  double containment = 0.0;
  for (std::size_t z = 0; z < s.boundary_size(); ++z) {
    for (std::size_t a = 0; a < sup.size(); ++a) {
      const auto& sa = sup[a].per_label[z];
      containment = std::max(containment, one_sided_distance(sa, sup.front().nu));
      to_nu = std::max(to_nu, hausdorff_distance(sa, sup.front().nu));
      for (std::size_t b = a + 1; b < sup.size(); ++b) {
        across = std::max(across, hausdorff_distance(sa, sup[b].per_label[z]));
      }
    }
  }
  ConvergenceReport r;
  r.check = "overlap";
  r.mode = "words";
  r.levels.push_back({n, level.vertex_count(), sup.front().nu.size(), 0.0, std::nullopt, std::nullopt});
  r.verdicts.push_back({"overlap", n, containment, tol, containment <= tol,
                        "support of sigma(delta_x) inside support of nu"});
  r.metrics = {{"hausdorff_across_words", across},
               {"hausdorff_to_nu", to_nu},
               {"words", static_cast<double>(ws.size())}};
  r.tolerances = {{"match", tol}, {"support_floor_rel", kSupportFloor}};
  return r;
}

}  // namespace fsp
