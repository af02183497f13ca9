#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fsp {

struct Atom {
  double lambda = 0.0;
  double weight = 0.0;
};

/// Finite weighted sum of Dirac masses with atoms strictly increasing in
/// lambda. Construction sorts the input and merges atoms whose consecutive
/// gaps are <= cluster_tol (single linkage); a merged atom sits at the
/// weight-averaged position. Atoms with zero weight are dropped.
class PointMeasure {
 public:
  PointMeasure() = default;
  PointMeasure(std::vector<Atom> atoms, double cluster_tol);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  double cluster_tol() const { return cluster_tol_; }
  double total_mass() const;
  /// Mass of atoms with lambda in [lo, hi].
  double mass_in(double lo, double hi) const;
  PointMeasure scaled(double factor) const;

 private:
  std::vector<Atom> atoms_;
  double cluster_tol_ = 0.0;
};

/// Sum of measures, merged with `cluster_tol`. Inputs are concatenated in
/// order before sorting, so the result depends only on the input order.
PointMeasure sum(std::span<const PointMeasure> parts, double cluster_tol);

/// Levy distance between the cumulative functions F(x) = M((-inf, x]).
double levy_distance(const PointMeasure& a, const PointMeasure& b);

/// max over clusters of |a - b|, atoms paired when within `match_tol`.
double max_atom_discrepancy(const PointMeasure& a, const PointMeasure& b, double match_tol);

/// Atom positions carrying weight > weight_floor.
std::vector<double> support(const PointMeasure& m, double weight_floor = 0.0);

/// Hausdorff distance between finite point sets (0 when both empty,
/// infinity when exactly one is).
double hausdorff_distance(std::span<const double> a, std::span<const double> b);

/// Largest distance from a point of `inner` to the nearest point of `outer`.
double one_sided_distance(std::span<const double> inner, std::span<const double> outer);

}  // namespace fsp
