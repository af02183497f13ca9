#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fsp/error.hpp"
#include "fsp/level_operator.hpp"
#include "fsp/measure.hpp"

namespace fsp {

/// Full spectrum of a pencil, eigenvalues lambda = -theta <= 0 ascending.
/// Column i of `vectors` is orthonormal in sum_x f(x) g(x) mass(x).
struct Eigendecomposition {
  std::vector<double> lambdas;
  Eigen::MatrixXd vectors;
  BoundaryCondition which = BoundaryCondition::Neumann;
  Eigen::VectorXd mass;
  /// Level vertex of each row.
  std::vector<int> vertices;

  std::size_t size() const { return lambdas.size(); }
};

struct SpectraOptions {
  /// Eigenvalue clustering tolerance; <= 0 selects 1e-9 * spectral radius.
  double cluster_tol = 0.0;
  /// Relative singular value threshold for the N-D boundary residual.
  double residual_tol = 1e-8;
};

Eigendecomposition solve_pencil(const Pencil& p, const SizeCaps& caps = SizeCaps::from_environment());
Eigendecomposition solve_pencil(const SparseMatrix& A, const Eigen::VectorXd& mass,
                                const SizeCaps& caps = SizeCaps::from_environment());

/// 1e-9 * max(1, max |lambda|).
double default_cluster_tol(const Eigendecomposition& d);
double cluster_tol_for(const Eigendecomposition& d, const SpectraOptions& opts);

/// Index ranges [begin, end) of eigenvalue clusters in an ascending list.
struct EigenCluster {
  double lambda = 0.0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t multiplicity() const { return end - begin; }
};
std::vector<EigenCluster> cluster_eigenvalues(const std::vector<double>& ascending, double tol);

/// Atoms at clustered eigenvalues with weight scale * multiplicity.
PointMeasure counting_measure(const Eigendecomposition& d, double scale, double cluster_tol = 0.0);

struct NDPair {
  double lambda = 0.0;
  int multiplicity = 0;
  /// Columns on the full vertex set, zero on the boundary, mass-orthonormal.
  Eigen::MatrixXd basis;
};

struct NDSubspace {
  std::vector<NDPair> pairs;
  double residual_tol = 0.0;
  double cluster_tol = 0.0;

  int dimension() const;
};

/// Dirichlet eigenvectors whose zero extension also satisfies the Neumann
/// eigen-equation on the boundary rows.
NDSubspace nd_subspace(const LevelOperator& op, const SpectraOptions& opts = {});
NDSubspace nd_subspace(const LevelOperator& op, const Eigendecomposition& dirichlet,
                       const SpectraOptions& opts = {});

PointMeasure nd_counting_measure(const NDSubspace& nd, double scale);
PointMeasure nd_counting_measure(const LevelOperator& op, double scale, const SpectraOptions& opts = {});

/// sigma(delta_x): atoms (lambda_i, mass(x)^2 h_i(x)^2), clustered. For a
/// Dirichlet decomposition and boundary x the measure is empty.
PointMeasure spectral_measure_delta(const LevelOperator& op, const Eigendecomposition& d, int x,
                                    double cluster_tol = 0.0);

/// Spectral measure of the projection of delta_x onto the N-D subspace.
PointMeasure nd_spectral_measure_delta(const LevelOperator& op, const NDSubspace& nd, int x);

}  // namespace fsp
