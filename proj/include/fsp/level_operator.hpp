#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "fsp/lattice.hpp"
#include "fsp/structure.hpp"

namespace fsp {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class BoundaryCondition { Neumann, Dirichlet };

const char* to_string(BoundaryCondition bc) noexcept;

/// A0 f(x) = -sum_y a_{x,y} (f(y) - f(x)) on the base labels, with masses b0.
struct BaseForm {
  Eigen::MatrixXd A0;
  Eigen::VectorXd b0;
};

BaseForm assemble_base(const SelfSimilarStructure& s);

/// Largest generalized eigenvalue of (A0, diag b0). Every level-n Neumann or
/// Dirichlet eigenvalue lies in [-K, 0].
double norm_bound(const SelfSimilarStructure& s);

/// The level-n form and masses for a blow-up word.
///
/// Cell (j_1..j_n) carries the copy of A0 scaled by
/// alpha_{w_1}..alpha_{w_n} / (alpha_{j_1}..alpha_{j_n}) and the copy of b
/// scaled by beta_{j_1}..beta_{j_n} / (beta_{w_1}..beta_{w_n}). The
/// word-independent part of the mass is `mass_tilde`;
/// mass == omega_scale * mass_tilde.
struct LevelOperator {
  LatticeLevel level;
  BlowupWord word;
  SparseMatrix A;
  Eigen::VectorXd mass;
  Eigen::VectorXd mass_tilde;
  double omega_scale = 1.0;
};

LevelOperator assemble_level(const SelfSimilarStructure& s, const LatticeLevel& level,
                             const BlowupWord& w);

/// Generalized problem A v = theta diag(mass) v on the vertex subset
/// `vertices` of a level (all of them for Neumann).
struct Pencil {
  SparseMatrix A;
  Eigen::VectorXd mass;
  std::vector<int> vertices;
  BoundaryCondition bc = BoundaryCondition::Neumann;
};

Pencil neumann_pencil(const LevelOperator& op);
/// Rows/columns of the interior vertices; throws EmptyInterior when every
/// vertex is on the boundary.
Pencil restrict_dirichlet(const LevelOperator& op);
Pencil make_pencil(const LevelOperator& op, BoundaryCondition bc);

/// <A f, f> for f on all vertices of the level.
double energy(const LevelOperator& op, const Eigen::VectorXd& f);

}  // namespace fsp
