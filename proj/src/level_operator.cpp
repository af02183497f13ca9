#include "fsp/level_operator.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

namespace fsp {

const char* to_string(BoundaryCondition bc) noexcept {
  return bc == BoundaryCondition::Neumann ? "neumann" : "dirichlet";
}

BaseForm assemble_base(const SelfSimilarStructure& s) {
  const auto k = static_cast<Eigen::Index>(s.boundary_size());
  BaseForm f;
  f.A0 = Eigen::MatrixXd::Zero(k, k);
  f.b0.resize(k);
  for (Eigen::Index x = 0; x < k; ++x) {
    f.b0(x) = s.mass(static_cast<int>(x));
    for (Eigen::Index y = 0; y < k; ++y) {
      if (x == y) continue;
      const double a = s.conductance(static_cast<int>(x), static_cast<int>(y));
      f.A0(x, y) = -a;
      f.A0(x, x) += a;
    }
  }
  return f;
}

double norm_bound(const SelfSimilarStructure& s) {
  const BaseForm f = assemble_base(s);
  const Eigen::VectorXd d = f.b0.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd sym = d.asDiagonal() * f.A0 * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

LevelOperator assemble_level(const SelfSimilarStructure& s, const LatticeLevel& level,
                             const BlowupWord& w) {
  const int n = level.level();
  if (static_cast<int>(w.size()) != n) {
    throw Error(ErrorKind::LengthMismatch, "word length " + std::to_string(w.size()) +
                                               " differs from level " + std::to_string(n));
  }
  const int big_n = s.n_cells;
  for (int letter : w.letters) {
    if (letter < 1 || letter > big_n) throw Error(ErrorKind::IndexOutOfRange, "word letter out of range");
  }
  const BaseForm base = assemble_base(s);
  const auto k = static_cast<int>(level.label_count());

  std::vector<double> log_alpha(static_cast<std::size_t>(big_n));
  std::vector<double> log_beta(static_cast<std::size_t>(big_n));
  for (int i = 0; i < big_n; ++i) {
    log_alpha[static_cast<std::size_t>(i)] = std::log(s.alpha[static_cast<std::size_t>(i)]);
    log_beta[static_cast<std::size_t>(i)] = std::log(s.beta[static_cast<std::size_t>(i)]);
  }
  double log_alpha_word = 0.0;
  double log_beta_word = 0.0;
  for (int letter : w.letters) {
    log_alpha_word += log_alpha[static_cast<std::size_t>(letter - 1)];
    log_beta_word += log_beta[static_cast<std::size_t>(letter - 1)];
  }

  // Per-cell sums of log alpha_j and log beta_j, built digit by digit.
  std::vector<double> cell_log_alpha{0.0};
  std::vector<double> cell_log_beta{0.0};
  for (int lev = 0; lev < n; ++lev) {
    std::vector<double> na(cell_log_alpha.size() * static_cast<std::size_t>(big_n));
    std::vector<double> nb(na.size());
    for (std::size_t c = 0; c < cell_log_alpha.size(); ++c) {
      for (int j = 0; j < big_n; ++j) {
        const std::size_t idx = c * static_cast<std::size_t>(big_n) + static_cast<std::size_t>(j);
        na[idx] = cell_log_alpha[c] + log_alpha[static_cast<std::size_t>(j)];
        nb[idx] = cell_log_beta[c] + log_beta[static_cast<std::size_t>(j)];
      }
    }
    cell_log_alpha = std::move(na);
    cell_log_beta = std::move(nb);
  }

  LevelOperator op{level, w, {}, {}, {}, std::exp(-log_beta_word)};
  const auto nv = static_cast<Eigen::Index>(level.vertex_count());
  op.mass_tilde = Eigen::VectorXd::Zero(nv);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(level.cell_count() * static_cast<std::size_t>(k * k));
  std::vector<int> image(static_cast<std::size_t>(k));
  for (std::size_t c = 0; c < level.cell_count(); ++c) {
    for (int z = 0; z < k; ++z) image[static_cast<std::size_t>(z)] = level.cell_vertex(c, z);
    const double coef = std::exp(log_alpha_word - cell_log_alpha[c]);
    const double mcoef = std::exp(cell_log_beta[c]);
    for (int x = 0; x < k; ++x) {
      const int vx = image[static_cast<std::size_t>(x)];
      op.mass_tilde(vx) += mcoef * base.b0(x);
      for (int y = 0; y < k; ++y) {
        const double a = base.A0(x, y);
        if (a != 0.0) triplets.emplace_back(vx, image[static_cast<std::size_t>(y)], coef * a);
      }
    }
  }
  op.A.resize(nv, nv);
  op.A.setFromTriplets(triplets.begin(), triplets.end());
  op.A.makeCompressed();
  op.mass = op.omega_scale * op.mass_tilde;
  return op;
}

namespace {

Pencil restrict_to(const LevelOperator& op, std::vector<int> vertices, BoundaryCondition bc) {
  const auto m = static_cast<Eigen::Index>(vertices.size());
  std::vector<int> position(op.level.vertex_count(), -1);
  for (Eigen::Index i = 0; i < m; ++i) position[static_cast<std::size_t>(vertices[static_cast<std::size_t>(i)])] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> triplets;
  for (int col = 0; col < op.A.outerSize(); ++col) {
    const int pc = position[static_cast<std::size_t>(col)];
    if (pc < 0) continue;
    for (SparseMatrix::InnerIterator it(op.A, col); it; ++it) {
      const int pr = position[static_cast<std::size_t>(it.row())];
      if (pr >= 0) triplets.emplace_back(pr, pc, it.value());
    }
  }
  Pencil p;
  p.A.resize(m, m);
  p.A.setFromTriplets(triplets.begin(), triplets.end());
  p.mass.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) p.mass(i) = op.mass(vertices[static_cast<std::size_t>(i)]);
  p.vertices = std::move(vertices);
  p.bc = bc;
  return p;
}

}  // namespace

Pencil neumann_pencil(const LevelOperator& op) {
  Pencil p;
  p.A = op.A;
  p.mass = op.mass;
  p.vertices.resize(op.level.vertex_count());
  for (std::size_t v = 0; v < p.vertices.size(); ++v) p.vertices[v] = static_cast<int>(v);
  p.bc = BoundaryCondition::Neumann;
  return p;
}

Pencil restrict_dirichlet(const LevelOperator& op) {
  std::vector<int> interior = op.level.interior();
  if (interior.empty()) {
    throw Error(ErrorKind::EmptyInterior,
                "level " + std::to_string(op.level.level()) + " has no interior vertex");
  }
  return restrict_to(op, std::move(interior), BoundaryCondition::Dirichlet);
}

Pencil make_pencil(const LevelOperator& op, BoundaryCondition bc) {
  return bc == BoundaryCondition::Neumann ? neumann_pencil(op) : restrict_dirichlet(op);
}

double energy(const LevelOperator& op, const Eigen::VectorXd& f) { return f.dot(op.A * f); }

}  // namespace fsp
