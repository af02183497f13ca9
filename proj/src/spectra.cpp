#include "fsp/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace fsp {

Eigendecomposition solve_pencil(const SparseMatrix& A, const Eigen::VectorXd& mass,
                                const SizeCaps& caps) {
  const Eigen::Index m = A.rows();
  if (A.cols() != m || mass.size() != m) {
    throw Error(ErrorKind::IndexOutOfRange, "pencil dimensions disagree");
  }
  if (static_cast<std::size_t>(m) > caps.max_dense) {
    throw Error(ErrorKind::SizeCapExceeded, "pencil of size " + std::to_string(m) +
                                                " exceeds dense cap " + std::to_string(caps.max_dense));
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(mass(i) > 0.0)) throw Error(ErrorKind::NonpositiveMass, "mass must be positive at row " + std::to_string(i));
  }
  const Eigen::MatrixXd dense(A);
  const double scale = dense.cwiseAbs().maxCoeff();
  if ((dense - dense.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0)) {
    throw Error(ErrorKind::NotSymmetric, "pencil matrix is not symmetric");
  }

  Eigendecomposition d;
  d.mass = mass;
  d.vertices.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) d.vertices[static_cast<std::size_t>(i)] = static_cast<int>(i);
  if (m == 0) return d;

  // B^{-1/2} A B^{-1/2} w = theta w, v = B^{-1/2} w.
  const Eigen::VectorXd s = mass.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd sym = s.asDiagonal() * dense * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::SolverFailure, "symmetric eigensolver did not converge");

  // theta ascending -> lambda = -theta ascending means reversing the order.
  d.lambdas.resize(static_cast<std::size_t>(m));
  d.vectors.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index src = m - 1 - i;
    d.lambdas[static_cast<std::size_t>(i)] = -es.eigenvalues()(src);
    d.vectors.col(i) = s.asDiagonal() * es.eigenvectors().col(src);
  }
  return d;
}

Eigendecomposition solve_pencil(const Pencil& p, const SizeCaps& caps) {
  Eigendecomposition d = solve_pencil(p.A, p.mass, caps);
  d.which = p.bc;
  d.vertices = p.vertices;
  return d;
}

double default_cluster_tol(const Eigendecomposition& d) {
  double radius = 1.0;
  for (double l : d.lambdas) radius = std::max(radius, std::abs(l));
  return 1e-9 * radius;
}

double cluster_tol_for(const Eigendecomposition& d, const SpectraOptions& opts) {
  return opts.cluster_tol > 0.0 ? opts.cluster_tol : default_cluster_tol(d);
}

std::vector<EigenCluster> cluster_eigenvalues(const std::vector<double>& ascending, double tol) {
  std::vector<EigenCluster> out;
  std::size_t i = 0;
  while (i < ascending.size()) {
    std::size_t j = i + 1;
    while (j < ascending.size() && ascending[j] - ascending[j - 1] <= tol) ++j;
    double mean = 0.0;
    for (std::size_t t = i; t < j; ++t) mean += ascending[t];
    out.push_back({mean / static_cast<double>(j - i), i, j});
    i = j;
  }
  return out;
}

PointMeasure counting_measure(const Eigendecomposition& d, double scale, double cluster_tol) {
  const double tol = cluster_tol > 0.0 ? cluster_tol : default_cluster_tol(d);
  std::vector<Atom> atoms;
  for (const auto& c : cluster_eigenvalues(d.lambdas, tol)) {
    atoms.push_back({c.lambda, scale * static_cast<double>(c.multiplicity())});
  }
  return PointMeasure(std::move(atoms), tol);
}

int NDSubspace::dimension() const {
  int dim = 0;
  for (const auto& p : pairs) dim += p.multiplicity;
  return dim;
}

NDSubspace nd_subspace(const LevelOperator& op, const Eigendecomposition& dirichlet,
                       const SpectraOptions& opts) {
  NDSubspace nd;
  nd.residual_tol = opts.residual_tol;
  nd.cluster_tol = cluster_tol_for(dirichlet, opts);
  const auto nv = static_cast<Eigen::Index>(op.level.vertex_count());
  const std::vector<int>& bnd = op.level.boundary();
  const double mass_norm = op.mass.maxCoeff();

  for (const auto& c : cluster_eigenvalues(dirichlet.lambdas, nd.cluster_tol)) {
    const auto m = static_cast<Eigen::Index>(c.multiplicity());
    const double theta = -c.lambda;
    Eigen::MatrixXd ext = Eigen::MatrixXd::Zero(nv, m);
    for (Eigen::Index col = 0; col < m; ++col) {
      const auto src = static_cast<Eigen::Index>(c.begin) + col;
      for (std::size_t r = 0; r < dirichlet.vertices.size(); ++r) {
        ext(dirichlet.vertices[r], col) = dirichlet.vectors(static_cast<Eigen::Index>(r), src);
      }
    }
    // Residual of A v = theta B v on the boundary rows.
    const Eigen::MatrixXd full = op.A * ext - theta * (op.mass.asDiagonal() * ext);
    Eigen::MatrixXd residual(static_cast<Eigen::Index>(bnd.size()), m);
    for (std::size_t b = 0; b < bnd.size(); ++b) residual.row(static_cast<Eigen::Index>(b)) = full.row(bnd[b]);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv.maxCoeff() : 0.0;
    const double threshold = opts.residual_tol * std::max(smax, theta * mass_norm);
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) >= threshold;
    const Eigen::Index nullity = m - rank;
    if (nullity <= 0) continue;

    // Singular values are sorted decreasingly; the trailing columns of V span
    // the null space. V is orthogonal and ext is mass-orthonormal.
    NDPair pair;
    pair.lambda = c.lambda;
    pair.multiplicity = static_cast<int>(nullity);
    pair.basis = ext * svd.matrixV().rightCols(nullity);
    for (int b : bnd) pair.basis.row(b).setZero();
    nd.pairs.push_back(std::move(pair));
  }
  return nd;
}

NDSubspace nd_subspace(const LevelOperator& op, const SpectraOptions& opts) {
  return nd_subspace(op, solve_pencil(restrict_dirichlet(op)), opts);
}

PointMeasure nd_counting_measure(const NDSubspace& nd, double scale) {
  std::vector<Atom> atoms;
  for (const auto& p : nd.pairs) atoms.push_back({p.lambda, scale * p.multiplicity});
  return PointMeasure(std::move(atoms), nd.cluster_tol);
}

PointMeasure nd_counting_measure(const LevelOperator& op, double scale, const SpectraOptions& opts) {
  return nd_counting_measure(nd_subspace(op, opts), scale);
}

PointMeasure spectral_measure_delta(const LevelOperator& op, const Eigendecomposition& d, int x,
                                    double cluster_tol) {
  if (x < 0 || static_cast<std::size_t>(x) >= op.level.vertex_count()) {
    throw Error(ErrorKind::IndexOutOfRange, "vertex " + std::to_string(x) + " out of range");
  }
  const double tol = cluster_tol > 0.0 ? cluster_tol : default_cluster_tol(d);
  auto row_it = std::lower_bound(d.vertices.begin(), d.vertices.end(), x);
  if (row_it == d.vertices.end() || *row_it != x) return PointMeasure({}, tol);
  const auto row = static_cast<Eigen::Index>(row_it - d.vertices.begin());
  const double bx = op.mass(x);
  std::vector<Atom> atoms;
  for (const auto& c : cluster_eigenvalues(d.lambdas, tol)) {
    double w = 0.0;
    for (std::size_t i = c.begin; i < c.end; ++i) {
      const double h = d.vectors(row, static_cast<Eigen::Index>(i));
      w += bx * bx * h * h;
    }
    atoms.push_back({c.lambda, w});
  }
  return PointMeasure(std::move(atoms), tol);
}

PointMeasure nd_spectral_measure_delta(const LevelOperator& op, const NDSubspace& nd, int x) {
  if (x < 0 || static_cast<std::size_t>(x) >= op.level.vertex_count()) {
    throw Error(ErrorKind::IndexOutOfRange, "vertex " + std::to_string(x) + " out of range");
  }
  const double bx = op.mass(x);
  std::vector<Atom> atoms;
  for (const auto& p : nd.pairs) {
    const double w = bx * bx * p.basis.row(x).squaredNorm();
    atoms.push_back({p.lambda, w});
  }
  return PointMeasure(std::move(atoms), nd.cluster_tol);
}

}  // namespace fsp
