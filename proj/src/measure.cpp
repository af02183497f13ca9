#include "fsp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fsp {

namespace {

std::vector<Atom> cluster(std::vector<Atom> atoms, double tol) {
  std::stable_sort(atoms.begin(), atoms.end(),
                   [](const Atom& x, const Atom& y) { return x.lambda < y.lambda; });
  std::vector<Atom> out;
  std::size_t i = 0;
  while (i < atoms.size()) {
    std::size_t j = i + 1;
    while (j < atoms.size() && atoms[j].lambda - atoms[j - 1].lambda <= tol) ++j;
    double w = 0.0;
    double wl = 0.0;
    for (std::size_t t = i; t < j; ++t) {
      w += atoms[t].weight;
      wl += std::abs(atoms[t].weight) * atoms[t].lambda;
    }
    double absw = 0.0;
    for (std::size_t t = i; t < j; ++t) absw += std::abs(atoms[t].weight);
    const double lambda = absw > 0.0 ? wl / absw : atoms[i].lambda;
    out.push_back({lambda, w});
    i = j;
  }
  return out;
}

// F(x) for a right-continuous step CDF given by sorted atoms.
double cdf(const std::vector<Atom>& atoms, const std::vector<double>& cum, double x) {
  auto it = std::upper_bound(atoms.begin(), atoms.end(), x,
                             [](double v, const Atom& a) { return v < a.lambda; });
  const auto idx = static_cast<std::size_t>(it - atoms.begin());
  return idx == 0 ? 0.0 : cum[idx - 1];
}

std::vector<double> cumulative(const std::vector<Atom>& atoms) {
  std::vector<double> cum(atoms.size());
  double s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) cum[i] = s += atoms[i].weight;
  return cum;
}

// Checks F(x - h) - h <= G(x) <= F(x + h) + h for all x. Both sides are
// right-continuous step functions of x, so the extremes sit at breakpoints.
bool levy_holds(const std::vector<Atom>& f, const std::vector<double>& fc,
                const std::vector<Atom>& g, const std::vector<double>& gc, double h) {
  for (const auto& a : g) {
    const double x = a.lambda;
    if (cdf(f, fc, x - h) - h > cdf(g, gc, x)) return false;
    if (cdf(g, gc, x) > cdf(f, fc, x + h) + h) return false;
  }
  // Shifted breakpoints x = a +/- h, with F taken at a itself.
  for (const auto& a : f) {
    const double fa = cdf(f, fc, a.lambda);
    if (fa - h > cdf(g, gc, a.lambda + h)) return false;
    if (cdf(g, gc, a.lambda - h) > fa + h) return false;
  }
  const double ftot = fc.empty() ? 0.0 : fc.back();
  const double gtot = gc.empty() ? 0.0 : gc.back();
  return ftot - h <= gtot && gtot <= ftot + h;
}

}  // namespace

PointMeasure::PointMeasure(std::vector<Atom> atoms, double cluster_tol) : cluster_tol_(cluster_tol) {
  for (auto& a : cluster(std::move(atoms), cluster_tol)) {
    if (a.weight != 0.0) atoms_.push_back(a);
  }
}

double PointMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight;
  return s;
}

double PointMeasure::mass_in(double lo, double hi) const {
  double s = 0.0;
  for (const auto& a : atoms_) {
    if (a.lambda >= lo && a.lambda <= hi) s += a.weight;
  }
  return s;
}

PointMeasure PointMeasure::scaled(double factor) const {
  std::vector<Atom> atoms = atoms_;
  for (auto& a : atoms) a.weight *= factor;
  return PointMeasure(std::move(atoms), cluster_tol_);
}

PointMeasure sum(std::span<const PointMeasure> parts, double cluster_tol) {
  std::vector<Atom> all;
  for (const auto& p : parts) all.insert(all.end(), p.atoms().begin(), p.atoms().end());
  return PointMeasure(std::move(all), cluster_tol);
}

double levy_distance(const PointMeasure& a, const PointMeasure& b) {
  const auto& f = a.atoms();
  const auto& g = b.atoms();
  const auto fc = cumulative(f);
  const auto gc = cumulative(g);

  // The infimum is one of: a gap between atom positions, or a difference of
  // CDF levels (including 0 and the totals).
  std::vector<double> levels{0.0};
  levels.insert(levels.end(), fc.begin(), fc.end());
  levels.insert(levels.end(), gc.begin(), gc.end());
  std::vector<double> cand{0.0};
  for (const auto& x : f) {
    for (const auto& y : g) cand.push_back(std::abs(x.lambda - y.lambda));
  }
  for (double u : levels) {
    for (double v : levels) {
      if (u > v) cand.push_back(u - v);
    }
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  if (levy_holds(f, fc, g, gc, 0.0)) return 0.0;
  // The valid set is an up-ray starting at some candidate c_k; probe the
  // open gaps between consecutive candidates.
  auto probe = [&](std::size_t k) {
    const double hi = k + 1 < cand.size() ? cand[k + 1] : cand[k] + 1.0;
    return levy_holds(f, fc, g, gc, 0.5 * (cand[k] + hi));
  };
  std::size_t lo = 0;
  std::size_t hi = cand.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (probe(mid)) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return cand[lo];
}

double max_atom_discrepancy(const PointMeasure& a, const PointMeasure& b, double match_tol) {
  std::vector<Atom> all = a.atoms();
  for (const auto& x : b.atoms()) all.push_back({x.lambda, -x.weight});
  std::stable_sort(all.begin(), all.end(),
                   [](const Atom& x, const Atom& y) { return x.lambda < y.lambda; });
  double worst = 0.0;
  std::size_t i = 0;
  while (i < all.size()) {
    std::size_t j = i + 1;
    double w = all[i].weight;
    while (j < all.size() && all[j].lambda - all[j - 1].lambda <= match_tol) w += all[j++].weight;
    worst = std::max(worst, std::abs(w));
    i = j;
  }
  return worst;
}

std::vector<double> support(const PointMeasure& m, double weight_floor) {
  std::vector<double> out;
  for (const auto& a : m.atoms()) {
    if (a.weight > weight_floor) out.push_back(a.lambda);
  }
  return out;
}

double one_sided_distance(std::span<const double> inner, std::span<const double> outer) {
  if (inner.empty()) return 0.0;
  if (outer.empty()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (double x : inner) {
    double best = std::numeric_limits<double>::infinity();
    for (double y : outer) best = std::min(best, std::abs(x - y));
    worst = std::max(worst, best);
  }
  return worst;
}

double hausdorff_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return std::max(one_sided_distance(a, b), one_sided_distance(b, a));
}

}  // namespace fsp
