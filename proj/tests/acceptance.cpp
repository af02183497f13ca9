// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fsp/analysis.hpp"

using namespace fsp;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& what) {
    if (pass) detail = what;
    pass = false;
  }
};

LevelOperator word_one(const SelfSimilarStructure& s, int n) {
  return assemble_level(s, build_level(s, n), BlowupWord{std::vector<int>(static_cast<std::size_t>(n), 1), {}});
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

Outcome identity() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  auto run = [&](const char* name, int n) {
    const auto r = verify_state_density_identity(builtin_structure(name), n, WordSelection::enumerate());
    const auto& v = r.verdicts.front();
    worst = std::max(worst, v.discrepancy / std::max(r.levels.front().mass, 1e-300));
    if (!v.pass) o.fail(std::string(name) + " n=" + std::to_string(n) + ": " + v.detail);
  };
  for (int n = 1; n <= 4; ++n) run("interval", n);
  for (int n = 1; n <= 2; ++n) run("sg3", n);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= 30.0) o.fail("runtime " + fmt(secs) + " s");
  if (o.pass) o.detail = "max relative discrepancy " + fmt(worst) + ", " + fmt(secs) + " s";
  return o;
}

Outcome interval_closed_form() {
  Outcome o;
  const auto s = builtin_structure("interval");
  double worst = 0.0;
  for (int n = 1; n <= 6; ++n) {
    const auto d = solve_pencil(neumann_pencil(word_one(s, n)));
    const int m = 1 << n;
    if (d.size() != static_cast<std::size_t>(m + 1)) {
      o.fail("n=" + std::to_string(n) + ": wrong eigenvalue count");
      continue;
    }
    for (int k = 0; k <= m; ++k) {
      const double expect = -2.0 * (1.0 - std::cos(k * std::numbers::pi / m));
      worst = std::max(worst, std::abs(d.lambdas[static_cast<std::size_t>(m - k)] - expect));
    }
  }
  if (worst > 1e-9) o.fail("max error " + fmt(worst));
  if (o.pass) o.detail = "max error " + fmt(worst);
  return o;
}

Outcome hand_fixtures() {
  Outcome o;
  constexpr double tol = 1e-10;
  auto near = [&](double a, double b, const std::string& what) {
    if (std::abs(a - b) > tol) o.fail(what + ": " + fmt(a) + " vs " + fmt(b));
  };
  const auto interval = builtin_structure("interval");
  const LevelOperator op = word_one(interval, 1);
  const auto neu = solve_pencil(neumann_pencil(op));
  const std::vector<double> neu_expect{-4.0, -2.0, 0.0};
  if (neu.size() != 3) o.fail("interval Neumann count");
  for (std::size_t i = 0; i < std::min<std::size_t>(3, neu.size()); ++i) near(neu.lambdas[i], neu_expect[i], "interval Neumann");
  const auto dir = solve_pencil(restrict_dirichlet(op));
  if (dir.size() != 1) o.fail("interval Dirichlet count");
  else near(dir.lambdas[0], -2.0, "interval Dirichlet");
  const PointMeasure center = spectral_measure_delta(op, neu, 1);
  near(center.mass_in(-0.5, 0.5), 0.5, "sigma(center) at 0");
  near(center.mass_in(-4.5, -3.5), 0.5, "sigma(center) at -4");
  near(center.mass_in(-2.5, -1.5), 0.0, "sigma(center) at -2");

  const auto sg = builtin_structure("sg3");
  const LevelOperator sop = word_one(sg, 1);
  const auto sdir = solve_pencil(restrict_dirichlet(sop));
  const std::vector<double> sg_expect{-7.5, -7.5, -3.0};
  if (sdir.size() != 3) o.fail("sg3 Dirichlet count");
  for (std::size_t i = 0; i < std::min<std::size_t>(3, sdir.size()); ++i) near(sdir.lambdas[i], sg_expect[i], "sg3 Dirichlet");
  if (nd_subspace(sop).dimension() != 0) o.fail("sg3 dim E^ND_1 != 0");
  return o;
}

Outcome replication() {
  Outcome o;
  for (int n : {2, 3}) {
    const auto r = verify_nd_replication(builtin_structure("sg3"), n);
    if (!r.pass()) o.fail("sg3 " + std::to_string(n) + "->" + std::to_string(n + 1) + ": " + r.verdicts.front().detail);
  }
  for (int n = 1; n <= 5; ++n) {
    if (!verify_nd_replication(builtin_structure("interval"), n).pass()) o.fail("interval n=" + std::to_string(n));
  }
  if (o.pass) o.detail = "sg3 2->3, 3->4; interval vacuous";
  return o;
}

Outcome norm_bound_check() {
  Outcome o;
  for (const auto& [name, levels, k] : {std::tuple{"interval", 6, 4.0}, std::tuple{"sg3", 4, 9.0}}) {
    const auto s = builtin_structure(name);
    if (std::abs(norm_bound(s) - k) > 1e-9 * k) o.fail(std::string(name) + ": K = " + fmt(norm_bound(s)));
    for (int n = 0; n <= levels; ++n) {
      const LevelOperator op = word_one(s, n);
      std::vector<double> all = solve_pencil(neumann_pencil(op)).lambdas;
      if (n > 0) {
        const auto d = solve_pencil(restrict_dirichlet(op)).lambdas;
        all.insert(all.end(), d.begin(), d.end());
      }
      for (double l : all) {
        if (l > 1e-9 * k || l < -k - 1e-9 * k) o.fail(std::string(name) + " n=" + std::to_string(n) + ": " + fmt(l));
      }
    }
  }
  return o;
}

Outcome interlacing() {
  Outcome o;
  for (const auto& [name, levels] : {std::pair{"interval", 5}, std::pair{"sg3", 4}}) {
    for (int n = 1; n <= levels; ++n) {
      const auto r = interlacing_check(builtin_structure(name), n);
      if (!r.pass()) o.fail(std::string(name) + " n=" + std::to_string(n) + ": " + r.verdicts.front().detail);
    }
  }
  return o;
}

Outcome word_invariance() {
  Outcome o;
  for (const char* name : {"interval", "sg3"}) {
    const auto s = builtin_structure(name);
    for (int n = 1; n <= 3; ++n) {
      const LatticeLevel lat = build_level(s, n);
      for (auto bc : {BoundaryCondition::Neumann, BoundaryCondition::Dirichlet}) {
        std::vector<double> ref;
        for (const auto& w : enumerate_words(s, n)) {
          const auto d = solve_pencil(make_pencil(assemble_level(s, lat, w), bc)).lambdas;
          if (ref.empty()) {
            ref = d;
            continue;
          }
          const double scale = std::max(1.0, std::abs(ref.front()));
          for (std::size_t i = 0; i < ref.size(); ++i) {
            if (std::abs(d[i] - ref[i]) > 1e-10 * scale) {
              o.fail(std::string(name) + " n=" + std::to_string(n) + " word " + format_word(w));
            }
          }
        }
      }
    }
  }
  return o;
}

Outcome deficiency() {
  Outcome o;
  const auto sg = nd_deficiency(builtin_structure("sg3"), 3);
  if (sg[0].deficiency != 2.0) o.fail("d_1 = " + fmt(sg[0].deficiency));
  if (sg[1].nd_dimension != 4 || sg[2].nd_dimension != 21) {
    o.fail("e_2, e_3 = " + std::to_string(sg[1].nd_dimension) + ", " + std::to_string(sg[2].nd_dimension));
  }
  for (std::size_t i = 1; i < sg.size(); ++i) {
    if (!(sg[i].deficiency < sg[i - 1].deficiency)) o.fail("not strictly decreasing at n=" + std::to_string(sg[i].n));
  }
  for (const auto& e : nd_deficiency(builtin_structure("interval"), 6)) {
    if (e.deficiency < 1.0) o.fail("interval d_" + std::to_string(e.n) + " < 1");
  }
  if (o.pass) {
    o.detail = "sg3 d = " + fmt(sg[0].deficiency) + ", " + fmt(sg[1].deficiency) + ", " + fmt(sg[2].deficiency);
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  auto run = [](std::vector<std::string> args) {
    args.insert(args.begin(), "fractal-spectra");
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return std::to_string(code) + "\n" + out.str();
  };
  const std::vector<std::vector<std::string>> commands{
      {"verify", "identity", "--builtin", "sg3", "--level", "3", "--samples", "40", "--seed", "2024"},
      {"verify", "overlap", "--builtin", "sg3", "--level", "2", "--samples", "9", "--seed", "5"},
      {"dos", "--builtin", "sg3", "--levels", "1..3", "--csv"},
      {"dos", "--builtin", "interval", "--levels", "1..4"},
      {"spectrum", "--builtin", "sg3", "--level", "3", "--word", "2,1,3", "--nd"},
  };
  for (const auto& cmd : commands) {
    std::string ref;
    for (const char* jobs : {"1", "1", "2", "4"}) {
      auto args = cmd;
      args.push_back("--jobs");
      args.push_back(jobs);
      const std::string got = run(args);
      if (ref.empty()) ref = got;
      else if (got != ref) o.fail(cmd[0] + " " + cmd[1] + " differs with --jobs " + jobs);
    }
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"exact expectation identity (enumerate)", identity},
      {"interval closed-form spectrum, n <= 6", interval_closed_form},
      {"hand-computed fixtures", hand_fixtures},
      {"N-D replication", replication},
      {"norm bound [-K, 0]", norm_bound_check},
      {"Neumann/Dirichlet interlacing", interlacing},
      {"word invariance under (H)", word_invariance},
      {"N-D deficiency trend and goldens", deficiency},
      {"determinism across runs and --jobs", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %zu. %s%s%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.empty() ? "" : " -- ", o.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
