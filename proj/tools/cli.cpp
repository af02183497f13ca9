#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "fsp/analysis.hpp"
#include "fsp/lattice.hpp"
#include "fsp/level_operator.hpp"
#include "fsp/spectra.hpp"
#include "fsp/structure.hpp"

namespace fsp::cli {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string file;
  std::string builtin;
  int jobs = 0;
  double cluster_tol = 0.0;
  double residual_tol = 1e-8;
  double match_tol_rel = 1e-7;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("file", c.file, "Structure document (JSON)");
  sub->add_option("--builtin", c.builtin, "Builtin structure: interval | sg3");
  sub->add_option("--jobs", c.jobs, "Threads for word sweeps (default: all)");
  sub->add_option("--cluster-tol", c.cluster_tol, "Absolute eigenvalue clustering tolerance (default 1e-9 * radius)");
  sub->add_option("--residual-tol", c.residual_tol, "Relative N-D boundary residual tolerance");
  sub->add_option("--match-tol", c.match_tol_rel, "Cross-solve atom matching tolerance, relative to K");
}

SelfSimilarStructure load(const Common& c) {
  if (c.file.empty() == c.builtin.empty()) throw UsageError("give exactly one of <file> or --builtin");
  return c.builtin.empty() ? load_structure_file(c.file) : builtin_structure(c.builtin);
}

AnalysisOptions options(const Common& c) {
  AnalysisOptions o;
  o.spectra.cluster_tol = c.cluster_tol;
  o.spectra.residual_tol = c.residual_tol;
  o.match_tol_rel = c.match_tol_rel;
  o.jobs = c.jobs;
  return o;
}

Json tolerances_json(const Common& c) {
  return Json{{"cluster", c.cluster_tol}, {"residual", c.residual_tol}, {"match_rel", c.match_tol_rel}};
}

// Fixed-format number; values within `zero` of 0 print as 0.
std::string num(double v, double zero = 0.0) {
  if (std::abs(v) <= zero) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

BlowupWord word_or_default(const std::string& text, int n) {
  if (!text.empty()) return parse_word(text);
  BlowupWord w;
  w.letters.assign(static_cast<std::size_t>(n), 1);
  return w;
}

std::string address_string(const SelfSimilarStructure& s, const VertexAddress& a) {
  std::string out = "(";
  for (int j : a.word) out += std::to_string(j) + ",";
  return out + s.boundary[static_cast<std::size_t>(a.label)].label + ")";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::SchemaError, "cannot write '" + path + "'");
  f << content;
}

std::string gnuplot_script(const std::string& csv, const std::string& title) {
  std::ostringstream gp;
  gp << "set datafile separator ','\n"
     << "set title '" << title << "'\n"
     << "set xlabel 'lambda'\nset ylabel 'weight'\n"
     << "plot '" << csv << "' every ::1 using 1:2 with impulses title 'atoms'\n";
  return gp.str();
}

// Emits to `path`, or to `out` when path is empty or "-".
void emit(const std::string& path, const std::string& content, std::ostream& out, bool gnuplot,
          const std::string& title) {
  if (path.empty() || path == "-") {
    out << content;
    return;
  }
  write_file(path, content);
  if (gnuplot) write_file(path + ".gp", gnuplot_script(path, title));
}

Json report_json(const ConvergenceReport& r) {
  Json j;
  j["check"] = r.check;
  j["mode"] = r.mode;
  if (r.seed) j["seed"] = *r.seed;
  j["pass"] = r.pass();
  Json verdicts = Json::array();
  for (const auto& v : r.verdicts) {
    verdicts.push_back({{"check", v.check},
                        {"level", v.level},
                        {"discrepancy", v.discrepancy},
                        {"tolerance", v.tolerance},
                        {"pass", v.pass},
                        {"detail", v.detail}});
  }
  j["verdicts"] = verdicts;
  Json levels = Json::array();
  for (const auto& l : r.levels) {
    Json e{{"n", l.n}, {"vertices", l.vertices}, {"atoms", l.atoms}, {"mass", l.mass}};
    if (l.distance_to_previous) e["distance_to_previous"] = *l.distance_to_previous;
    if (l.value) e["value"] = *l.value;
    levels.push_back(e);
  }
  j["levels"] = levels;
  j["tolerances"] = Json(r.tolerances);
  j["metrics"] = Json(r.metrics);
  return j;
}

std::vector<int> parse_levels(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  try {
    if (dots != std::string::npos) {
      const int lo = std::stoi(text.substr(0, dots));
      const int hi = std::stoi(text.substr(dots + 2));
      for (int n = lo; n <= hi; ++n) out.push_back(n);
    } else {
      std::stringstream ss(text);
      std::string tok;
      while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    }
  } catch (const std::exception&) {
    throw UsageError("malformed --levels '" + text + "'");
  }
  if (out.empty()) throw UsageError("--levels selects no level");
  return out;
}

int error_exit(std::ostream& err, std::string_view kind, const std::string& msg, int code) {
  err << Json{{"error", kind}, {"message", msg}}.dump() << "\n";
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectra of randomly blown-up self-similar lattices", "fractal-spectra"};
  app.require_subcommand(1);

  Common c;
  int level = 0;
  std::string word;
  std::string out_path;
  std::string mass_path;
  std::string csv_path;
  std::string levels_text = "1..5";
  bool dirichlet = false;
  bool with_nd = false;
  bool gnuplot = false;
  bool enumerate = false;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string check;

  auto* validate = app.add_subcommand("validate", "Check a structure; prints the report as JSON");
  add_common(validate, c);

  auto* build = app.add_subcommand("build", "Build the level-n lattice");
  add_common(build, c);
  build->add_option("--level", level, "Level n")->required();
  build->add_option("--word", word, "Blow-up word, e.g. 1,2,1");

  auto* assemble = app.add_subcommand("assemble", "Write the level-n form and masses as CSV");
  add_common(assemble, c);
  assemble->add_option("--level", level, "Level n")->required();
  assemble->add_option("--word", word, "Blow-up word (default 1,...,1)");
  assemble->add_option("--out", out_path, "Triplet CSV (row,col,value)")->required();
  assemble->add_option("--mass-out", mass_path, "Mass CSV (default <out>.mass.csv)");

  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalue counting measure at one level");
  add_common(spectrum, c);
  spectrum->add_option("--level", level, "Level n")->required();
  spectrum->add_option("--word", word, "Blow-up word (default 1,...,1)");
  spectrum->add_flag("--dirichlet", dirichlet, "Dirichlet instead of Neumann");
  spectrum->add_flag("--nd", with_nd, "Append the N-D eigenvalues");
  spectrum->add_option("--csv", csv_path, "Output CSV (default stdout)");
  spectrum->add_flag("--gnuplot", gnuplot, "Write <csv>.gp next to the CSV");

  auto* dos = app.add_subcommand("dos", "Density of states over several levels");
  add_common(dos, c);
  dos->add_option("--levels", levels_text, "Levels, 'a..b' or comma list");
  dos->add_flag("--dirichlet", dirichlet, "Dirichlet instead of Neumann");
  dos->add_option("--csv", csv_path, "Write atoms as CSV ('-' for stdout)")->expected(0, 1)->default_str("-");
  dos->add_flag("--gnuplot", gnuplot, "Write <csv>.gp next to the CSV");

  auto* nd = app.add_subcommand("nd", "Neumann-Dirichlet eigenvalues at one level");
  add_common(nd, c);
  nd->add_option("--level", level, "Level n")->required();
  nd->add_option("--csv", csv_path, "Also write atoms as CSV");

  auto* verify = app.add_subcommand("verify", "Run a check; exit 0 iff it passes");
  verify->add_option("check", check, "identity | nd-identity | replication | interlacing | deficiency | overlap")
      ->required()
      ->check(CLI::IsMember({"identity", "nd-identity", "replication", "interlacing", "deficiency", "overlap"}));
  add_common(verify, c);
  verify->add_option("--level", level, "Level n (n_max for deficiency)")->required();
  auto* enum_flag = verify->add_flag("--enumerate", enumerate, "Average over all N^n words");
  auto* samples_opt = verify->add_option("--samples", samples, "Number of sampled words");
  auto* seed_opt = verify->add_option("--seed", seed, "Seed for --samples");
  auto* word_opt = verify->add_option("--word", word, "Single explicit word");
  enum_flag->excludes(samples_opt)->excludes(word_opt);
  samples_opt->excludes(word_opt)->needs(seed_opt);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    return error_exit(err, "UsageError", e.what(), kUsage);
  }

  try {
    const AnalysisOptions opts = options(c);
    if (*validate) {
      const SelfSimilarStructure s = load(c);
      const ValidationReport r = validate_structure(s);
      Json j{{"ok", r.ok}};
      Json v = Json::array();
      for (const auto& x : r.violations) v.push_back({{"rule", x.rule}, {"message", x.message}});
      j["violations"] = v;
      j["derived"] = Json(r.derived);
      j["notes"] = r.notes;
      out << j.dump(2) << "\n";
      return r.ok ? kOk : kCheckFailed;
    }

    const SelfSimilarStructure s = load(c);
    require_valid(s);
    const double K = norm_bound(s);
    const double zero = opts.spectra.cluster_tol > 0.0 ? opts.spectra.cluster_tol : 1e-9 * K;

    if (*build) {
      const LatticeLevel lat = build_level(s, level, opts.caps);
      Json j{{"level", level}, {"vertices", lat.vertex_count()}};
      Json bnd = Json::array();
      for (std::size_t z = 0; z < lat.boundary().size(); ++z) {
        const int v = lat.boundary()[z];
        bnd.push_back({{"label", s.boundary[z].label}, {"vertex", v},
                       {"address", address_string(s, lat.canonical(v))}});
      }
      j["boundary"] = bnd;
      if (!word.empty() || level == 0) {
        const BlowupWord w = word_or_default(word, 0);
        const std::vector<int> emb = embed_base(lat, w);
        Json e = Json::array();
        for (std::size_t z = 0; z < emb.size(); ++z) {
          e.push_back({{"label", s.boundary[z].label}, {"vertex", emb[z]},
                       {"address", address_string(s, lat.canonical(emb[z]))}});
        }
        j["word"] = format_word(w);
        j["embedded"] = e;
      }
      out << j.dump(2) << "\n";
      return kOk;
    }

    if (*assemble) {
      const LatticeLevel lat = build_level(s, level, opts.caps);
      const BlowupWord w = word_or_default(word, level);
      const LevelOperator op = assemble_level(s, lat, w);
      std::ostringstream m;
      m << "# level=" << level << " word=" << format_word(w) << "\n" << "row,col,value\n";
      for (int col = 0; col < op.A.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(op.A, col); it; ++it) {
          m << it.row() << "," << it.col() << "," << num(it.value()) << "\n";
        }
      }
      std::ostringstream b;
      b << "# level=" << level << " word=" << format_word(w) << " omega_scale=" << num(op.omega_scale) << "\n"
        << "vertex,mass,mass_tilde\n";
      for (Eigen::Index v = 0; v < op.mass.size(); ++v) {
        b << v << "," << num(op.mass(v)) << "," << num(op.mass_tilde(v)) << "\n";
      }
      if (mass_path.empty()) mass_path = out_path + ".mass.csv";
      write_file(out_path, m.str());
      write_file(mass_path, b.str());
      out << Json{{"level", level}, {"word", format_word(w)}, {"vertices", lat.vertex_count()},
                  {"nonzeros", op.A.nonZeros()}, {"omega_scale", op.omega_scale},
                  {"matrix", out_path}, {"mass", mass_path}}
                 .dump(2)
          << "\n";
      return kOk;
    }

    if (*spectrum) {
      const LatticeLevel lat = build_level(s, level, opts.caps);
      const BlowupWord w = word_or_default(word, level);
      const LevelOperator op = assemble_level(s, lat, w);
      const BoundaryCondition bc = dirichlet ? BoundaryCondition::Dirichlet : BoundaryCondition::Neumann;
      const Eigendecomposition d = solve_pencil(make_pencil(op, bc), opts.caps);
      const PointMeasure mu = counting_measure(d, 1.0, opts.spectra.cluster_tol);
      std::ostringstream csv;
      csv << "# level=" << level << " word=" << format_word(w) << " cluster_tol=" << num(mu.cluster_tol())
          << " residual_tol=" << num(opts.spectra.residual_tol) << "\n"
          << "lambda,weight,kind\n";
      for (const auto& a : mu.atoms()) csv << num(a.lambda, zero) << "," << num(a.weight) << "," << to_string(bc) << "\n";
      if (with_nd) {
        const PointMeasure nd_mu = nd_counting_measure(op, 1.0, opts.spectra);
        for (const auto& a : nd_mu.atoms()) {
          csv << num(a.lambda, zero) << "," << num(a.weight) << ",nd\n";
        }
      }
      emit(csv_path, csv.str(), out, gnuplot, "spectrum level " + std::to_string(level));
      return kOk;
    }

    if (*dos) {
      const BoundaryCondition bc = dirichlet ? BoundaryCondition::Dirichlet : BoundaryCondition::Neumann;
      const std::vector<int> levels = parse_levels(levels_text);
      const ConvergenceReport r = dos_convergence(s, levels, bc, opts);
      if (dos->count("--csv") > 0) {
        std::ostringstream csv;
        csv << "# levels=" << levels_text << " cluster_tol=" << num(c.cluster_tol) << "\n"
            << "level,lambda,weight,kind\n";
        for (int n : levels) {
          const PointMeasure mu = density_of_states(s, n, bc, opts);
          for (const auto& a : mu.atoms()) {
            csv << n << "," << num(a.lambda, zero) << "," << num(a.weight) << "," << to_string(bc) << "\n";
          }
        }
        emit(csv_path, csv.str(), out, gnuplot, "density of states");
        if (csv_path.empty() || csv_path == "-") return kOk;
      }
      Json j = report_json(r);
      j["tolerances"] = tolerances_json(c);
      out << j.dump(2) << "\n";
      return kOk;
    }

    if (*nd) {
      if (level < 1) throw Error(ErrorKind::EmptyInterior, "N-D spectrum needs level >= 1");
      const LevelOperator op = default_operator(s, level, opts.caps);
      const NDSubspace sub = nd_subspace(op, opts.spectra);
      const double scale = 1.0 / std::pow(static_cast<double>(s.n_cells), level);
      Json atoms = Json::array();
      for (const auto& p : sub.pairs) atoms.push_back({{"lambda", p.lambda}, {"multiplicity", p.multiplicity}});
      out << Json{{"level", level}, {"vertices", op.level.vertex_count()}, {"dimension", sub.dimension()},
                  {"density_mass", sub.dimension() * scale}, {"atoms", atoms},
                  {"residual_tol", sub.residual_tol}, {"cluster_tol", sub.cluster_tol}}
                 .dump(2)
          << "\n";
      if (!csv_path.empty()) {
        std::ostringstream csv;
        csv << "# level=" << level << " residual_tol=" << num(sub.residual_tol)
            << " cluster_tol=" << num(sub.cluster_tol) << "\n"
            << "lambda,weight,kind\n";
        for (const auto& p : sub.pairs) csv << num(p.lambda, zero) << "," << p.multiplicity << ",nd\n";
        write_file(csv_path, csv.str());
      }
      return kOk;
    }

    if (*verify) {
      const bool needs_words = check == "identity" || check == "nd-identity" || check == "overlap";
      const int modes = static_cast<int>(enumerate) + static_cast<int>(samples_opt->count() > 0) +
                        static_cast<int>(!word.empty());
      if (needs_words && modes != 1) throw UsageError("'" + check + "' needs one of --enumerate, --samples, --word");
      if (!needs_words && modes != 0) throw UsageError("'" + check + "' takes no word selection");
      WordSelection sel = enumerate           ? WordSelection::enumerate()
                          : samples_opt->count() ? WordSelection::sample(samples, seed)
                                                 : WordSelection::explicit_words({word_or_default(word, level)});
      ConvergenceReport r;
      if (check == "identity") {
        r = verify_state_density_identity(s, level, sel, opts);
      } else if (check == "nd-identity") {
        r = verify_nd_identity(s, level, sel, opts);
      } else if (check == "replication") {
        r = verify_nd_replication(s, level, opts);
      } else if (check == "interlacing") {
        r = interlacing_check(s, level, opts);
      } else if (check == "deficiency") {
        r = deficiency_report(s, level, opts);
      } else {
        r = spectrum_overlap(s, level, select_words(s, level, sel, opts.caps), opts);
      }
      Json j = report_json(r);
      j["options"] = tolerances_json(c);
      out << j.dump(2) << "\n";
      return r.pass() ? kOk : kCheckFailed;
    }
  } catch (const UsageError& e) {
    return error_exit(err, "UsageError", e.what(), kUsage);
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::SchemaError:
      case ErrorKind::InvalidStructure:
      case ErrorKind::UnknownName:
      case ErrorKind::LengthMismatch:
        return error_exit(err, to_string(e.kind()), e.what(), kUsage);
      default:
        return error_exit(err, to_string(e.kind()), e.what(), kComputation);
    }
  } catch (const std::exception& e) {
    return error_exit(err, "InternalError", e.what(), kComputation);
  }
  return kUsage;
}

}  // namespace fsp::cli
