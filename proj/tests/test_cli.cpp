#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "fractal-spectra");
  std::ostringstream out;
  std::ostringstream err;
  const int code = fsp::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(FSP_TEST_DATA_DIR) + "/" + name; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#' && line.rfind("lambda", 0) != 0) rows.push_back(line);
  }
  return rows;
}

}  // namespace

TEST_CASE("validate") {
  const Result ok = run({"validate", data("sg3.json")});
  CHECK(ok.code == 0);
  const auto j = nlohmann::json::parse(ok.out);
  CHECK(j["ok"] == true);
  CHECK(j["derived"]["K"].get<double>() == doctest::Approx(9.0));

  CHECK(run({"validate", "--builtin", "interval"}).code == 0);
  CHECK(run({"validate", data("interval_skewed.json")}).code == 0);
  CHECK(run({"validate", "--builtin", "carpet"}).code == 2);
  CHECK(run({"validate", "/nonexistent/file.json"}).code == 2);
}

TEST_CASE("spectrum rows") {
  const Result r = run({"spectrum", "--builtin", "interval", "--level", "1"});
  CHECK(r.code == 0);
  const auto rows = data_rows(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == "-4,1,neumann");
  CHECK(rows[1] == "-2,1,neumann");
  CHECK(rows[2] == "0,1,neumann");

  const Result d = run({"spectrum", "--builtin", "interval", "--level", "1", "--dirichlet"});
  CHECK(data_rows(d.out) == std::vector<std::string>{"-2,1,dirichlet"});

  const Result nd = run({"spectrum", "--builtin", "sg3", "--level", "2", "--nd"});
  CHECK(nd.code == 0);
  CHECK(nd.out.find("-9,3,nd") != std::string::npos);
}

TEST_CASE("build") {
  const Result r = run({"build", "--builtin", "sg3", "--level", "2", "--word", "1,3"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["vertices"].get<int>() == 15);
  CHECK(j["boundary"].size() == 3);
  CHECK(j["embedded"].size() == 3);
}

TEST_CASE("errors map to exit codes") {
  const Result cap = run({"build", "--builtin", "sg3", "--level", "9"});
  CHECK(cap.code == 3);
  const auto j = nlohmann::json::parse(cap.err);
  CHECK(j["error"] == "SizeCapExceeded");

  CHECK(run({"build", "--builtin", "sg3", "--level", "2", "--word", "1"}).code == 2);
  CHECK(run({"spectrum", "--builtin", "interval"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"spectrum", "--builtin", "interval", "--level", "0", "--dirichlet"}).code == 3);
}

TEST_CASE("verify") {
  CHECK(run({"verify", "identity", "--builtin", "interval", "--level", "3", "--enumerate"}).code == 0);
  CHECK(run({"verify", "identity", "--builtin", "interval", "--level", "2", "--word", "1,1"}).code == 1);
  CHECK(run({"verify", "replication", "--builtin", "sg3", "--level", "2"}).code == 0);
  CHECK(run({"verify", "interlacing", "--builtin", "sg3", "--level", "3"}).code == 0);
  const Result def = run({"verify", "deficiency", "--builtin", "sg3", "--level", "3"});
  CHECK(def.code == 0);
  CHECK(nlohmann::json::parse(def.out)["pass"] == true);
  CHECK(run({"verify", "identity", "--builtin", "sg3", "--level", "2"}).code == 2);
  CHECK(run({"verify", "identity", "--builtin", "sg3", "--level", "2", "--enumerate", "--samples", "4"}).code ==
        2);
}

TEST_CASE("assemble writes triplets and masses") {
  const auto dir = std::filesystem::temp_directory_path() / "fsp_cli_assemble";
  std::filesystem::create_directories(dir);
  const auto out = dir / "a.csv";
  const Result r = run({"assemble", "--builtin", "interval", "--level", "1", "--out", out.string()});
  CHECK(r.code == 0);
  const std::string a = slurp(out);
  CHECK(a.find("1,1,2") != std::string::npos);
  const std::string m = slurp(out.string() + ".mass.csv");
  CHECK(m.find("0.5") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("outputs are deterministic across runs and thread counts") {
  const std::vector<std::string> base{"verify", "identity", "--builtin", "sg3",  "--level",
                                      "3",      "--samples", "30",      "--seed", "11"};
  auto with_jobs = [&](const char* jobs) {
    auto a = base;
    a.push_back("--jobs");
    a.push_back(jobs);
    return run(a).out;
  };
  const std::string first = with_jobs("1");
  CHECK_FALSE(first.empty());
  CHECK(with_jobs("1") == first);
  CHECK(with_jobs("3") == first);

  const std::string dos = run({"dos", "--builtin", "sg3", "--levels", "1..3", "--csv"}).out;
  CHECK(run({"dos", "--builtin", "sg3", "--levels", "1..3", "--csv", "--jobs", "2"}).out == dos);
}
