#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "gsr/io.hpp"
#include "tmpdir.hpp"

using namespace gsr;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gsr");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> v;
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> v;
  std::stringstream ss(s);
  for (std::string f; std::getline(ss, f, ',');) v.push_back(f);
  if (!s.empty() && s.back() == ',') v.emplace_back();
  return v;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t k = 0; k < header.size(); ++k)
    if (header[k] == name) return k;
  FAIL("missing column " << name);
  return 0;
}

const std::vector<std::string> kSmallPlan = {"--p", "32", "--m", "8", "--r-bar", "2", "--n", "24",
                                             "--theta1", "0.05", "--theta2", "0.05"};

std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors") {
  CHECK(run_cli({}).code == cli::kExitUsage);
  CHECK(run_cli({"frobnicate"}).code == cli::kExitUsage);
  CHECK(run_cli({"solve"}).code == cli::kExitUsage);  // --instance required
  CHECK(run_cli({"--help"}).code == cli::kExitOk);
  TempDir tmp;
  const auto r = run_cli({"solve", "--instance", (tmp.path / "missing").string()});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("missing") != std::string::npos);
  CHECK(run_cli({"oracle", "--instance", (tmp.path / "missing").string()}).code == cli::kExitUsage);
  CHECK(run_cli(with({"gen", "--out", tmp.path.string(), "--design", "IV"}, kSmallPlan)).code ==
        cli::kExitUsage);
  write_text(tmp.path / "bad.json", "{not json");
  CHECK(run_cli(with({"bench", "--out", (tmp.path / "a.csv").string(), "--config",
                      (tmp.path / "bad.json").string()},
                     kSmallPlan))
            .code == cli::kExitUsage);
}

TEST_CASE("signal specs") {
  CHECK(cli::SignalSpec::parse("iii").alpha == 1.0);
  CHECK(cli::SignalSpec::parse("i").alpha == 2.0);
  CHECK(cli::SignalSpec::parse("ii:1e5").alpha == 1e5);
  CHECK(cli::all_signal_specs().size() == 7);
  CHECK_THROWS_AS(cli::SignalSpec::parse("v"), std::invalid_argument);
}

TEST_CASE("gen, solve and oracle") {
  TempDir tmp;
  const auto out = tmp.path / "inst";
  auto r = run_cli(with({"gen", "--out", out.string(), "--seed", "4"}, kSmallPlan));
  REQUIRE(r.code == 0);
  std::vector<fs::path> dirs;
  for (const auto& e : fs::recursive_directory_iterator(out))
    if (e.is_regular_file() && e.path().filename() == "A.gsrm") dirs.push_back(e.path().parent_path());
  REQUIRE(dirs.size() == 1);
  CHECK(fs::exists(out / "plan.json"));

  // regenerating gives byte-identical payloads
  const auto out2 = tmp.path / "inst2";
  REQUIRE(run_cli(with({"gen", "--out", out2.string(), "--seed", "4"}, kSmallPlan)).code == 0);
  const auto rel = fs::relative(dirs[0], out);
  for (const char* f : {"A.gsrm", "b.f64", "x_true.f64", "groups.json", "meta.json"}) {
    std::ifstream a(out / rel / f, std::ios::binary), b(out2 / rel / f, std::ios::binary);
    std::stringstream sa, sb;
    sa << a.rdbuf();
    sb << b.rdbuf();
    CHECK(sa.str() == sb.str());
  }

  r = run_cli({"solve", "--instance", dirs[0].string(), "--out", (tmp.path / "s").string()});
  CHECK(r.code == 0);
  const auto trace = lines(tmp.path / "s" / "trace.jsonl");
  CHECK(!trace.empty());
  for (const auto& l : trace) CHECK(nlohmann::json::parse(l).contains("lambda"));
  const auto summary = lines(tmp.path / "s" / "summary.csv");
  REQUIRE(summary.size() == 2);
  const auto h = split(summary[0]);
  const auto row = split(summary[1]);
  REQUIRE(h.size() == row.size());
  for (const char* c : {"seed", "plan_hash", "config_hash"}) CHECK(!row[column(h, c)].empty());
  CHECK(row[column(h, "stop_reason")] == "equilibrium");
  CHECK(row[column(h, "exact_support")] == "true");
  CHECK(read_f64(tmp.path / "s" / "x_out.f64").size() == 32);

  // max_stages = 1 equals the first stage of the full run
  r = run_cli({"solve", "--instance", dirs[0].string(), "--out", (tmp.path / "s1").string(),
               "--max-stages", "1"});
  CHECK(r.code == cli::kExitNotConverged);
  const auto first = nlohmann::json::parse(trace[0]);
  const Vec x1 = read_f64(tmp.path / "s1" / "x_out.f64");
  for (Index j = 0; j < 32; ++j) CHECK(x1[j] == first["x"][static_cast<std::size_t>(j)].get<double>());

  // config file overrides flags
  write_json(tmp.path / "cfg.json", {{"max_stages", 1}});
  r = run_cli({"solve", "--instance", dirs[0].string(), "--out", (tmp.path / "s2").string(),
               "--config", (tmp.path / "cfg.json").string(), "--max-stages", "5"});
  CHECK(lines(tmp.path / "s2" / "trace.jsonl").size() == 1);

  r = run_cli({"oracle", "--instance", dirs[0].string()});
  REQUIRE(r.code == 0);
  const auto oj = nlohmann::json::parse(r.out);
  CHECK(oj["oracle_ls"].contains("x_ls"));
  CHECK(oj.contains("brute_force"));
}

TEST_CASE("seventy benchmark problems") {
  TempDir tmp;
  auto r = run_cli({"gen", "--out", tmp.path.string(), "--signal", "all", "--reps", "10", "--p", "16",
                    "--m", "4", "--r-bar", "1", "--n", "8"});
  REQUIRE(r.code == 0);
  std::size_t count = 0;
  for (const auto& e : fs::recursive_directory_iterator(tmp.path))
    if (e.is_regular_file() && e.path().filename() == "A.gsrm") ++count;
  CHECK(count == 70);
}

TEST_CASE("bench aggregate and provenance") {
  TempDir tmp;
  const auto args = with({"bench", "--mode", "both", "--reps", "2", "--seed", "3", "--out",
                          (tmp.path / "agg.csv").string(), "--runs", (tmp.path / "runs.csv").string()},
                         kSmallPlan);
  REQUIRE(run_cli(args).code == 0);
  const auto agg = lines(tmp.path / "agg.csv");
  REQUIRE(agg.size() == 2);
  const auto h = split(agg[0]);
  const auto row = split(agg[1]);
  for (const char* c : {"gep_relerr", "stage1_relerr", "gep_group_sparsity", "stage1_time_seconds",
                        "seed", "plan_hash", "config_hash_gep", "config_hash_stage1"})
    CHECK(!row[column(h, c)].empty());
  const auto runs = lines(tmp.path / "runs.csv");
  REQUIRE(runs.size() == 5);  // header + 2 reps x 2 solvers
  const auto rh = split(runs[0]);
  double sum = 0;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    const auto rr = split(runs[k]);
    if (rr[column(rh, "solver")] == "gep") sum += std::stod(rr[column(rh, "relerr")]);
  }
  CHECK(std::stod(row[column(h, "gep_relerr")]) == doctest::Approx(sum / 2).epsilon(1e-12));

  // rerun with a different worker count: identical metrics
  setenv("GSR_THREADS", "1", 1);
  const auto args2 = with({"bench", "--mode", "both", "--reps", "2", "--seed", "3", "--out",
                           (tmp.path / "agg2.csv").string(), "--runs", (tmp.path / "runs2.csv").string()},
                          kSmallPlan);
  REQUIRE(run_cli(args2).code == 0);
  unsetenv("GSR_THREADS");
  const auto runs2 = lines(tmp.path / "runs2.csv");
  REQUIRE(runs2.size() == runs.size());
  for (std::size_t k = 1; k < runs.size(); ++k) {
    const auto a = split(runs[k]), b = split(runs2[k]);
    for (const char* c : {"relerr", "group_sparsity", "stages", "stop_reason", "plan_hash", "config_hash"})
      CHECK(a[column(rh, c)] == b[column(rh, c)]);
  }
}

TEST_CASE("thread cap") {
  setenv("GSR_THREADS", "3", 1);
  CHECK(cli::worker_count(10) == 3);
  CHECK(cli::worker_count(2) == 2);
  setenv("GSR_THREADS", "zero", 1);
  CHECK_THROWS_AS(cli::worker_count(10), std::invalid_argument);
  unsetenv("GSR_THREADS");
  CHECK(cli::worker_count(1) == 1);
}

TEST_CASE("plan json") {
  cli::ExperimentPlan plan;
  plan.p = 64;
  plan.reps = 3;
  plan.signals = {cli::SignalSpec::parse("iv")};
  cli::ExperimentPlan back;
  back.update_from_json(plan.to_json());
  CHECK(back.to_json() == plan.to_json());
  CHECK(cli::json_hash(plan.to_json()) == cli::json_hash(back.to_json()));
  CHECK(cli::json_hash(plan.to_json()).size() == 16);
  back.reps = 0;
  CHECK_THROWS_AS(back.validate(), std::invalid_argument);
}

}
