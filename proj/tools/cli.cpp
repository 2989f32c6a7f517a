#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gsr/errors.hpp"
#include "gsr/io.hpp"
#include "gsr/json_util.hpp"

namespace gsr::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += csv_field(cells[i]);
  }
  return line + "\n";
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

SignalSpec SignalSpec::parse(const std::string& s) {
  SignalSpec out;
  const auto colon = s.find(':');
  out.kind = signal_kind_from_string(s.substr(0, colon));
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      out.alpha = std::stod(s.substr(colon + 1), &used);
      if (used != s.size() - colon - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("bad signal amplitude in '" + s + "'");
    }
  } else {
    out.alpha = out.kind == SignalKind::iii ? 1.0 : 2.0;
  }
  return out;
}

std::string SignalSpec::label() const {
  if (kind == SignalKind::iv) return "iv";
  return to_string(kind) + ":" + num(alpha);
}

std::vector<SignalSpec> all_signal_specs() {
  return {{SignalKind::i, 2.0},   {SignalKind::i, 1e5},   {SignalKind::ii, 2.0},
          {SignalKind::ii, 1e5},  {SignalKind::iii, 1.0}, {SignalKind::iii, 1e5},
          {SignalKind::iv, 1.0}};
}

void ExperimentPlan::validate() const {
  if (signals.empty()) throw std::invalid_argument("plan: at least one signal type is required");
  if (p <= 0 || m <= 0 || m > p) throw std::invalid_argument("plan: need 0 < m <= p");
  if (r_bar < 0 || r_bar > m) throw std::invalid_argument("plan: need 0 <= r_bar <= m");
  if (reps < 1) throw std::invalid_argument("plan: repetitions must be >= 1");
  if (!(theta1 >= 0.0) || !(theta2 >= 0.0)) throw std::invalid_argument("plan: theta1, theta2 must be >= 0");
  if (sample_sizes.empty() && betas.empty())
    throw std::invalid_argument("plan: give betas or sample sizes");
  for (auto [beta, n] : cells()) {
    (void)beta;
    if (n <= 0) throw std::invalid_argument("plan: every sample size must be positive");
    if (design == DesignKind::III && n > p)
      throw std::invalid_argument("plan: type III designs need n <= p");
  }
  mscra.validate();
  if (!(stage1_nu_scale > 0.0)) throw std::invalid_argument("plan: stage1_nu_scale must be > 0");
}

std::vector<std::pair<int, Index>> ExperimentPlan::cells() const {
  std::vector<std::pair<int, Index>> out;
  if (!sample_sizes.empty()) {
    for (Index n : sample_sizes) out.emplace_back(0, n);
  } else {
    for (int beta : betas) {
      if (beta <= 0) throw std::invalid_argument("plan: beta must be positive");
      out.emplace_back(beta, p / beta);
    }
  }
  return out;
}

InstanceSpec ExperimentPlan::instance_spec(std::size_t signal, std::size_t cell, int rep) const {
  const auto cs = cells();
  InstanceSpec s;
  s.design = design;
  s.signal = signals.at(signal).kind;
  s.alpha = signals.at(signal).alpha;
  s.n = cs.at(cell).second;
  s.p = p;
  s.m = m;
  s.r_bar = r_bar;
  s.theta1 = theta1;
  s.theta2 = theta2;
  s.seed = seed;
  s.index = (static_cast<std::uint64_t>(signal) * cs.size() + cell) * static_cast<std::uint64_t>(reps) +
            static_cast<std::uint64_t>(rep);
  return s;
}

nlohmann::json ExperimentPlan::to_json() const {
  std::vector<std::string> sig;
  for (const auto& s : signals) sig.push_back(s.label());
  return {{"design", to_string(design)},
          {"signals", sig},
          {"p", p},
          {"m", m},
          {"r_bar", r_bar},
          {"betas", betas},
          {"sample_sizes", sample_sizes},
          {"theta1", theta1},
          {"theta2", theta2},
          {"reps", reps},
          {"seed", seed},
          {"stage1_nu_scale", stage1_nu_scale},
          {"mscra", mscra.to_json()}};
}

void ExperimentPlan::update_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("plan: expected a JSON object");
  if (j.contains("design")) design = design_kind_from_string(j.at("design").get<std::string>());
  if (j.contains("signals")) {
    signals.clear();
    for (const auto& s : j.at("signals")) {
      const auto str = s.get<std::string>();
      if (str == "all") {
        for (const auto& x : all_signal_specs()) signals.push_back(x);
      } else {
        signals.push_back(SignalSpec::parse(str));
      }
    }
  }
  auto get = [&](const char* key, auto& dst) {
    if (j.contains(key)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
  };
  get("p", p);
  get("m", m);
  get("r_bar", r_bar);
  get("betas", betas);
  get("sample_sizes", sample_sizes);
  get("theta1", theta1);
  get("theta2", theta2);
  get("reps", reps);
  get("seed", seed);
  get("stage1_nu_scale", stage1_nu_scale);
  if (j.contains("mscra")) {
    nlohmann::json merged = mscra.to_json();
    merged.merge_patch(j.at("mscra"));
    mscra = MscraConfig::from_json(merged);
  }
}

std::string json_hash(const nlohmann::json& j) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << h;
  return ss.str();
}

unsigned worker_count(std::size_t tasks) {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("GSR_THREADS"); env && *env) {
    unsigned v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto res = std::from_chars(env, end, v);
    if (res.ec != std::errc() || res.ptr != end || v == 0)
      throw std::invalid_argument(std::string("GSR_THREADS must be a positive integer, got '") + env + "'");
    cap = v;
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(cap, tasks)));
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  const unsigned workers = worker_count(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  auto body = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < count;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (first) std::rethrow_exception(first);
}

MscraConfig stage1_config(const MscraConfig& base, double stage1_nu_scale) {
  MscraConfig c = base;
  c.max_stages = 1;
  c.nu.reset();
  c.nu_scale = stage1_nu_scale;
  c.w0 = Vec();
  return c;
}

namespace {

std::string cell_dir_name(const ExperimentPlan& plan, const SignalSpec& s, int beta, Index n) {
  std::string name = "design-" + to_string(plan.design) + "_signal-" + to_string(s.kind);
  if (s.kind != SignalKind::iv) name += "-a" + num(s.alpha);
  if (beta > 0) name += "_beta-" + std::to_string(beta);
  return name + "_n-" + std::to_string(n);
}

MscraProblem problem_of(const Instance& inst) {
  return {make_dense_design(inst.A), inst.b, inst.groups, BoxConstraint(inst.radius)};
}

const std::vector<std::string> kSummaryHeader = {
    "instance", "seed", "plan_hash", "config_hash", "relerr", "group_sparsity", "time_seconds",
    "stages", "stop_reason", "converged", "exact_support"};

}  // namespace

std::vector<fs::path> cmd_gen(const ExperimentPlan& plan, const fs::path& out) {
  plan.validate();
  const auto cells = plan.cells();
  const std::string plan_hash = json_hash(plan.to_json());
  std::vector<fs::path> dirs;
  std::vector<InstanceSpec> specs;
  for (std::size_t s = 0; s < plan.signals.size(); ++s)
    for (std::size_t c = 0; c < cells.size(); ++c)
      for (int r = 0; r < plan.reps; ++r) {
        std::ostringstream rep;
        rep << "rep-" << std::setw(3) << std::setfill('0') << r;
        dirs.push_back(out / cell_dir_name(plan, plan.signals[s], cells[c].first, cells[c].second) /
                       rep.str());
        specs.push_back(plan.instance_spec(s, c, r));
      }
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create directory '" + out.string() + "': " + ec.message());
  write_json(out / "plan.json", plan.to_json());
  parallel_for(specs.size(), [&](std::size_t i) {
    Instance inst = make_instance(specs[i]);
    inst.meta["plan_hash"] = plan_hash;
    save_instance(dirs[i], inst);
  });
  return dirs;
}

SolveOutcome cmd_solve(const fs::path& instance, const MscraConfig& cfg, const fs::path& out) {
  const Instance inst = load_instance(instance);
  SolveOutcome oc;
  oc.config_hash = json_hash(cfg.to_json());
  oc.result = run(problem_of(inst), cfg);
  if (inst.x_true && inst.x_true->norm() > 0.0) oc.metrics = metrics(oc.result.x, inst);

  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create directory '" + out.string() + "': " + ec.message());
  std::string jsonl;
  for (const auto& t : oc.result.traces) jsonl += t.to_json().dump() + "\n";
  write_text(out / "trace.jsonl", jsonl);
  write_f64(out / "x_out.f64", oc.result.x);

  const std::string plan_hash = inst.meta.value("plan_hash", std::string());
  const std::size_t sparsity = approx_group_zero_norm(oc.result.x, inst.groups);
  std::string csv = join(kSummaryHeader);
  csv += join({instance.string(), std::to_string(inst.seed), plan_hash, oc.config_hash,
               oc.metrics ? num(oc.metrics->relerr) : "", std::to_string(sparsity),
               num(oc.result.wall_seconds), std::to_string(oc.result.stages()),
               to_string(oc.result.reason), oc.result.converged() ? "true" : "false",
               oc.metrics ? (oc.metrics->exact_support ? "true" : "false") : ""});
  write_text(out / "summary.csv", csv);
  return oc;
}

BenchMode bench_mode_from_string(const std::string& s) {
  if (s == "gep") return BenchMode::Gep;
  if (s == "stage1") return BenchMode::Stage1;
  if (s == "both") return BenchMode::Both;
  throw std::invalid_argument("unknown bench mode '" + s + "' (expected gep, stage1 or both)");
}

BenchSummary cmd_bench(const ExperimentPlan& plan, BenchMode mode, const fs::path& out_csv,
                       const fs::path& runs_csv) {
  plan.validate();
  const auto cells = plan.cells();
  const std::string plan_hash = json_hash(plan.to_json());
  const MscraConfig cfg_gep = plan.mscra;
  const MscraConfig cfg_s1 = stage1_config(plan.mscra, plan.stage1_nu_scale);
  const std::string hash_gep = json_hash(cfg_gep.to_json());
  const std::string hash_s1 = json_hash(cfg_s1.to_json());

  std::vector<std::pair<std::string, const MscraConfig*>> solvers;
  if (mode != BenchMode::Stage1) solvers.emplace_back("gep", &cfg_gep);
  if (mode != BenchMode::Gep) solvers.emplace_back("stage1", &cfg_s1);

  struct Job {
    std::size_t signal, cell;
    int rep;
  };
  std::vector<Job> jobs;
  for (std::size_t s = 0; s < plan.signals.size(); ++s)
    for (std::size_t c = 0; c < cells.size(); ++c)
      for (int r = 0; r < plan.reps; ++r) jobs.push_back({s, c, r});

  struct RunRecord {
    bool failed = false;
    std::string error;
    double relerr = 0.0, time = 0.0;
    std::size_t sparsity = 0;
    int stages = 0;
    std::string reason;
    bool converged = false;
  };
  std::vector<std::vector<RunRecord>> records(jobs.size(), std::vector<RunRecord>(solvers.size()));

  parallel_for(jobs.size(), [&](std::size_t j) {
    const InstanceSpec spec = plan.instance_spec(jobs[j].signal, jobs[j].cell, jobs[j].rep);
    Instance inst;
    try {
      inst = make_instance(spec);
    } catch (const std::exception& e) {
      for (auto& rec : records[j]) {
        rec.failed = true;
        rec.error = e.what();
      }
      return;
    }
    const MscraProblem prob = problem_of(inst);
    for (std::size_t k = 0; k < solvers.size(); ++k) {
      RunRecord& rec = records[j][k];
      try {
        const MscraResult res = run(prob, *solvers[k].second);
        const Metrics mt = metrics(res.x, inst);
        rec.relerr = mt.relerr;
        rec.sparsity = mt.group_sparsity;
        rec.time = res.wall_seconds;
        rec.stages = res.stages();
        rec.reason = to_string(res.reason);
        // The one-stage baseline stops at its stage cap by design.
        rec.converged = solvers[k].first == "stage1" ? res.all_inner_converged : res.converged();
      } catch (const std::exception& e) {
        rec.failed = true;
        rec.error = e.what();
      }
    }
  });

  BenchSummary summary;
  std::string runs = join({"design", "signal", "alpha", "beta", "n", "rep", "seed", "instance_index",
                           "solver", "relerr", "group_sparsity", "time_seconds", "stages",
                           "stop_reason", "converged", "error", "plan_hash", "config_hash"});
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const auto spec = plan.instance_spec(jobs[j].signal, jobs[j].cell, jobs[j].rep);
    for (std::size_t k = 0; k < solvers.size(); ++k) {
      const RunRecord& r = records[j][k];
      ++summary.runs;
      if (r.failed) ++summary.failures;
      else if (!r.converged) ++summary.not_converged;
      runs += join({to_string(plan.design), to_string(spec.signal), num(spec.alpha),
                    std::to_string(cells[jobs[j].cell].first), std::to_string(spec.n),
                    std::to_string(jobs[j].rep), std::to_string(plan.seed), std::to_string(spec.index),
                    solvers[k].first, r.failed ? "" : num(r.relerr),
                    r.failed ? "" : std::to_string(r.sparsity), r.failed ? "" : num(r.time),
                    r.failed ? "" : std::to_string(r.stages), r.reason,
                    r.failed ? "" : (r.converged ? "true" : "false"), r.error, plan_hash,
                    solvers[k].first == "gep" ? hash_gep : hash_s1});
    }
  }

  std::vector<std::string> header = {"design", "signal", "alpha", "beta", "n", "reps"};
  for (const auto& [name, cfg] : solvers) {
    (void)cfg;
    for (const char* col : {"_relerr", "_time_seconds", "_group_sparsity", "_failures", "_not_converged"})
      header.push_back(name + col);
  }
  for (const char* col : {"seed", "plan_hash", "config_hash_gep", "config_hash_stage1"})
    header.emplace_back(col);
  std::string agg = join(header);
  for (std::size_t s = 0; s < plan.signals.size(); ++s)
    for (std::size_t c = 0; c < cells.size(); ++c) {
      std::vector<std::string> row = {to_string(plan.design), to_string(plan.signals[s].kind),
                                      num(plan.signals[s].alpha), std::to_string(cells[c].first),
                                      std::to_string(cells[c].second), std::to_string(plan.reps)};
      for (std::size_t k = 0; k < solvers.size(); ++k) {
        std::vector<double> rel, tim, spa;
        std::size_t fails = 0, nonconv = 0;
        for (std::size_t j = 0; j < jobs.size(); ++j) {
          if (jobs[j].signal != s || jobs[j].cell != c) continue;
          const RunRecord& r = records[j][k];
          if (r.failed) {
            ++fails;
            continue;
          }
          if (!r.converged) ++nonconv;
          rel.push_back(r.relerr);
          tim.push_back(r.time);
          spa.push_back(static_cast<double>(r.sparsity));
        }
        row.push_back(rel.empty() ? "" : num(mean(rel)));
        row.push_back(tim.empty() ? "" : num(mean(tim)));
        row.push_back(spa.empty() ? "" : num(mean(spa)));
        row.push_back(std::to_string(fails));
        row.push_back(std::to_string(nonconv));
      }
      row.push_back(std::to_string(plan.seed));
      row.push_back(plan_hash);
      row.push_back(mode != BenchMode::Stage1 ? hash_gep : "");
      row.push_back(mode != BenchMode::Gep ? hash_s1 : "");
      agg += join(row);
    }
  if (out_csv.has_parent_path()) fs::create_directories(out_csv.parent_path());
  write_text(out_csv, agg);
  if (!runs_csv.empty()) {
    if (runs_csv.has_parent_path()) fs::create_directories(runs_csv.parent_path());
    write_text(runs_csv, runs);
  }
  return summary;
}

nlohmann::json cmd_oracle(const fs::path& instance, std::optional<double> nu, double nu_scale) {
  const Instance inst = load_instance(instance);
  nlohmann::json out = {{"instance", instance.string()}};
  if (inst.x_true) {
    const OracleResult o = oracle_ls(inst);
    const Vec gerr = group_norms(o.x_ls - *inst.x_true, inst.groups);
    const Vec gproj = group_norms(o.projected_noise, inst.groups);
    out["oracle_ls"] = {{"x_ls", vec_to_json(o.x_ls)},
                        {"residual_noise_support_max", [&] {
                           double mx = 0.0;
                           const Vec g = group_norms(o.residual_noise, inst.groups);
                           for (Index i : inst.support_true) mx = std::max(mx, g[i]);
                           return mx;
                         }()},
                        {"error_group_inf", gerr.lpNorm<Eigen::Infinity>()},
                        {"projected_noise_group_inf", gproj.lpNorm<Eigen::Infinity>()},
                        {"correlated_noise_inf", o.correlated_noise.lpNorm<Eigen::Infinity>()}};
  }
  MscraConfig c;
  c.nu = nu;
  c.nu_scale = nu_scale;
  const MscraProblem prob = problem_of(inst);
  const double nu_val = c.resolve_nu(prob);
  out["nu"] = nu_val;
  if (inst.groups.num_groups() <= kBruteForceMaxGroups) {
    const BruteForceResult bf = brute_force_zero_norm(inst, nu_val, inst.radius);
    std::vector<Index> sup1;
    for (Index i : bf.support) sup1.push_back(i + 1);
    out["brute_force"] = {{"objective", bf.objective}, {"support", sup1}, {"x", vec_to_json(bf.x)}};
  } else {
    out["brute_force"] = nullptr;
  }
  return out;
}

namespace {

struct PlanFlags {
  std::string design = "I";
  std::vector<std::string> signals{"i"};
  long p = 512, m = 64, r_bar = 6;
  std::vector<int> betas{8};
  std::vector<long> ns;
  double theta1 = 0.1, theta2 = 0.1;
  int reps = 1;
  std::uint64_t seed = 1;
  std::string config;
};

struct SolverFlags {
  std::string phi;
  std::optional<double> nu;
  std::optional<double> nu_scale;
  std::optional<int> max_stages;
  std::string rho_mode;
};

void add_plan_flags(CLI::App* app, PlanFlags& f) {
  app->add_option("--design", f.design, "Design type I, II or III")->capture_default_str();
  app->add_option("--signal", f.signals, "Signal recipes, e.g. i, ii:2, iii:1e5, iv, all")
      ->capture_default_str();
  app->add_option("--p", f.p, "Number of features")->capture_default_str();
  app->add_option("--m", f.m, "Number of groups")->capture_default_str();
  app->add_option("--r-bar", f.r_bar, "Number of nonzero groups")->capture_default_str();
  app->add_option("--beta", f.betas, "Sample sizes n = floor(p/beta)")->capture_default_str();
  app->add_option("--n", f.ns, "Explicit sample sizes (override --beta)");
  app->add_option("--theta1", f.theta1, "Noise level on x")->capture_default_str();
  app->add_option("--theta2", f.theta2, "Noise level on b")->capture_default_str();
  app->add_option("--reps", f.reps, "Repetitions per cell")->capture_default_str();
  app->add_option("--seed", f.seed, "Master seed")->capture_default_str();
  app->add_option("--config", f.config, "Plan JSON; its fields override flags");
}

void add_solver_flags(CLI::App* app, SolverFlags& f) {
  app->add_option("--phi", f.phi, "Penalty family scad|mcp|capped_l1|lq");
  app->add_option("--nu", f.nu, "Explicit nu");
  app->add_option("--nu-scale", f.nu_scale, "nu = n / (scale ||A^T b||_inf)");
  app->add_option("--max-stages", f.max_stages, "Stage cap");
  app->add_option("--rho-mode", f.rho_mode, "dynamic or static");
}

void apply_solver_flags(const SolverFlags& f, MscraConfig& c) {
  if (!f.phi.empty()) {
    nlohmann::json j = {{"family", f.phi}};
    c.phi = PhiSpec::from_json(j);
  }
  if (f.nu) c.nu = *f.nu;
  if (f.nu_scale) c.nu_scale = *f.nu_scale;
  if (f.max_stages) c.max_stages = *f.max_stages;
  if (!f.rho_mode.empty()) c.rho_mode = rho_mode_from_string(f.rho_mode);
}

ExperimentPlan build_plan(const PlanFlags& f, const SolverFlags& sf) {
  ExperimentPlan plan;
  plan.design = design_kind_from_string(f.design);
  plan.signals.clear();
  for (const auto& s : f.signals) {
    if (s == "all") {
      for (const auto& x : all_signal_specs()) plan.signals.push_back(x);
    } else {
      plan.signals.push_back(SignalSpec::parse(s));
    }
  }
  plan.p = f.p;
  plan.m = f.m;
  plan.r_bar = f.r_bar;
  plan.betas = f.betas;
  plan.sample_sizes.assign(f.ns.begin(), f.ns.end());
  plan.theta1 = f.theta1;
  plan.theta2 = f.theta2;
  plan.reps = f.reps;
  plan.seed = f.seed;
  apply_solver_flags(sf, plan.mscra);
  if (!f.config.empty()) plan.update_from_json(read_json(f.config));
  plan.validate();
  return plan;
}

nlohmann::json error_json(const std::string& kind, const std::string& what) {
  return {{"error", kind}, {"message", what}};
}

}  // namespace

int main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"gsr: group zero-norm regularized least squares by multi-stage convex relaxation"};
  app.require_subcommand(1);

  PlanFlags gen_plan;
  SolverFlags gen_solver;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate synthetic instances");
  add_plan_flags(gen, gen_plan);
  add_solver_flags(gen, gen_solver);
  gen->add_option("--out", gen_out, "Output directory")->required();

  std::string solve_instance, solve_config, solve_out;
  SolverFlags solve_solver;
  auto* solve = app.add_subcommand("solve", "Solve one instance directory");
  solve->add_option("--instance", solve_instance, "Instance directory")->required();
  solve->add_option("--config", solve_config, "Solver configuration JSON; overrides flags");
  solve->add_option("--out", solve_out, "Report directory (default: <instance>/solve)");
  add_solver_flags(solve, solve_solver);

  PlanFlags bench_plan;
  SolverFlags bench_solver;
  std::string bench_mode = "both", bench_out, bench_runs;
  auto* bench = app.add_subcommand("bench", "Run a benchmark sweep and aggregate");
  add_plan_flags(bench, bench_plan);
  add_solver_flags(bench, bench_solver);
  bench->add_option("--mode", bench_mode, "gep, stage1 or both")->capture_default_str();
  bench->add_option("--out", bench_out, "Aggregate CSV path")->required();
  bench->add_option("--runs", bench_runs, "Optional per-run CSV path");

  std::string oracle_instance, oracle_out;
  std::optional<double> oracle_nu;
  double oracle_nu_scale = 0.1;
  auto* oracle = app.add_subcommand("oracle", "Restricted least squares and brute-force optimum");
  oracle->add_option("--instance", oracle_instance, "Instance directory")->required();
  oracle->add_option("--nu", oracle_nu, "Explicit nu");
  oracle->add_option("--nu-scale", oracle_nu_scale, "nu = n / (scale ||A^T b||_inf)")
      ->capture_default_str();
  oracle->add_option("--out", oracle_out, "Write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*gen) {
      const ExperimentPlan plan = build_plan(gen_plan, gen_solver);
      const auto dirs = cmd_gen(plan, gen_out);
      out << "wrote " << dirs.size() << " instances to " << gen_out << "\n";
      return kExitOk;
    }
    if (*solve) {
      MscraConfig cfg;
      apply_solver_flags(solve_solver, cfg);
      if (!solve_config.empty()) {
        nlohmann::json file = read_json(solve_config);
        if (file.contains("mscra")) file = file.at("mscra");
        nlohmann::json merged = cfg.to_json();
        merged.merge_patch(file);
        cfg = MscraConfig::from_json(merged);
      }
      const fs::path dest = solve_out.empty() ? fs::path(solve_instance) / "solve" : fs::path(solve_out);
      const SolveOutcome oc = cmd_solve(solve_instance, cfg, dest);
      nlohmann::json report = {{"stages", oc.result.stages()},
                               {"stop_reason", to_string(oc.result.reason)},
                               {"converged", oc.result.converged()},
                               {"group_sparsity", oc.result.traces.empty() ? 0 : oc.result.traces.back().group_sparsity},
                               {"wall_seconds", oc.result.wall_seconds},
                               {"out", dest.string()}};
      if (oc.metrics) report["relerr"] = oc.metrics->relerr;
      out << report.dump() << "\n";
      if (!oc.result.converged()) {
        nlohmann::json diag = error_json("not_converged", "solver did not converge");
        diag["stop_reason"] = to_string(oc.result.reason);
        diag["all_inner_converged"] = oc.result.all_inner_converged;
        if (!oc.result.traces.empty()) diag["last_inner"] = oc.result.traces.back().inner_stats.to_json();
        err << diag.dump() << "\n";
        return kExitNotConverged;
      }
      return kExitOk;
    }
    if (*bench) {
      const ExperimentPlan plan = build_plan(bench_plan, bench_solver);
      const BenchSummary s = cmd_bench(plan, bench_mode_from_string(bench_mode), bench_out, bench_runs);
      out << nlohmann::json{{"runs", s.runs}, {"failures", s.failures}, {"not_converged", s.not_converged}}.dump()
          << "\n";
      return s.failures == 0 ? kExitOk : kExitNotConverged;
    }
    if (*oracle) {
      const nlohmann::json res = cmd_oracle(oracle_instance, oracle_nu, oracle_nu_scale);
      if (oracle_out.empty()) out << res.dump(2) << "\n";
      else write_json(oracle_out, res);
      return kExitOk;
    }
  } catch (const IoError& e) {
    err << error_json("io", e.what()).dump() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << error_json("usage", e.what()).dump() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << error_json("config", e.what()).dump() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << error_json("io", e.what()).dump() << "\n";
    return kExitUsage;
  } catch (const SolverStall& e) {
    nlohmann::json d = error_json("solver_stall", e.what());
    d["diagnostics"] = nlohmann::json::parse(e.diagnostics(), nullptr, false);
    err << d.dump() << "\n";
    return kExitNotConverged;
  } catch (const std::exception& e) {
    err << error_json("solver", e.what()).dump() << "\n";
    return kExitNotConverged;
  }
  return kExitUsage;
}

}  // namespace gsr::cli
