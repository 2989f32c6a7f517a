#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gsr/bench.hpp"
#include "gsr/mscra.hpp"
#include "gsr/phi.hpp"

namespace gsr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNotConverged = 1;
inline constexpr int kExitUsage = 2;

/// A signal recipe together with its amplitude, written "i", "iii" or "i:1e5".
struct SignalSpec {
  SignalKind kind = SignalKind::i;
  double alpha = 2.0;

  static SignalSpec parse(const std::string& s);
  std::string label() const;
};

/// The seven recipes of the synthetic benchmark.
std::vector<SignalSpec> all_signal_specs();

struct ExperimentPlan {
  DesignKind design = DesignKind::I;
  std::vector<SignalSpec> signals{SignalSpec{}};
  Index p = 512;
  Index m = 64;
  Index r_bar = 6;
  /// n = floor(p / beta) for each beta; ignored when sample_sizes is set.
  std::vector<int> betas{8};
  std::vector<Index> sample_sizes;
  double theta1 = 0.1;
  double theta2 = 0.1;
  int reps = 1;
  std::uint64_t seed = 1;
  /// Solver settings shared by every run in the plan.
  MscraConfig mscra;
  /// lambda = (stage1_nu_scale / n) ||A^T b||_inf for the one-stage baseline.
  double stage1_nu_scale = 0.13;

  void validate() const;
  /// (beta or 0, n) pairs in plan order.
  std::vector<std::pair<int, Index>> cells() const;
  InstanceSpec instance_spec(std::size_t signal, std::size_t cell, int rep) const;

  nlohmann::json to_json() const;
  /// Fields present in `j` override the current values.
  void update_from_json(const nlohmann::json& j);
};

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string json_hash(const nlohmann::json& j);

/// Worker count from GSR_THREADS (capped at `tasks`, at least 1). Throws
/// std::invalid_argument for a malformed value.
unsigned worker_count(std::size_t tasks);
/// Runs fn(0..count-1) on up to worker_count(count) threads. The first
/// exception is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

MscraConfig stage1_config(const MscraConfig& base, double stage1_nu_scale);

/// Writes every instance of the plan below `out`; returns the directories.
std::vector<std::filesystem::path> cmd_gen(const ExperimentPlan& plan,
                                           const std::filesystem::path& out);

struct SolveOutcome {
  MscraResult result;
  std::optional<Metrics> metrics;
  std::string config_hash;
};

/// Solves one instance directory and writes trace.jsonl, summary.csv and
/// x_out.f64 into `out`.
SolveOutcome cmd_solve(const std::filesystem::path& instance, const MscraConfig& cfg,
                       const std::filesystem::path& out);

enum class BenchMode { Gep, Stage1, Both };
BenchMode bench_mode_from_string(const std::string& s);

struct BenchSummary {
  std::size_t runs = 0;
  std::size_t failures = 0;
  std::size_t not_converged = 0;
};

/// Runs the plan in memory and writes the aggregate CSV (and per-run CSV when
/// `runs_csv` is nonempty).
BenchSummary cmd_bench(const ExperimentPlan& plan, BenchMode mode,
                       const std::filesystem::path& out_csv,
                       const std::filesystem::path& runs_csv = {});

/// Restricted least squares and, for m <= 16, the brute-force optimum.
nlohmann::json cmd_oracle(const std::filesystem::path& instance, std::optional<double> nu,
                          double nu_scale = 0.1);

/// Entry point of the gsr executable.
int main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace gsr::cli
