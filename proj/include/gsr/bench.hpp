#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gsr/groups.hpp"
#include "gsr/types.hpp"

namespace gsr {

enum class DesignKind { I, II, III };
enum class SignalKind { i, ii, iii, iv };

std::string to_string(DesignKind k);
std::string to_string(SignalKind k);
DesignKind design_kind_from_string(const std::string& s);
SignalKind signal_kind_from_string(const std::string& s);

/// I: iid N(0,1). II: iid random signs. III: n distinct rows of the
/// Sylvester Hadamard matrix of order p, kept in ascending row order.
Mat gen_design(DesignKind kind, Index n, Index p, std::uint64_t seed, std::uint64_t stream = 0);

struct Signal {
  Vec x;
  IndexList support;  // ascending group ids
};

/// r_bar groups chosen uniformly at random, filled by
///   i   alpha * N(0,1)
///   ii  alpha * U[0,1) - 0.5
///   iii alpha * sign(N(0,1))
///   iv  -1e5/sqrt(i) on the first floor(r_bar/2) selected groups and
///       +1e5/sqrt(i) on the rest, i the 1-based group index (alpha unused).
Signal gen_signal(SignalKind kind, const GroupStructure& g, Index r_bar, double alpha,
                  std::uint64_t seed, std::uint64_t stream = 0);

/// b = A (x + theta1 e1/||e1||) + theta2 e2/||e2||, e1 in R^p and e2 in R^n standard normal.
Vec gen_observations(const Mat& a, const Vec& x, double theta1, double theta2,
                     std::uint64_t seed, std::uint64_t stream = 0);

struct Instance {
  Mat A;
  Vec b;
  GroupStructure groups;
  std::optional<Vec> x_true;
  IndexList support_true;
  double radius = 1.0;
  std::uint64_t seed = 0;
  nlohmann::json meta = nlohmann::json::object();

  Index n() const { return A.rows(); }
  Index p() const { return A.cols(); }
};

struct InstanceSpec {
  DesignKind design = DesignKind::I;
  SignalKind signal = SignalKind::i;
  Index n = 0;
  Index p = 0;
  Index m = 0;
  Index r_bar = 0;
  double alpha = 2.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::uint64_t seed = 0;
  /// Position within a batch; selects independent random streams.
  std::uint64_t index = 0;
};

/// Contiguous groups of size ceil(p/m) and box radius 1000 ||x_true||_inf.
Instance make_instance(const InstanceSpec& spec);

struct OracleResult {
  Vec x_ls;
  /// (1/n) A^T (A x_ls - b)
  Vec residual_noise;
  /// (1/n) A^T eps and the restricted projection (A_S^T A_S)^{-1} A_S^T eps,
  /// where eps = b - A x_true; empty when x_true is unknown.
  Vec correlated_noise;
  Vec projected_noise;
};

/// Least squares restricted to the true support. Throws SingularDesign when
/// the restricted design is rank deficient.
OracleResult oracle_ls(const Instance& inst);

struct BruteForceResult {
  Vec x;
  double objective = 0.0;
  IndexList support;
};

inline constexpr Index kBruteForceMaxGroups = 16;

/// Global minimizer of (nu/2n)||Ax - b||^2 + ||G(x)||_0 over the box by
/// enumerating all group supports.
BruteForceResult brute_force_zero_norm(const Instance& inst, double nu, double radius);

/// min (1/2n)||A_J z - b||^2 over |z| <= radius for the given columns, by
/// accelerated projected gradient (exact least squares when that is feasible).
Vec box_restricted_ls(const Mat& a, const Vec& b, const IndexList& cols, double radius,
                      double tol = 1e-10, int max_iter = 200000);

struct TaskData {
  Mat X;
  Vec y;
};

/// Block-diagonal design with one group per task; box radius 2000.
Instance assemble_multitask(const std::vector<TaskData>& tasks);

struct Metrics {
  double relerr = 0.0;
  std::size_t group_sparsity = 0;
  double support_precision = 0.0;
  double support_recall = 0.0;
  bool exact_support = false;
};

Metrics metrics(const Vec& x_out, const Instance& inst);

}  // namespace gsr
