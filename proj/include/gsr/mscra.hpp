#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gsr/design.hpp"
#include "gsr/groups.hpp"
#include "gsr/phi.hpp"
#include "gsr/types.hpp"
#include "gsr/wl21.hpp"

namespace gsr {

/// min (nu/2n)||Ax - b||^2 + ||G(x)||_0 over the box.
struct MscraProblem {
  DesignPtr design;
  Vec b;
  GroupStructure groups;
  BoxConstraint box;

  Index n() const { return design->rows(); }
  Index p() const { return design->cols(); }
  void validate() const;
};

enum class RhoMode { Dynamic, Static };
enum class StopReason { Equilibrium, LossStall, MaxStages, Degenerate };

std::string to_string(RhoMode m);
std::string to_string(StopReason r);
RhoMode rho_mode_from_string(const std::string& s);

/// eps^0 = initial_factor * eps_loss, then eps^j = max(floor, decay * eps^{j-1}).
struct ToleranceSchedule {
  double initial_factor = 0.1;
  double decay = 0.8;
  double floor = 1e-5;
};

struct MscraConfig {
  PhiSpec phi = PhiSpec::scad();
  /// Explicit nu; when unset nu = n / (nu_scale ||A^T b||_inf).
  std::optional<double> nu;
  double nu_scale = 0.1;
  /// Initial weights; empty means all zero.
  Vec w0;
  double rho_cap_numerator = 1e8;
  double eps_gap = 1e-6;
  double eps_loss = 1e-2;
  int max_stages = 30;
  ToleranceSchedule tolerance;
  RhoMode rho_mode = RhoMode::Dynamic;
  /// Static mode only; defaults to 1.1 times the exact-penalty threshold.
  std::optional<double> static_rho;
  bool warm_start = true;
  AlmConfig alm;

  /// Checks scalar fields; w0 is checked against m and t_bar in run().
  void validate() const;
  double resolve_nu(const MscraProblem& problem) const;

  nlohmann::json to_json() const;
  static MscraConfig from_json(const nlohmann::json& j);
};

struct StageTrace {
  int k = 0;
  Vec x;
  Vec w;
  double rho = 0.0;
  /// lambda^k = rho^k / nu, used by the next stage.
  double lambda = 0.0;
  /// lambda^{k-1}, used by this stage's subproblem.
  double lambda_used = 0.0;
  double loss = 0.0;
  double eq_residual = 0.0;
  std::size_t group_sparsity = 0;
  double tolerance = 0.0;
  SolveStats inner_stats;

  /// One JSON object; vectors are included unless with_vectors is false.
  nlohmann::json to_json(bool with_vectors = true) const;
};

struct MscraResult {
  Vec x;
  std::vector<StageTrace> traces;
  StopReason reason = StopReason::MaxStages;
  double nu = 0.0;
  double rho_bar = 0.0;
  double lipschitz = 0.0;
  double wall_seconds = 0.0;
  bool all_inner_converged = true;

  int stages() const { return static_cast<int>(traces.size()); }
  /// Stopped by a stopping rule and the final subproblem met its tolerance.
  bool converged() const;
};

/// f(x) = ||Ax - b||^2 / (2n).
double loss_value(const Vec& x, const MscraProblem& problem);
/// (nu/2n)||Ax - b||^2 + number of nonzero groups; +inf outside the box.
double gsparse_objective(const Vec& x, const MscraProblem& problem, double nu);
/// nu f(x) + sum phi(w_i) + rho <e - w, G(x)>.
double penalty_objective(const Vec& x, const Vec& w, double rho, double nu, const PhiSpec& phi,
                         const MscraProblem& problem);

/// k = 1: 2/||G(x)||_inf; k >= 2: min(2 rho_prev, cap_num/||G(x)||_inf).
/// Throws DegenerateIterate when x has no nonzero group.
double rho_schedule(int k, const Vec& x_k, double rho_prev, const GroupStructure& g,
                    double cap_num);

Vec weight_update(const Vec& x_k, double rho, const PhiSpec& phi, const GroupStructure& g);

bool stopping_check(const StageTrace& curr, const StageTrace* prev, const MscraConfig& cfg);
/// Why stopping_check fired; nullopt when it did not.
std::optional<StopReason> stopping_reason(const StageTrace& curr, const StageTrace* prev,
                                          const MscraConfig& cfg);

double subproblem_tolerance(std::optional<double> prev, const MscraConfig& cfg);

MscraResult run(const MscraProblem& problem, const MscraConfig& cfg);

}  // namespace gsr
