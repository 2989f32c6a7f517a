#pragma once

#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "gsr/design.hpp"
#include "gsr/groups.hpp"
#include "gsr/types.hpp"

namespace gsr {

/// One weighted l2,1-regularized box-constrained least-squares instance
///   min 1/2 ||Ax - b||^2 + sum_i omega_i ||x_{J_i}||  s.t. ||x||_inf <= R,
/// solved through its dual
///   min 1/2 ||xi||^2 + <b,xi> + R ||eta||_1 + delta_Lambda(zeta)
///   s.t. A^T xi + eta - zeta = 0,  Lambda_i = {||z|| <= omega_i}.
struct SubproblemSpec {
  DesignPtr design;
  Vec b;
  GroupStructure groups;
  Vec omega;
  BoxConstraint box;

  Index n() const { return design->rows(); }
  Index p() const { return design->cols(); }
  /// Throws std::invalid_argument on inconsistent dimensions or negative weights.
  void validate() const;
};

/// Iterate of the dual augmented Lagrangian method. `x` is the multiplier of
/// the constraint A^T xi + eta - zeta = 0; the primal solution is -x.
struct DualState {
  Vec eta;
  Vec xi;
  Vec zeta;
  Vec x;
  double sigma = 1.0;

  static DualState zeros(Index n, Index p, double sigma);
};

struct SncgConfig {
  double theta_bar = 0.5;
  double tau = 0.5;
  double delta = 0.5;
  double mu = 1e-4;
  int cg_max = 300;
  int max_iter = 50;
  int max_backtracks = 50;
  /// Stop once ||grad Phi|| <= grad_tol.
  double grad_tol = 1e-8;

  void validate() const;
};

struct AbcdConfig {
  int max_iter = 500;
  /// Stop when the relative decrease of L_sigma falls below
  /// decrease_factor * (ALM tolerance) and the block residual is below
  /// pinf_factor * (ALM tolerance).
  double decrease_factor = 1e-2;
  double pinf_factor = 0.1;
  bool reset_on_increase = true;
};

struct AlmConfig {
  double sigma0 = 1.0;
  double sigma_growth = 1.3;
  double sigma_max = 1e6;
  double tol = 1e-6;
  int max_outer = 200;
  /// Newton tolerance is sncg_rel_tol * tol * (1 + ||xi||), xi at the start of the solve.
  double sncg_rel_tol = 1e-2;
  /// When pinf and dinf meet tol but the gap does not, the next inner solve runs
  /// to inner_tighten times the previous inner tolerance, down to inner_floor_factor * tol.
  double inner_tighten = 0.1;
  double inner_floor_factor = 1e-4;
  AbcdConfig abcd;
  SncgConfig sncg;

  void validate() const;
  nlohmann::json to_json() const;
  static AlmConfig from_json(const nlohmann::json& j);
};

struct LineSearchExit {
  double step = 0.0;
  double slope = 0.0;         // <grad Phi, d>
  double change = 0.0;        // Phi(xi + step d) - Phi(xi)
  int backtracks = 0;
};

struct SncgStats {
  std::vector<LineSearchExit> line_searches;
  int iterations = 0;
  int cg_iterations = 0;
  int steepest_fallbacks = 0;
  int backtracks = 0;
  double grad_norm = 0.0;
};

struct SncgResult {
  Vec xi;
  SncgStats stats;
};

struct AbcdStats {
  int iterations = 0;
  int sncg_iterations = 0;
  int cg_iterations = 0;
  int momentum_resets = 0;
  /// sigma ||(zeta - zeta~) + A^T(xi~ - xi)|| / (1 + ||b||) at the last inner iterate.
  double pinf = 0.0;
  std::vector<double> lagrangian_trace;
};

struct AbcdResult {
  DualState state;
  AbcdStats stats;
  /// Groups whose last projection was inactive (||y_i|| <= omega_i).
  std::vector<bool> inside;
};

struct OuterRecord {
  double pinf = 0.0;
  double dinf = 0.0;
  double gap = 0.0;
  double sigma = 0.0;
  int abcd_iters = 0;
  int sncg_iters = 0;
  int cg_iters = 0;
};

struct SolveStats {
  std::vector<OuterRecord> outer;
  double wall_seconds = 0.0;
  bool converged = false;
  bool stalled = false;
  std::string message;

  int outer_iterations() const { return static_cast<int>(outer.size()); }
  nlohmann::json to_json() const;
};

struct AlmResult {
  Vec x;
  DualState state;
  SolveStats stats;
};

// Closed-form building blocks.

/// Componentwise soft threshold sign(z) max(|z| - gamma, 0).
Vec prox_l1(const Vec& z, double gamma);
/// Groupwise projection onto the balls {||z_i|| <= omega_i}.
Vec project_group_balls(const Vec& y, const GroupStructure& g, const Vec& omega);
/// argmin_eta L_sigma(eta, xi, zeta; x) with (xi, zeta) taken from `state`.
Vec eta_update(const DualState& state, const SubproblemSpec& spec);

/// L_sigma(eta, xi, zeta; x) including the indicator of Lambda.
double augmented_lagrangian(const DualState& state, const SubproblemSpec& spec);

/// Phi(xi) = min_zeta L_sigma(eta, xi, zeta; x) up to the constant
/// -||x||^2/(2 sigma); `state` supplies x and sigma.
double phi_kj_value(const Vec& xi, const Vec& eta, const DualState& state,
                    const SubproblemSpec& spec);
Vec phi_kj_grad(const Vec& xi, const Vec& eta, const DualState& state,
                const SubproblemSpec& spec);

/// Element of the Clarke Jacobian of the projection onto {||z|| <= omega}
/// at y: I inside or on the sphere, omega (I/||y|| - y y^T/||y||^3) outside.
Mat clarke_block(const Vec& y, double omega);

/// (I + sigma A (I - W) A^T) d with W from clarke_block at
/// y = A^T xi + eta + x/sigma.
Vec gen_hessian_apply(const Vec& d, const Vec& xi, const Vec& eta,
                      const DualState& state, const SubproblemSpec& spec);

/// Semismooth Newton-CG for grad Phi(xi) = 0, started from state.xi.
/// Throws SolverStall when the Armijo search fails.
SncgResult sncg_solve(const Vec& eta, const DualState& state,
                      const SubproblemSpec& spec, const SncgConfig& cfg);

/// Accelerated block coordinate descent on L_sigma(.; state.x). `tol` is the
/// ALM tolerance driving the inner stopping rule.
AbcdResult abcd_solve(const DualState& state, const SubproblemSpec& spec,
                      const AlmConfig& cfg, double tol);

struct AlmStep {
  DualState state;
  OuterRecord record;
  std::vector<bool> inside;
  Vec x;
};

/// One outer ALM iteration at state.sigma: ABCD to inner tolerance `inner_tol`
/// (cfg.tol when <= 0), then the multiplier update x+ = x + sigma (A^T xi + eta - zeta).
/// sigma is left unchanged.
AlmStep alm_step(const DualState& state, const SubproblemSpec& spec, const AlmConfig& cfg,
                 double inner_tol = 0.0);

/// Inexact ALM on the dual. Returns the primal solution, the final dual
/// state and per-outer diagnostics.
AlmResult alm_solve(const SubproblemSpec& spec, const AlmConfig& cfg,
                    const std::optional<DualState>& warm = std::nullopt);

/// (1/2n)||Ax-b||^2 + (1/n) sum_i omega_i ||x_i||; +inf outside the box.
double primal_objective(const Vec& x, const SubproblemSpec& spec);
/// n * primal_objective: the objective value of the subproblem itself.
double subproblem_objective(const Vec& x, const SubproblemSpec& spec);
/// 1/2||xi||^2 + <b,xi> + R||eta||_1; +inf when zeta leaves Lambda.
double dual_objective(const DualState& state, const SubproblemSpec& spec);
/// subproblem_objective(x) + dual_objective(state), evaluated as
/// <x, A^T xi> + sum omega_i ||x_i|| + R||eta||_1 + 1/2||xi - (Ax - b)||^2
/// which avoids cancelling terms of size ||b||^2.
double primal_dual_sum(const Vec& x, const DualState& state, const SubproblemSpec& spec);

}  // namespace gsr
