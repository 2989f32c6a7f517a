#include "gsr/mscra.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gsr/errors.hpp"
#include "gsr/json_util.hpp"

namespace gsr {

void MscraProblem::validate() const {
  if (!design) throw std::invalid_argument("MscraProblem: design is null");
  if (b.size() != design->rows())
    throw std::invalid_argument("MscraProblem: b does not match design rows");
  if (groups.dim() != design->cols())
    throw std::invalid_argument("MscraProblem: groups do not match design columns");
}

std::string to_string(RhoMode m) { return m == RhoMode::Dynamic ? "dynamic" : "static"; }

RhoMode rho_mode_from_string(const std::string& s) {
  if (s == "dynamic") return RhoMode::Dynamic;
  if (s == "static") return RhoMode::Static;
  throw std::invalid_argument("unknown rho mode '" + s + "'");
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::Equilibrium: return "equilibrium";
    case StopReason::LossStall: return "loss_stall";
    case StopReason::MaxStages: return "max_stages";
    case StopReason::Degenerate: return "degenerate";
  }
  return "unknown";
}

void MscraConfig::validate() const {
  phi.validate();
  if (nu && !(*nu > 0.0 && std::isfinite(*nu)))
    throw std::invalid_argument("MscraConfig: nu must be positive and finite");
  if (!(nu_scale > 0.0)) throw std::invalid_argument("MscraConfig: nu_scale must be > 0");
  if (!(rho_cap_numerator > 0.0))
    throw std::invalid_argument("MscraConfig: rho_cap_numerator must be > 0");
  if (!(eps_gap >= 0.0) || !(eps_loss >= 0.0))
    throw std::invalid_argument("MscraConfig: eps_gap and eps_loss must be >= 0");
  if (max_stages < 1) throw std::invalid_argument("MscraConfig: max_stages must be >= 1");
  if (!(tolerance.initial_factor > 0.0) || !(tolerance.decay > 0.0 && tolerance.decay <= 1.0) ||
      !(tolerance.floor > 0.0))
    throw std::invalid_argument("MscraConfig: invalid tolerance schedule");
  if (static_rho && !(*static_rho > 0.0))
    throw std::invalid_argument("MscraConfig: static_rho must be > 0");
  alm.validate();
}

double MscraConfig::resolve_nu(const MscraProblem& problem) const {
  if (nu) return *nu;
  const double atb = problem.design->apply_transpose(problem.b).lpNorm<Eigen::Infinity>();
  if (!(atb > 0.0))
    throw std::invalid_argument("MscraConfig: default nu needs A^T b != 0; set nu explicitly");
  return static_cast<double>(problem.n()) / (nu_scale * atb);
}

nlohmann::json MscraConfig::to_json() const {
  nlohmann::json j = {{"phi", phi.to_json()},
                      {"nu", nu ? nlohmann::json(*nu) : nlohmann::json(nullptr)},
                      {"nu_scale", nu_scale},
                      {"w0", vec_to_json(w0)},
                      {"rho_cap_numerator", rho_cap_numerator},
                      {"eps_gap", eps_gap},
                      {"eps_loss", eps_loss},
                      {"max_stages", max_stages},
                      {"tolerance",
                       {{"initial_factor", tolerance.initial_factor},
                        {"decay", tolerance.decay},
                        {"floor", tolerance.floor}}},
                      {"rho_mode", to_string(rho_mode)},
                      {"static_rho", static_rho ? nlohmann::json(*static_rho) : nlohmann::json(nullptr)},
                      {"warm_start", warm_start},
                      {"alm", alm.to_json()}};
  return j;
}

MscraConfig MscraConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("MscraConfig: expected a JSON object");
  MscraConfig c;
  auto get = [](const nlohmann::json& o, const char* key, auto& dst) {
    if (o.contains(key) && !o.at(key).is_null()) dst = o.at(key).get<std::decay_t<decltype(dst)>>();
  };
  if (j.contains("phi")) c.phi = PhiSpec::from_json(j.at("phi"));
  if (j.contains("nu") && !j.at("nu").is_null()) c.nu = j.at("nu").get<double>();
  get(j, "nu_scale", c.nu_scale);
  if (j.contains("w0") && !j.at("w0").is_null()) c.w0 = vec_from_json(j.at("w0"));
  get(j, "rho_cap_numerator", c.rho_cap_numerator);
  get(j, "eps_gap", c.eps_gap);
  get(j, "eps_loss", c.eps_loss);
  get(j, "max_stages", c.max_stages);
  if (j.contains("tolerance")) {
    const auto& t = j.at("tolerance");
    get(t, "initial_factor", c.tolerance.initial_factor);
    get(t, "decay", c.tolerance.decay);
    get(t, "floor", c.tolerance.floor);
  }
  if (j.contains("rho_mode")) c.rho_mode = rho_mode_from_string(j.at("rho_mode").get<std::string>());
  if (j.contains("static_rho") && !j.at("static_rho").is_null())
    c.static_rho = j.at("static_rho").get<double>();
  get(j, "warm_start", c.warm_start);
  if (j.contains("alm")) c.alm = AlmConfig::from_json(j.at("alm"));
  c.validate();
  return c;
}

nlohmann::json StageTrace::to_json(bool with_vectors) const {
  nlohmann::json j = {{"k", k},
                      {"rho", rho},
                      {"lambda", lambda},
                      {"lambda_used", lambda_used},
                      {"loss", loss},
                      {"eq_residual", eq_residual},
                      {"group_sparsity", group_sparsity},
                      {"tolerance", tolerance},
                      {"inner_stats", inner_stats.to_json()}};
  if (with_vectors) {
    j["x"] = vec_to_json(x);
    j["w"] = vec_to_json(w);
  }
  return j;
}

bool MscraResult::converged() const {
  if (traces.empty()) return false;
  const bool stopped = reason == StopReason::Equilibrium || reason == StopReason::LossStall;
  return stopped && traces.back().inner_stats.converged;
}

double loss_value(const Vec& x, const MscraProblem& problem) {
  const Vec r = problem.design->apply(x) - problem.b;
  return 0.5 * r.squaredNorm() / static_cast<double>(problem.n());
}

double gsparse_objective(const Vec& x, const MscraProblem& problem, double nu) {
  if ((x.array().abs() > problem.box.radius).any()) return std::numeric_limits<double>::infinity();
  return nu * loss_value(x, problem) + static_cast<double>(group_zero_norm(x, problem.groups));
}

double penalty_objective(const Vec& x, const Vec& w, double rho, double nu, const PhiSpec& phi,
                         const MscraProblem& problem) {
  double s = nu * loss_value(x, problem) + rho * equilibrium_residual(x, w, problem.groups);
  for (Index i = 0; i < w.size(); ++i) s += phi_eval(phi, w[i]);
  return s;
}

double rho_schedule(int k, const Vec& x_k, double rho_prev, const GroupStructure& g,
                    double cap_num) {
  if (k < 1) throw std::invalid_argument("rho_schedule: stage index starts at 1");
  const double gmax = group_norms(x_k, g).lpNorm<Eigen::Infinity>();
  if (!(gmax > 0.0)) throw DegenerateIterate("rho_schedule: iterate has no nonzero group");
  if (k == 1) return 2.0 / gmax;
  return std::min(2.0 * rho_prev, cap_num / gmax);
}

Vec weight_update(const Vec& x_k, double rho, const PhiSpec& phi, const GroupStructure& g) {
  if (!(rho > 0.0)) throw std::invalid_argument("weight_update: rho must be > 0");
  const Vec norms = group_norms(x_k, g);
  Vec w(norms.size());
  for (Index i = 0; i < norms.size(); ++i) w[i] = weight_from_subgradient(phi, rho * norms[i]);
  return w;
}

std::optional<StopReason> stopping_reason(const StageTrace& curr, const StageTrace* prev,
                                          const MscraConfig& cfg) {
  if (curr.eq_residual <= cfg.eps_gap) return StopReason::Equilibrium;
  if (prev) {
    const double rel = std::abs(curr.loss - prev->loss) / std::max(1.0, curr.loss);
    const auto ds = curr.group_sparsity > prev->group_sparsity
                        ? curr.group_sparsity - prev->group_sparsity
                        : prev->group_sparsity - curr.group_sparsity;
    if (rel <= cfg.eps_loss && ds <= 1) return StopReason::LossStall;
  }
  return std::nullopt;
}

bool stopping_check(const StageTrace& curr, const StageTrace* prev, const MscraConfig& cfg) {
  return stopping_reason(curr, prev, cfg).has_value();
}

double subproblem_tolerance(std::optional<double> prev, const MscraConfig& cfg) {
  const auto& t = cfg.tolerance;
  if (!prev) return std::max(t.floor, t.initial_factor * cfg.eps_loss);
  return std::max(t.floor, t.decay * *prev);
}

MscraResult run(const MscraProblem& problem, const MscraConfig& cfg) {
  problem.validate();
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Index m = problem.groups.num_groups();
  const double n = static_cast<double>(problem.n());

  MscraResult res;
  res.nu = cfg.resolve_nu(problem);
  res.lipschitz = lipschitz_estimate(*problem.design, problem.b, problem.box);
  res.rho_bar = rho_lower_bound(cfg.phi, res.nu, res.lipschitz);

  Vec w = cfg.w0.size() == 0 ? Vec::Zero(m) : cfg.w0;
  if (w.size() != m) throw std::invalid_argument("run: w0 needs one entry per group");
  const double t_bar = phi_constants(cfg.phi).t_bar;
  if ((w.array() < 0.0).any() || (w.array() > t_bar + 1e-15).any())
    throw std::invalid_argument("run: w0 must lie in [0, t_bar]");

  const double static_rho = cfg.static_rho.value_or(1.1 * res.rho_bar);
  double lambda = 1.0 / res.nu;
  double rho = 0.0;
  std::optional<double> tol;
  std::optional<DualState> warm;
  SubproblemSpec spec{problem.design, problem.b, problem.groups, Vec(), problem.box};
  res.x = Vec::Zero(problem.p());

  for (int k = 1; k <= cfg.max_stages; ++k) {
    tol = subproblem_tolerance(tol, cfg);
    spec.omega = n * lambda * (Vec::Ones(m) - w);
    AlmConfig alm = cfg.alm;
    alm.tol = *tol;
    AlmResult sub = alm_solve(spec, alm, cfg.warm_start ? warm : std::nullopt);
    if (!sub.stats.converged) res.all_inner_converged = false;

    StageTrace tr;
    tr.k = k;
    tr.x = sub.x;
    tr.lambda_used = lambda;
    tr.loss = loss_value(sub.x, problem);
    tr.eq_residual = equilibrium_residual(sub.x, w, problem.groups);
    tr.group_sparsity = approx_group_zero_norm(sub.x, problem.groups);
    tr.tolerance = *tol;
    tr.inner_stats = sub.stats;
    res.x = sub.x;
    warm = std::move(sub.state);

    bool degenerate = false;
    if (cfg.rho_mode == RhoMode::Dynamic) {
      try {
        rho = rho_schedule(k, tr.x, rho, problem.groups, cfg.rho_cap_numerator);
      } catch (const DegenerateIterate&) {
        degenerate = true;
      }
    } else {
      rho = static_rho;
    }
    if (degenerate) {
      tr.w = w;
      tr.rho = rho;
      tr.lambda = lambda;
      res.traces.push_back(std::move(tr));
      res.reason = StopReason::Degenerate;
      res.x.setZero();
      break;
    }
    lambda = rho / res.nu;
    w = weight_update(tr.x, rho, cfg.phi, problem.groups);
    tr.w = w;
    tr.rho = rho;
    tr.lambda = lambda;
    res.traces.push_back(std::move(tr));

    const StageTrace* prev = res.traces.size() >= 2 ? &res.traces[res.traces.size() - 2] : nullptr;
    if (auto why = stopping_reason(res.traces.back(), prev, cfg)) {
      res.reason = *why;
      break;
    }
    res.reason = StopReason::MaxStages;
  }
  res.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace gsr
