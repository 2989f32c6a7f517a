#include "gsr/wl21.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gsr/errors.hpp"

namespace gsr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Projection of y onto Lambda together with the group norms of y.
struct Projection {
  Vec proj;
  Vec norms;
};

Projection project_with_norms(const Vec& y, const GroupStructure& g, const Vec& omega) {
  Projection out{y, Vec(g.num_groups())};
  for (Index i = 0; i < g.num_groups(); ++i) {
    double ss = 0.0;
    for (Index j : g.group(i)) ss += y[j] * y[j];
    const double nrm = std::sqrt(ss);
    out.norms[i] = nrm;
    if (omega[i] == 0.0) {
      for (Index j : g.group(i)) out.proj[j] = 0.0;
    } else if (nrm > omega[i]) {
      const double scale = omega[i] / nrm;
      for (Index j : g.group(i)) out.proj[j] = scale * y[j];
    }
  }
  return out;
}

// Groups where the generalized Jacobian block differs from the identity,
// i.e. where I - W is nonzero.
bool curved(double norm, double omega) { return omega == 0.0 || norm > omega; }

// State of the reduced function Phi at one xi.
struct NewtonPoint {
  Vec xi;
  Vec at_xi;
  Vec y;  // A^T xi + eta + x/sigma
  Projection pr;
  Vec grad;
  double value = 0.0;
};

class ReducedFunction {
 public:
  ReducedFunction(const Vec& eta, const DualState& st, const SubproblemSpec& spec)
      : spec_(spec), sigma_(st.sigma) {
    shift_ = eta + st.x / st.sigma;
    eta_l1_ = eta.lpNorm<1>();
  }

  NewtonPoint at(const Vec& xi) const { return at(xi, spec_.design->apply_transpose(xi)); }

  NewtonPoint at(const Vec& xi, const Vec& at_xi) const {
    NewtonPoint pt;
    pt.xi = xi;
    pt.at_xi = at_xi;
    pt.y = at_xi + shift_;
    pt.pr = project_with_norms(pt.y, spec_.groups, spec_.omega);
    const Vec resid = pt.y - pt.pr.proj;
    pt.grad = spec_.b + xi + sigma_ * spec_.design->apply(resid);
    pt.value = 0.5 * sigma_ * resid.squaredNorm() + 0.5 * xi.squaredNorm() +
               spec_.b.dot(xi) + spec_.box.radius * eta_l1_;
    return pt;
  }

  // Phi(xi + alpha d) - Phi(xi), evaluated from per-group norm changes so that
  // the Armijo test stays meaningful when the decrease is tiny relative to Phi.
  double change(const NewtonPoint& pt, const Vec& d, const Vec& at_d, double alpha) const {
    const GroupStructure& g = spec_.groups;
    double quad = 0.0;
    for (Index i = 0; i < g.num_groups(); ++i) {
      const double w = spec_.omega[i];
      double yv = 0.0, vv = 0.0, ss_new = 0.0;
      for (Index j : g.group(i)) {
        const double yj = pt.y[j], vj = alpha * at_d[j];
        yv += yj * vj;
        vv += vj * vj;
        ss_new += (yj + vj) * (yj + vj);
      }
      const double n_old = pt.pr.norms[i];
      const double n_new = std::sqrt(ss_new);
      const double s_old = std::max(n_old - w, 0.0);
      const double s_new = std::max(n_new - w, 0.0);
      if (s_old == 0.0 && s_new == 0.0) continue;
      double ds;
      if (n_old > w && n_new > w && n_old + n_new > 0.0)
        ds = (2.0 * yv + vv) / (n_old + n_new);
      else
        ds = s_new - s_old;
      quad += ds * (s_new + s_old);
    }
    return alpha * (pt.xi + spec_.b).dot(d) + 0.5 * alpha * alpha * d.squaredNorm() +
           0.5 * sigma_ * quad;
  }

  // Cached pieces of the generalized Hessian at one point.
  struct Hessian {
    std::vector<Index> groups;
    std::vector<double> c;   // omega/||y|| (0 when omega = 0)
    std::vector<Vec> unit;   // y_i/||y_i||
  };

  Hessian hessian_at(const NewtonPoint& pt) const {
    Hessian h;
    const GroupStructure& g = spec_.groups;
    for (Index i = 0; i < g.num_groups(); ++i) {
      const double nrm = pt.pr.norms[i];
      if (!curved(nrm, spec_.omega[i])) continue;
      h.groups.push_back(i);
      if (spec_.omega[i] == 0.0 || nrm == 0.0) {
        h.c.push_back(0.0);
        h.unit.emplace_back();
      } else {
        h.c.push_back(spec_.omega[i] / nrm);
        h.unit.push_back(g.gather(pt.y, i) / nrm);
      }
    }
    return h;
  }

  Vec hessian_apply(const Hessian& h, const Vec& d) const {
    Vec out = d;
    const GroupStructure& g = spec_.groups;
    for (std::size_t k = 0; k < h.groups.size(); ++k) {
      const IndexList& cols = g.group(h.groups[k]);
      Vec v = spec_.design->apply_transpose_columns(cols, d);
      const double c = h.c[k];
      if (c > 0.0) {
        const double proj = h.unit[k].dot(v);
        v = (1.0 - c) * v + (c * proj) * h.unit[k];
      }
      spec_.design->add_apply_columns(cols, sigma_ * v, out);
    }
    return out;
  }

 private:
  const SubproblemSpec& spec_;
  double sigma_;
  Vec shift_;
  double eta_l1_ = 0.0;
};

double lagrangian_value(const Vec& eta, const Vec& xi, const Vec& zeta, const Vec& x,
                        double sigma, const SubproblemSpec& spec, const Vec& at_xi) {
  const GroupStructure& g = spec.groups;
  for (Index i = 0; i < g.num_groups(); ++i) {
    double ss = 0.0;
    for (Index j : g.group(i)) ss += zeta[j] * zeta[j];
    if (std::sqrt(ss) > spec.omega[i] * (1.0 + 1e-12) + 1e-300) return kInf;
  }
  const Vec r = at_xi + eta - zeta;
  return 0.5 * xi.squaredNorm() + spec.b.dot(xi) + spec.box.radius * eta.lpNorm<1>() +
         x.dot(r) + 0.5 * sigma * r.squaredNorm();
}

}  // namespace

void SubproblemSpec::validate() const {
  if (!design) throw std::invalid_argument("SubproblemSpec: design is null");
  if (b.size() != design->rows())
    throw std::invalid_argument("SubproblemSpec: b does not match design rows");
  if (groups.dim() != design->cols())
    throw std::invalid_argument("SubproblemSpec: groups do not match design columns");
  if (omega.size() != groups.num_groups())
    throw std::invalid_argument("SubproblemSpec: omega needs one weight per group");
  if ((omega.array() < 0.0).any() || !omega.allFinite())
    throw std::invalid_argument("SubproblemSpec: omega must be finite and nonnegative");
}

DualState DualState::zeros(Index n, Index p, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("DualState: sigma must be > 0");
  return {Vec::Zero(p), Vec::Zero(n), Vec::Zero(p), Vec::Zero(p), sigma};
}

void SncgConfig::validate() const {
  auto open01 = [](double v) { return v > 0.0 && v < 1.0; };
  if (!open01(theta_bar) || !open01(tau) || !open01(delta))
    throw std::invalid_argument("SncgConfig: theta_bar, tau, delta must lie in (0,1)");
  if (!(mu > 0.0 && mu < 0.5)) throw std::invalid_argument("SncgConfig: mu must lie in (0,1/2)");
  if (cg_max <= 0 || max_iter <= 0 || max_backtracks <= 0)
    throw std::invalid_argument("SncgConfig: iteration caps must be positive");
  if (!(grad_tol > 0.0)) throw std::invalid_argument("SncgConfig: grad_tol must be > 0");
}

void AlmConfig::validate() const {
  if (!(sigma0 > 0.0)) throw std::invalid_argument("AlmConfig: sigma0 must be > 0");
  if (!(sigma_growth >= 1.0)) throw std::invalid_argument("AlmConfig: sigma_growth must be >= 1");
  if (!(sigma_max >= sigma0)) throw std::invalid_argument("AlmConfig: sigma_max must be >= sigma0");
  if (!(tol > 0.0)) throw std::invalid_argument("AlmConfig: tol must be > 0");
  if (!(abcd.pinf_factor > 0.0 && abcd.pinf_factor <= 1.0))
    throw std::invalid_argument("AlmConfig: abcd.pinf_factor must lie in (0,1]");
  if (!(inner_tighten > 0.0 && inner_tighten <= 1.0) ||
      !(inner_floor_factor > 0.0 && inner_floor_factor <= 1.0))
    throw std::invalid_argument("AlmConfig: inner_tighten and inner_floor_factor must lie in (0,1]");
  if (max_outer <= 0 || abcd.max_iter <= 0)
    throw std::invalid_argument("AlmConfig: iteration caps must be positive");
  sncg.validate();
}

nlohmann::json AlmConfig::to_json() const {
  return {{"sigma0", sigma0},
          {"sigma_growth", sigma_growth},
          {"sigma_max", sigma_max},
          {"tol", tol},
          {"max_outer", max_outer},
          {"sncg_rel_tol", sncg_rel_tol},
          {"inner_tighten", inner_tighten},
          {"inner_floor_factor", inner_floor_factor},
          {"abcd",
           {{"max_iter", abcd.max_iter},
            {"decrease_factor", abcd.decrease_factor},
            {"reset_on_increase", abcd.reset_on_increase},
            {"pinf_factor", abcd.pinf_factor}}},
          {"sncg",
           {{"theta_bar", sncg.theta_bar},
            {"tau", sncg.tau},
            {"delta", sncg.delta},
            {"mu", sncg.mu},
            {"cg_max", sncg.cg_max},
            {"max_iter", sncg.max_iter},
            {"max_backtracks", sncg.max_backtracks}}}};
}

AlmConfig AlmConfig::from_json(const nlohmann::json& j) {
  AlmConfig c;
  auto get = [&](const nlohmann::json& o, const char* key, auto& dst) {
    if (o.contains(key)) dst = o.at(key).get<std::decay_t<decltype(dst)>>();
  };
  get(j, "sigma0", c.sigma0);
  get(j, "sigma_growth", c.sigma_growth);
  get(j, "sigma_max", c.sigma_max);
  get(j, "tol", c.tol);
  get(j, "max_outer", c.max_outer);
  get(j, "sncg_rel_tol", c.sncg_rel_tol);
  get(j, "inner_tighten", c.inner_tighten);
  get(j, "inner_floor_factor", c.inner_floor_factor);
  if (j.contains("abcd")) {
    const auto& a = j.at("abcd");
    get(a, "max_iter", c.abcd.max_iter);
    get(a, "decrease_factor", c.abcd.decrease_factor);
    get(a, "reset_on_increase", c.abcd.reset_on_increase);
    get(a, "pinf_factor", c.abcd.pinf_factor);
  }
  if (j.contains("sncg")) {
    const auto& s = j.at("sncg");
    get(s, "theta_bar", c.sncg.theta_bar);
    get(s, "tau", c.sncg.tau);
    get(s, "delta", c.sncg.delta);
    get(s, "mu", c.sncg.mu);
    get(s, "cg_max", c.sncg.cg_max);
    get(s, "max_iter", c.sncg.max_iter);
    get(s, "max_backtracks", c.sncg.max_backtracks);
  }
  c.validate();
  return c;
}

nlohmann::json SolveStats::to_json() const {
  nlohmann::json outer_j = nlohmann::json::array();
  for (const auto& r : outer)
    outer_j.push_back({{"pinf", r.pinf},
                       {"dinf", r.dinf},
                       {"gap", r.gap},
                       {"sigma", r.sigma},
                       {"abcd_iters", r.abcd_iters},
                       {"sncg_iters", r.sncg_iters},
                       {"cg_iters", r.cg_iters}});
  return {{"outer_iterations", outer_iterations()},
          {"outer", std::move(outer_j)},
          {"wall_seconds", wall_seconds},
          {"converged", converged},
          {"stalled", stalled},
          {"message", message}};
}

Vec prox_l1(const Vec& z, double gamma) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("prox_l1: gamma must be >= 0");
  Vec out(z.size());
  for (Index j = 0; j < z.size(); ++j) {
    const double m = std::abs(z[j]) - gamma;
    out[j] = m > 0.0 ? std::copysign(m, z[j]) : 0.0;
  }
  return out;
}

Vec project_group_balls(const Vec& y, const GroupStructure& g, const Vec& omega) {
  if (y.size() != g.dim() || omega.size() != g.num_groups())
    throw std::invalid_argument("project_group_balls: dimension mismatch");
  if ((omega.array() < 0.0).any())
    throw std::invalid_argument("project_group_balls: omega must be nonnegative");
  return project_with_norms(y, g, omega).proj;
}

Vec eta_update(const DualState& state, const SubproblemSpec& spec) {
  if (!(state.sigma > 0.0)) throw std::invalid_argument("eta_update: sigma must be > 0");
  const Vec arg = state.zeta - spec.design->apply_transpose(state.xi) - state.x / state.sigma;
  return prox_l1(arg, spec.box.radius / state.sigma);
}

double augmented_lagrangian(const DualState& s, const SubproblemSpec& spec) {
  return lagrangian_value(s.eta, s.xi, s.zeta, s.x, s.sigma, spec,
                          spec.design->apply_transpose(s.xi));
}

double phi_kj_value(const Vec& xi, const Vec& eta, const DualState& state,
                    const SubproblemSpec& spec) {
  return ReducedFunction(eta, state, spec).at(xi).value;
}

Vec phi_kj_grad(const Vec& xi, const Vec& eta, const DualState& state,
                const SubproblemSpec& spec) {
  return ReducedFunction(eta, state, spec).at(xi).grad;
}

Mat clarke_block(const Vec& y, double omega) {
  if (omega < 0.0) throw std::invalid_argument("clarke_block: omega must be >= 0");
  const Index d = y.size();
  if (omega == 0.0) return Mat::Zero(d, d);
  const double nrm = y.norm();
  if (nrm <= omega) return Mat::Identity(d, d);
  return omega * (Mat::Identity(d, d) / nrm - (y * y.transpose()) / (nrm * nrm * nrm));
}

Vec gen_hessian_apply(const Vec& d, const Vec& xi, const Vec& eta, const DualState& state,
                      const SubproblemSpec& spec) {
  if (d.size() != spec.n()) throw std::invalid_argument("gen_hessian_apply: d must have n entries");
  ReducedFunction fn(eta, state, spec);
  const NewtonPoint pt = fn.at(xi);
  return fn.hessian_apply(fn.hessian_at(pt), d);
}

SncgResult sncg_solve(const Vec& eta, const DualState& state, const SubproblemSpec& spec,
                      const SncgConfig& cfg) {
  ReducedFunction fn(eta, state, spec);
  SncgResult res;
  NewtonPoint pt = fn.at(state.xi);
  for (;;) {
    const double gnorm = pt.grad.norm();
    res.stats.grad_norm = gnorm;
    if (gnorm <= cfg.grad_tol || res.stats.iterations >= cfg.max_iter) break;

    // Inexact Newton direction by CG on V d = -grad.
    const auto hess = fn.hessian_at(pt);
    const double cg_tol = std::min(cfg.theta_bar, std::pow(gnorm, 1.0 + cfg.tau));
    Vec d = Vec::Zero(pt.grad.size());
    Vec r = -pt.grad;
    Vec p = r;
    double rr = r.squaredNorm();
    bool breakdown = false;
    for (int it = 0; it < cfg.cg_max; ++it) {
      if (std::sqrt(rr) <= cg_tol) break;
      const Vec vp = fn.hessian_apply(hess, p);
      const double pvp = p.dot(vp);
      ++res.stats.cg_iterations;
      if (!(pvp > 0.0)) {
        breakdown = true;
        break;
      }
      const double alpha = rr / pvp;
      d.noalias() += alpha * p;
      r.noalias() -= alpha * vp;
      const double rr_new = r.squaredNorm();
      p = r + (rr_new / rr) * p;
      rr = rr_new;
    }
    double slope = pt.grad.dot(d);
    if (breakdown || !(slope < 0.0)) {
      d = -pt.grad;
      slope = -gnorm * gnorm;
      ++res.stats.steepest_fallbacks;
    }

    const Vec at_d = spec.design->apply_transpose(d);
    double step = 1.0;
    int m = 0;
    for (;; ++m) {
      if (m >= cfg.max_backtracks) {
        nlohmann::json diag = {{"grad_norm", gnorm},
                               {"slope", slope},
                               {"newton_iteration", res.stats.iterations},
                               {"sigma", state.sigma}};
        throw SolverStall("sncg_solve: Armijo line search failed after " +
                              std::to_string(cfg.max_backtracks) + " backtracks",
                          diag.dump());
      }
      const double dphi = fn.change(pt, d, at_d, step);
      if (dphi <= cfg.mu * step * slope) {
        res.stats.line_searches.push_back({step, slope, dphi, m});
        break;
      }
      step *= cfg.delta;
    }
    res.stats.backtracks += m;
    pt = fn.at(pt.xi + step * d, pt.at_xi + step * at_d);
    ++res.stats.iterations;
  }
  res.xi = std::move(pt.xi);
  return res;
}

AbcdResult abcd_solve(const DualState& state, const SubproblemSpec& spec, const AlmConfig& cfg,
                      double tol) {
  const double sigma = state.sigma;
  const double bscale = 1.0 + spec.b.norm();
  SncgConfig sncg = cfg.sncg;
  sncg.grad_tol = std::max(cfg.sncg_rel_tol * tol * (1.0 + state.xi.norm()), 1e-12 * bscale);

  AbcdResult out;
  out.state = state;
  Vec xi_prev = state.xi, zeta_prev = state.zeta;
  Vec xi_t = state.xi, zeta_t = state.zeta;
  double t = 1.0;
  double l_prev = augmented_lagrangian(state, spec);

  for (int k = 1; k <= cfg.abcd.max_iter; ++k) {
    DualState probe = state;
    probe.xi = xi_t;
    probe.zeta = zeta_t;
    const Vec eta = eta_update(probe, spec);

    const SncgResult nr = sncg_solve(eta, probe, spec, sncg);
    const Vec at_xi = spec.design->apply_transpose(nr.xi);
    const Vec y = at_xi + eta + state.x / sigma;
    const Projection pr = project_with_norms(y, spec.groups, spec.omega);

    out.stats.iterations = k;
    out.stats.sncg_iterations += nr.stats.iterations;
    out.stats.cg_iterations += nr.stats.cg_iterations;
    out.stats.pinf = sigma * ((pr.proj - zeta_t) + spec.design->apply_transpose(xi_t - nr.xi)).norm() /
                     bscale;
    out.inside.assign(spec.groups.num_groups(), false);
    for (Index i = 0; i < spec.groups.num_groups(); ++i)
      out.inside[i] = !curved(pr.norms[i], spec.omega[i]);

    out.state.eta = eta;
    out.state.xi = nr.xi;
    out.state.zeta = pr.proj;
    const double l_new = lagrangian_value(eta, nr.xi, pr.proj, state.x, sigma, spec, at_xi);
    out.stats.lagrangian_trace.push_back(l_new);

    double beta_t = t;
    if (cfg.abcd.reset_on_increase && std::isfinite(l_prev) && l_new > l_prev) {
      beta_t = 1.0;
      ++out.stats.momentum_resets;
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * beta_t * beta_t));
    const double beta = (beta_t - 1.0) / t_next;
    xi_t = nr.xi + beta * (nr.xi - xi_prev);
    zeta_t = pr.proj + beta * (pr.proj - zeta_prev);
    xi_prev = nr.xi;
    zeta_prev = pr.proj;
    t = t_next;

    const bool small = std::isfinite(l_prev) &&
                       std::abs(l_prev - l_new) / std::max(1.0, std::abs(l_new)) <=
                           cfg.abcd.decrease_factor * tol &&
                       out.stats.pinf <= cfg.abcd.pinf_factor * tol;
    l_prev = l_new;
    if (small) break;
  }
  return out;
}

double subproblem_objective(const Vec& x, const SubproblemSpec& spec) {
  if ((x.array().abs() > spec.box.radius).any()) return kInf;
  const Vec r = spec.design->apply(x) - spec.b;
  return 0.5 * r.squaredNorm() + l21_norm(x, spec.groups, spec.omega);
}

double primal_objective(const Vec& x, const SubproblemSpec& spec) {
  return subproblem_objective(x, spec) / static_cast<double>(spec.n());
}

double dual_objective(const DualState& state, const SubproblemSpec& spec) {
  const Vec zn = group_norms(state.zeta, spec.groups);
  for (Index i = 0; i < zn.size(); ++i)
    if (zn[i] > spec.omega[i] * (1.0 + 1e-12) + 1e-300) return kInf;
  return 0.5 * state.xi.squaredNorm() + spec.b.dot(state.xi) +
         spec.box.radius * state.eta.lpNorm<1>();
}

double primal_dual_sum(const Vec& x, const DualState& state, const SubproblemSpec& spec) {
  if (!std::isfinite(subproblem_objective(x, spec)) || !std::isfinite(dual_objective(state, spec)))
    return kInf;
  const Vec at_xi = spec.design->apply_transpose(state.xi);
  const Vec g = state.xi - (spec.design->apply(x) - spec.b);
  return x.dot(at_xi) + l21_norm(x, spec.groups, spec.omega) +
         spec.box.radius * state.eta.lpNorm<1>() + 0.5 * g.squaredNorm();
}

namespace {
Vec recover_primal(const DualState& st, const std::vector<bool>& inside,
                   const SubproblemSpec& spec) {
  Vec xp = -st.x;
  for (Index i = 0; i < spec.groups.num_groups(); ++i)
    if (inside[i])
      for (Index j : spec.groups.group(i)) xp[j] = 0.0;
  return project_box(xp, spec.box);
}
}  // namespace

AlmStep alm_step(const DualState& state, const SubproblemSpec& spec, const AlmConfig& cfg,
                 double inner_tol) {
  const double sigma = state.sigma;
  AbcdResult ab = abcd_solve(state, spec, cfg, inner_tol > 0.0 ? inner_tol : cfg.tol);
  AlmStep out;
  out.state = std::move(ab.state);
  out.state.sigma = sigma;
  const Vec r =
      spec.design->apply_transpose(out.state.xi) + out.state.eta - out.state.zeta;
  out.state.x = state.x + sigma * r;

  OuterRecord& rec = out.record;
  rec.sigma = sigma;
  rec.pinf = ab.stats.pinf;
  rec.dinf = (out.state.x - state.x).norm() / sigma;
  out.inside = std::move(ab.inside);
  out.x = recover_primal(out.state, out.inside, spec);
  const double pobj = subproblem_objective(out.x, spec);
  rec.gap = std::abs(primal_dual_sum(out.x, out.state, spec)) / (1.0 + std::abs(pobj));
  rec.abcd_iters = ab.stats.iterations;
  rec.sncg_iters = ab.stats.sncg_iterations;
  rec.cg_iters = ab.stats.cg_iterations;
  return out;
}

AlmResult alm_solve(const SubproblemSpec& spec, const AlmConfig& cfg,
                    const std::optional<DualState>& warm) {
  spec.validate();
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const Index n = spec.n(), p = spec.p();

  DualState state = warm ? *warm : DualState::zeros(n, p, cfg.sigma0);
  if (state.xi.size() != n || state.x.size() != p || state.eta.size() != p ||
      state.zeta.size() != p)
    throw std::invalid_argument("alm_solve: warm start has wrong dimensions");
  if (!(state.sigma > 0.0)) state.sigma = cfg.sigma0;

  AlmResult res;
  std::vector<bool> inside(spec.groups.num_groups(), false);
  Vec x = recover_primal(state, inside, spec);
  double inner = cfg.tol;
  for (int j = 0; j < cfg.max_outer; ++j) {
    AlmStep st;
    try {
      st = alm_step(state, spec, cfg, inner);
    } catch (const SolverStall& e) {
      res.stats.stalled = true;
      res.stats.message = std::string(e.what()) + " " + e.diagnostics();
      break;
    }
    res.stats.outer.push_back(st.record);
    state = std::move(st.state);
    inside = std::move(st.inside);
    x = std::move(st.x);
    const OuterRecord& rec = res.stats.outer.back();
    if (std::max({rec.pinf, rec.dinf, rec.gap}) <= cfg.tol) {
      res.stats.converged = true;
      break;
    }
    // Feasible but the gap is stuck: the inexact inner solve is what limits it.
    if (std::max(rec.pinf, rec.dinf) <= cfg.tol)
      inner = std::max(inner * cfg.inner_tighten, cfg.tol * cfg.inner_floor_factor);
    state.sigma = std::min(cfg.sigma_growth * state.sigma, cfg.sigma_max);
  }
  if (!res.stats.converged && res.stats.message.empty())
    res.stats.message = "maximum outer iterations reached";

  res.x = std::move(x);
  res.state = std::move(state);
  res.stats.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return res;
}

}  // namespace gsr
