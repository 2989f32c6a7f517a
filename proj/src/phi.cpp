#include "gsr/phi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gsr {

namespace {

double pos(double v) { return v > 0.0 ? v : 0.0; }

// Unnormalized varphi and its derivative.

double scad_raw(double a, double t) { return 0.5 * (a - 1.0) * t * t + t; }

// Centered form; equals a^2/4 t^2 + (a - a^2/2) t + (a-2)_+^2/4 and vanishes
// exactly at (a-2)/a when a >= 2.
double mcp_raw(double a, double t) {
  const double c = t - (a - 2.0) / a;
  return 0.25 * a * a * c * c + 0.25 * (pos(a - 2.0) * pos(a - 2.0) - (a - 2.0) * (a - 2.0));
}

// -(t - eps) - (q-1)/q ((1-t+eps)^{q/(q-1)} - 1); vanishes exactly at t = eps.
double lq_raw(double q, double eps, double t) {
  const double r = q / (q - 1.0);
  const double base = 1.0 - t + eps;
  if (base == 0.0) return std::numeric_limits<double>::infinity();
  return -(t - eps) - (q - 1.0) / q * (std::pow(base, r) - 1.0);
}

double lq_raw_derivative(double q, double eps, double t) {
  return -1.0 + std::pow(1.0 - t + eps, 1.0 / (q - 1.0));
}

}  // namespace

std::string to_string(PhiFamily f) {
  switch (f) {
    case PhiFamily::Scad: return "scad";
    case PhiFamily::Mcp: return "mcp";
    case PhiFamily::CappedL1: return "capped_l1";
    case PhiFamily::Lq: return "lq";
  }
  return "unknown";
}

PhiFamily phi_family_from_string(const std::string& s) {
  if (s == "scad") return PhiFamily::Scad;
  if (s == "mcp") return PhiFamily::Mcp;
  if (s == "capped_l1") return PhiFamily::CappedL1;
  if (s == "lq") return PhiFamily::Lq;
  throw std::invalid_argument("unknown phi family '" + s + "'");
}

void PhiSpec::validate() const {
  switch (family) {
    case PhiFamily::Scad:
      if (!(a > 1.0)) throw std::invalid_argument("SCAD requires a > 1");
      break;
    case PhiFamily::Mcp:
      if (!(a > 0.0)) throw std::invalid_argument("MCP requires a > 0");
      break;
    case PhiFamily::CappedL1:
      break;
    case PhiFamily::Lq:
      if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("LQ requires 0 < q < 1");
      if (!(eps > 0.0 && eps < 0.1)) throw std::invalid_argument("LQ requires 0 < eps < 0.1");
      break;
  }
}

nlohmann::json PhiSpec::to_json() const {
  return {{"family", to_string(family)}, {"a", a}, {"q", q}, {"eps", eps}};
}

PhiSpec PhiSpec::from_json(const nlohmann::json& j) {
  PhiSpec s;
  s.family = phi_family_from_string(j.at("family").get<std::string>());
  if (s.family == PhiFamily::Mcp) s.a = 3.0;
  if (j.contains("a")) s.a = j.at("a").get<double>();
  if (j.contains("q")) s.q = j.at("q").get<double>();
  if (j.contains("eps")) s.eps = j.at("eps").get<double>();
  s.validate();
  return s;
}

double phi_normalizer(const PhiSpec& spec) {
  spec.validate();
  switch (spec.family) {
    case PhiFamily::Scad: return scad_raw(spec.a, 1.0);
    case PhiFamily::Mcp: return mcp_raw(spec.a, 1.0);
    case PhiFamily::CappedL1: return 1.0;
    case PhiFamily::Lq: return lq_raw(spec.q, spec.eps, 1.0);
  }
  return 1.0;
}

double phi_eval(const PhiSpec& spec, double t) {
  const double v1 = phi_normalizer(spec);
  switch (spec.family) {
    case PhiFamily::Scad: return scad_raw(spec.a, t) / v1;
    case PhiFamily::Mcp: return mcp_raw(spec.a, t) / v1;
    case PhiFamily::CappedL1: return t;
    case PhiFamily::Lq:
      if (t > 1.0 + spec.eps)
        throw std::domain_error("phi_eval: LQ penalty is defined only for t <= 1 + eps");
      return lq_raw(spec.q, spec.eps, t) / v1;
  }
  return 0.0;
}

double phi_derivative(const PhiSpec& spec, double t) {
  const double v1 = phi_normalizer(spec);
  const double a = spec.a;
  switch (spec.family) {
    case PhiFamily::Scad: return ((a - 1.0) * t + 1.0) / v1;
    case PhiFamily::Mcp: return (0.5 * a * a * t + a - 0.5 * a * a) / v1;
    case PhiFamily::CappedL1: return 1.0;
    case PhiFamily::Lq:
      if (t >= 1.0 + spec.eps)
        throw std::domain_error("phi_derivative: LQ penalty is defined only for t < 1 + eps");
      return lq_raw_derivative(spec.q, spec.eps, t) / v1;
  }
  return 0.0;
}

PhiConstants phi_constants(const PhiSpec& spec) {
  spec.validate();
  const double a = spec.a;
  PhiConstants c;
  switch (spec.family) {
    case PhiFamily::Scad:
      c.t_star = 0.0;
      c.t_bar = 0.5;
      break;
    case PhiFamily::Mcp:
      c.t_star = pos(a - 2.0) / a;
      c.t_bar = std::max((a - 1.0) / a, 0.5);
      break;
    case PhiFamily::CappedL1:
      c.t_star = 0.0;
      c.t_bar = 0.0;
      break;
    case PhiFamily::Lq: {
      const double q = spec.q, eps = spec.eps;
      const double v1 = phi_normalizer(spec);
      c.t_star = eps;
      c.t_bar = 1.0 + eps - std::pow((1.0 - eps) / (1.0 - eps + v1), 1.0 - q);
      break;
    }
  }
  c.phi_prime_minus_1 = phi_derivative(spec, 1.0);
  c.phi_prime_plus_tbar = phi_derivative(spec, c.t_bar);
  return c;
}

double psi_star_eval(const PhiSpec& spec, double s) {
  const double v1 = phi_normalizer(spec);
  const double a = spec.a;
  switch (spec.family) {
    case PhiFamily::Scad: {
      if (s <= 1.0 / v1) return 0.0;
      if (s <= a / v1) {
        const double u = v1 * s - 1.0;
        return u * u / (2.0 * (a - 1.0) * v1);
      }
      return s - 1.0;
    }
    case PhiFamily::Mcp: {
      const double k = 0.25 * pos(a - 2.0) * pos(a - 2.0);
      if (s <= (a - 0.5 * a * a) / v1) return -k / v1;
      if (s <= a / v1) {
        const double u = 0.5 * (a * a - 2.0 * a) + v1 * s;
        return u * u / (a * a * v1) - k / v1;
      }
      return s - 1.0;
    }
    case PhiFamily::CappedL1:
      return s > 1.0 ? s - 1.0 : 0.0;
    case PhiFamily::Lq: {
      const double q = spec.q, eps = spec.eps;
      const double u = v1 * s;
      const double lower = std::pow(1.0 + eps, 1.0 / (q - 1.0)) - 1.0;
      const double upper = std::pow(eps, 1.0 / (q - 1.0)) - 1.0;
      double h;
      if (u > upper) {
        h = u - v1;  // t = 1
      } else if (u > lower) {
        h = (1.0 + eps) * u - std::pow(u + 1.0, q) / q + 1.0 / q;
      } else {
        h = -lq_raw(q, eps, 0.0);  // t = 0
      }
      return h / v1;
    }
  }
  return 0.0;
}

double weight_from_subgradient(const PhiSpec& spec, double s) {
  if (s < 0.0) throw std::invalid_argument("weight_from_subgradient: s must be >= 0");
  const double v1 = phi_normalizer(spec);
  const double a = spec.a;
  double t = 0.0;
  switch (spec.family) {
    case PhiFamily::Scad:
      t = (v1 * s - 1.0) / (a - 1.0);
      break;
    case PhiFamily::Mcp:
      t = (v1 * s - a + 0.5 * a * a) / (0.5 * a * a);
      break;
    case PhiFamily::CappedL1:
      // subdifferential is [0,1] at s = 1; take its smallest element
      t = s > 1.0 ? 1.0 : 0.0;
      break;
    case PhiFamily::Lq:
      t = 1.0 + spec.eps - std::pow(v1 * s + 1.0, spec.q - 1.0);
      break;
  }
  return std::clamp(t, 0.0, 1.0);
}

double theta_eval(const PhiSpec& spec, double s) {
  if (s < 0.0) throw std::invalid_argument("theta_eval: s must be >= 0");
  return s - psi_star_eval(spec, s);
}

double rho_lower_bound(const PhiSpec& spec, double nu, double lip) {
  if (!(nu > 0.0)) throw std::invalid_argument("rho_lower_bound: nu must be > 0");
  if (!(lip > 0.0)) throw std::invalid_argument("rho_lower_bound: L_f must be > 0");
  const PhiConstants c = phi_constants(spec);
  return nu * lip * (1.0 - c.t_star) * c.phi_prime_minus_1 / (1.0 - c.t_bar);
}

double lipschitz_estimate(const DesignOperator& a, const Vec& b,
                          const BoxConstraint& box) {
  if (b.size() != a.rows())
    throw std::invalid_argument("lipschitz_estimate: b does not match design rows");
  const double n = static_cast<double>(a.rows());
  const double p = static_cast<double>(a.cols());
  const double s = spectral_norm(a, 1e-6);
  return box.radius * std::sqrt(p) / n * s * s + a.apply_transpose(b).norm() / n;
}

}  // namespace gsr
