#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "gsr/design.hpp"
#include "gsr/groups.hpp"
#include "gsr/types.hpp"

namespace gsr {

enum class PhiFamily { Scad, Mcp, CappedL1, Lq };

std::string to_string(PhiFamily f);
PhiFamily phi_family_from_string(const std::string& s);

/// A normalized convex penalty phi = varphi / varphi(1) on [0,1]:
///   SCAD      varphi(t) = (a-1)/2 t^2 + t                      (a > 1)
///   MCP       varphi(t) = a^2/4 t^2 - a^2/2 t + a t + (a-2)_+^2/4  (a > 0)
///   CAPPED_L1 varphi(t) = t
///   LQ        varphi(t) = -t - (q-1)/q (1-t+eps)^{q/(q-1)} + eps + (q-1)/q
///             on t <= 1 + eps                       (0 < q < 1, 0 < eps < 0.1)
struct PhiSpec {
  PhiFamily family = PhiFamily::Scad;
  double a = 3.7;
  double q = 0.5;
  double eps = 1e-2;

  static PhiSpec scad(double a = 3.7) { return {PhiFamily::Scad, a, 0.5, 1e-2}; }
  static PhiSpec mcp(double a = 3.0) { return {PhiFamily::Mcp, a, 0.5, 1e-2}; }
  static PhiSpec capped_l1() { return {PhiFamily::CappedL1, 0.0, 0.5, 1e-2}; }
  static PhiSpec lq(double q = 0.5, double eps = 1e-2) { return {PhiFamily::Lq, 0.0, q, eps}; }

  /// Throws std::invalid_argument when the family's parameter ranges are violated.
  void validate() const;

  nlohmann::json to_json() const;
  static PhiSpec from_json(const nlohmann::json& j);
};

struct PhiConstants {
  double t_star = 0.0;               // minimizer of phi on [0,1]
  double t_bar = 0.0;                // least t in [t*,1) with 1/(1-t*) in dphi(t)
  double phi_prime_minus_1 = 0.0;    // left derivative at 1
  double phi_prime_plus_tbar = 0.0;  // right derivative at t_bar
};

/// varphi(1), the normalizer.
double phi_normalizer(const PhiSpec& spec);

/// phi(t). Throws std::domain_error outside dom phi (LQ: t > 1 + eps).
double phi_eval(const PhiSpec& spec, double t);
/// Right derivative of phi at t.
double phi_derivative(const PhiSpec& spec, double t);

PhiConstants phi_constants(const PhiSpec& spec);

/// Conjugate of psi = phi + indicator([0,1]), in closed form.
double psi_star_eval(const PhiSpec& spec, double s);

/// Smallest element of the subdifferential of psi* at s >= 0, i.e. the
/// smallest minimizer of phi(w) - s w over [0,1].
double weight_from_subgradient(const PhiSpec& spec, double s);

/// theta(s) = s - psi*(s) for s >= 0.
double theta_eval(const PhiSpec& spec, double s);

/// Exact-penalty threshold nu L_f (1-t*) phi'_-(1) / (1-t_bar).
double rho_lower_bound(const PhiSpec& spec, double nu, double lip);

/// Upper bound (R sqrt(p)/n) ||A||^2 + (1/n) ||A^T b|| on the Lipschitz
/// constant of f(x) = ||Ax-b||^2/(2n) over the box.
double lipschitz_estimate(const DesignOperator& a, const Vec& b,
                          const BoxConstraint& box);

}  // namespace gsr
