#include "limitfrac/constitutive.hpp"

#include <cmath>

#include "limitfrac/errors.hpp"

namespace limitfrac::constitutive {

const char* to_string(Model m) { return m == Model::lefm ? "lefm" : "nlsl"; }

void MaterialParams::validate() const {
  if (!(mu > 0.0)) throw ConfigError("material: mu must be positive");
  if (!(lambda + 2.0 / 3.0 * mu > 0.0)) throw ConfigError("material: bulk modulus must be positive");
  if (!(alpha > 0.0)) throw ConfigError("material: alpha must be positive");
  if (!(beta >= 0.0)) throw ConfigError("material: beta must be non-negative");
  if (!(gc > 0.0)) throw ConfigError("material: gc must be positive");
  if (!(xi > 0.0)) throw ConfigError("material: xi must be positive");
  if (!(kappa >= 0.0 && kappa < 1.0)) throw ConfigError("material: kappa must lie in [0, 1)");
}

double SymTensor2::frobenius() const { return std::sqrt(xx * xx + yy * yy + 2.0 * xy * xy); }

double ddot(const SymTensor2& a, const SymTensor2& b) {
  return a.xx * b.xx + a.yy * b.yy + 2.0 * a.xy * b.xy;
}

SymTensor2 hooke_stress(const SymTensor2& eps, const MaterialParams& m) {
  const double lt = m.lambda * eps.trace();
  return {2.0 * m.mu * eps.xx + lt, 2.0 * m.mu * eps.yy + lt, 2.0 * m.mu * eps.xy};
}

double plane_strain_zz(const SymTensor2& sigma, const MaterialParams& m) {
  return m.lambda * sigma.trace() / (2.0 * (m.lambda + m.mu));
}

SymTensor2 compliance(const SymTensor2& sigma, double sigma_zz, const MaterialParams& m) {
  const double a = 1.0 / (2.0 * m.mu);
  const double b =
      m.lambda * (sigma.trace() + sigma_zz) / (2.0 * m.mu * (2.0 * m.mu + 3.0 * m.lambda));
  return {a * sigma.xx - b, a * sigma.yy - b, a * sigma.xy};
}

SymTensor2 compliance(const SymTensor2& sigma, const MaterialParams& m) {
  return compliance(sigma, plane_strain_zz(sigma, m), m);
}

double half_norm_stress(const SymTensor2& sigma, double sigma_zz, const MaterialParams& m) {
  const double tr = sigma.trace() + sigma_zz;
  const double r = (ddot(sigma, sigma) + sigma_zz * sigma_zz) / (2.0 * m.mu) -
                   m.lambda * tr * tr / (2.0 * m.mu * (2.0 * m.mu + 3.0 * m.lambda));
  if (r < kRadicandFloor)
    throw ConfigError("half_norm_stress: negative radicand " + std::to_string(r) +
                      " (check lambda, mu)");
  return r > 0.0 ? std::sqrt(r) : 0.0;
}

double half_norm_stress(const SymTensor2& sigma, const MaterialParams& m) {
  return half_norm_stress(sigma, plane_strain_zz(sigma, m), m);
}

double half_norm_strain(const SymTensor2& eps, const MaterialParams& m) {
  const double tr = eps.trace();
  const double r = 2.0 * m.mu * ddot(eps, eps) + m.lambda * tr * tr;
  return r > 0.0 ? std::sqrt(r) : 0.0;
}

double phi_tilde(double r, double alpha, double beta) {
  return 1.0 / std::pow(1.0 + std::pow(beta * r, alpha), 1.0 / alpha);
}

SymTensor2 strain_nl(const SymTensor2& sigma, double sigma_zz, const MaterialParams& m) {
  const SymTensor2 k = compliance(sigma, sigma_zz, m);
  if (m.beta == 0.0) return k;
  return k * phi_tilde(half_norm_stress(sigma, sigma_zz, m), m.alpha, m.beta);
}

SymTensor2 strain_nl(const SymTensor2& sigma, const MaterialParams& m) {
  return strain_nl(sigma, plane_strain_zz(sigma, m), m);
}

double ellipticity_ratio(const SymTensor2& eps, const MaterialParams& m) {
  return m.beta * half_norm_strain(eps, m);
}

namespace {

// 1 - (beta s)^alpha; throws outside the admissible set.
double limiter_base(double s, const MaterialParams& m) {
  const double bs = m.beta * s;
  const double p = std::pow(bs, m.alpha);
  if (!(p < 1.0 - kEllipticityGuard)) throw LimitExceeded(bs);
  return 1.0 - p;
}

Eigen::Matrix3d hooke_voigt(const MaterialParams& m) {
  Eigen::Matrix3d c;
  c << m.lambda + 2.0 * m.mu, m.lambda, 0.0,  //
      m.lambda, m.lambda + 2.0 * m.mu, 0.0,   //
      0.0, 0.0, m.mu;
  return c;
}

}  // namespace

SymTensor2 stress_sl(const SymTensor2& eps, const MaterialParams& m) {
  const SymTensor2 lin = hooke_stress(eps, m);
  if (m.beta == 0.0) return lin;
  const double base = limiter_base(half_norm_strain(eps, m), m);
  return lin / std::pow(base, 1.0 / m.alpha);
}

SymTensor2 tangent_sl(const SymTensor2& eps, const SymTensor2& deps, const MaterialParams& m) {
  const SymTensor2 dlin = hooke_stress(deps, m);
  if (m.beta == 0.0) return dlin;
  const double s = half_norm_strain(eps, m);
  const double base = limiter_base(s, m);
  SymTensor2 out = dlin / std::pow(base, 1.0 / m.alpha);
  if (s < kTangentCutoff) return out;
  const SymTensor2 lin = hooke_stress(eps, m);
  const double theta1 = std::pow(s, m.alpha - 2.0);
  const double theta2 = ddot(lin, deps);
  out += lin * (std::pow(m.beta, m.alpha) * theta1 * theta2 /
                std::pow(base, 1.0 + 1.0 / m.alpha));
  return out;
}

SymTensor2 stress(Model model, const SymTensor2& eps, const MaterialParams& m) {
  return model == Model::lefm ? hooke_stress(eps, m) : stress_sl(eps, m);
}

StressTangent stress_and_tangent(Model model, const SymTensor2& eps, const MaterialParams& m) {
  const Eigen::Matrix3d c = hooke_voigt(m);
  const SymTensor2 lin = hooke_stress(eps, m);
  if (model == Model::lefm || m.beta == 0.0) return {lin, c};
  const double s = half_norm_strain(eps, m);
  const double base = limiter_base(s, m);
  const double inv_d = 1.0 / std::pow(base, 1.0 / m.alpha);
  StressTangent out{lin * inv_d, c * inv_d};
  if (s >= kTangentCutoff) {
    const Eigen::Vector3d v(lin.xx, lin.yy, lin.xy);
    const double k = std::pow(m.beta, m.alpha) * std::pow(s, m.alpha - 2.0) /
                     std::pow(base, 1.0 + 1.0 / m.alpha);
    out.tangent += k * v * v.transpose();
  }
  return out;
}

Eigen::Matrix3d tangent_matrix(Model model, const SymTensor2& eps, const MaterialParams& m) {
  return stress_and_tangent(model, eps, m).tangent;
}

}  // namespace limitfrac::constitutive
