#pragma once

#include <Eigen/Core>

namespace limitfrac::constitutive {

/// Linear elastic fracture mechanics or the nonlinear strain-limiting law.
enum class Model { lefm, nlsl };

const char* to_string(Model m);

struct MaterialParams {
  double lambda = 1.0;  ///< first Lame coefficient
  double mu = 1.0;      ///< shear modulus
  double alpha = 1.0;   ///< strain-limiting exponent, > 0
  double beta = 0.0;    ///< strain-limiting coefficient, >= 0 (0 recovers LEFM)
  double gc = 1.0;      ///< critical energy release rate
  double xi = 1e-2;     ///< phase-field bandwidth
  double kappa = 0.0;   ///< residual stiffness regularizer

  /// Throws ConfigError on mu <= 0, non-positive bulk modulus, alpha <= 0,
  /// beta < 0, xi <= 0, kappa outside [0, 1).
  void validate() const;
};

/// Symmetric 2x2 tensor stored as (xx, yy, xy).
struct SymTensor2 {
  double xx = 0.0;
  double yy = 0.0;
  double xy = 0.0;

  static SymTensor2 identity() { return {1.0, 1.0, 0.0}; }
  double trace() const { return xx + yy; }
  double frobenius() const;

  SymTensor2& operator+=(const SymTensor2& o) {
    xx += o.xx;
    yy += o.yy;
    xy += o.xy;
    return *this;
  }
  SymTensor2& operator-=(const SymTensor2& o) {
    xx -= o.xx;
    yy -= o.yy;
    xy -= o.xy;
    return *this;
  }
  SymTensor2& operator*=(double s) {
    xx *= s;
    yy *= s;
    xy *= s;
    return *this;
  }
  friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
  friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
  friend SymTensor2 operator*(SymTensor2 a, double s) { return a *= s; }
  friend SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }
  friend SymTensor2 operator/(SymTensor2 a, double s) { return a *= 1.0 / s; }
};

/// A:B = Axx Bxx + Ayy Byy + 2 Axy Bxy.
double ddot(const SymTensor2& a, const SymTensor2& b);

/// Radicands below this are treated as rounding noise and clamped to zero.
inline constexpr double kRadicandFloor = -1e-14;
/// Admissible states satisfy (beta*s)^alpha < 1 - kEllipticityGuard.
inline constexpr double kEllipticityGuard = 1e-10;
/// Below this energy half-norm the second tangent term is dropped.
inline constexpr double kTangentCutoff = 1e-14;

/// E[eps] = 2 mu eps + lambda tr(eps) I.
SymTensor2 hooke_stress(const SymTensor2& eps, const MaterialParams& m);

/// Out-of-plane stress of a plane-strain state with in-plane stress sigma:
/// lambda tr(sigma) / (2 (lambda + mu)).
double plane_strain_zz(const SymTensor2& sigma, const MaterialParams& m);

/// In-plane part of K[sigma] = sigma / 2mu - lambda tr(sigma) I / (2mu (2mu + 3 lambda))
/// for the 3D stress (sigma, sigma_zz). The trace includes sigma_zz.
SymTensor2 compliance(const SymTensor2& sigma, double sigma_zz, const MaterialParams& m);
/// Plane strain: sigma_zz = plane_strain_zz(sigma), so K inverts hooke_stress.
SymTensor2 compliance(const SymTensor2& sigma, const MaterialParams& m);

/// |K^{1/2}[sigma]| = sqrt(sigma:sigma / 2mu - lambda tr(sigma)^2 / (2mu (2mu + 3 lambda)))
/// over the 3D stress (sigma, sigma_zz). Throws ConfigError if the radicand
/// is below kRadicandFloor.
double half_norm_stress(const SymTensor2& sigma, double sigma_zz, const MaterialParams& m);
double half_norm_stress(const SymTensor2& sigma, const MaterialParams& m);

/// |E^{1/2}[eps]| = sqrt(2 mu eps:eps + lambda tr(eps)^2).
double half_norm_strain(const SymTensor2& eps, const MaterialParams& m);

/// 1 / (1 + (beta r)^alpha)^(1/alpha).
double phi_tilde(double r, double alpha, double beta);

/// eps_NL = phi_tilde(|K^{1/2}[sigma]|) K[sigma] (in-plane part).
SymTensor2 strain_nl(const SymTensor2& sigma, double sigma_zz, const MaterialParams& m);
SymTensor2 strain_nl(const SymTensor2& sigma, const MaterialParams& m);

/// beta * |E^{1/2}[eps]|, the quantity the ellipticity bound caps at 1.
double ellipticity_ratio(const SymTensor2& eps, const MaterialParams& m);

/// E[eps] / (1 - (beta |E^{1/2}[eps]|)^alpha)^(1/alpha).
/// Throws LimitExceeded when the state is outside the admissible set.
SymTensor2 stress_sl(const SymTensor2& eps, const MaterialParams& m);

/// Directional derivative of stress_sl at eps along deps.
SymTensor2 tangent_sl(const SymTensor2& eps, const SymTensor2& deps, const MaterialParams& m);

/// Stress for the chosen model (hooke_stress or stress_sl).
SymTensor2 stress(Model model, const SymTensor2& eps, const MaterialParams& m);

/// Tangent in Voigt form: maps (deps_xx, deps_yy, 2 deps_xy) to
/// (dsigma_xx, dsigma_yy, dsigma_xy). Symmetric for both models.
Eigen::Matrix3d tangent_matrix(Model model, const SymTensor2& eps, const MaterialParams& m);

/// Stress and Voigt tangent in one evaluation (shares the denominator).
struct StressTangent {
  SymTensor2 stress;
  Eigen::Matrix3d tangent;
};
StressTangent stress_and_tangent(Model model, const SymTensor2& eps, const MaterialParams& m);

/// g(phi) = (1 - kappa) phi^2 + kappa.
inline double degradation(double phi, double kappa) { return (1.0 - kappa) * phi * phi + kappa; }

}  // namespace limitfrac::constitutive
