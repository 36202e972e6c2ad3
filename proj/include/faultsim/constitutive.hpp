/**
 * @file constitutive.hpp
 * @brief Isotropic elasticity, effective stress and slip-weakening friction laws.
 */
#pragma once

#include "errors.hpp"
#include "types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>

namespace faultsim
{

struct ElasticMaterial
{
  double E = 1.0e10;  // [Pa]
  double nu = 0.25;   // [-]
  double rho = 2000.0; // [kg/m3]
  double alpha = 1.0; // Biot coefficient
  std::string name;

  void validate() const
  {
    if (!(E > 0.0) || !std::isfinite(E))
      throw InputError("material '" + name + "': E must be positive");
    if (nu == 0.5)
      throw DomainError("material '" + name + "': nu = 0.5 is incompressible");
    if (!(nu > -1.0 && nu < 0.5))
      throw InputError("material '" + name + "': nu outside (-1, 0.5)");
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw InputError("material '" + name + "': alpha outside (0, 1]");
  }

  double lame_lambda() const { return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)); }
  double shear_modulus() const { return E / (2.0 * (1.0 + nu)); }
  double bulk_modulus() const { return E / (3.0 * (1.0 - 2.0 * nu)); }
};

/// Isotropic fourth-order elasticity tensor, stored by its Lame constants.
struct StiffnessTensor
{
  double lambda = 0.0;
  double mu = 0.0;

  /// C : eps for a symmetric strain tensor.
  Mat3 apply(const Mat3 &eps) const
  {
    return lambda * eps.trace() * Mat3::Identity() + 2.0 * mu * eps;
  }

  /// Component C_ijkl.
  double operator()(int i, int j, int k, int l) const
  {
    auto d = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    return lambda * d(i, j) * d(k, l) + mu * (d(i, k) * d(j, l) + d(i, l) * d(j, k));
  }

  /// Voigt matrix (xx, yy, zz, yz, xz, xy) acting on engineering shear strains.
  Eigen::Matrix<double, 6, 6> voigt() const
  {
    Eigen::Matrix<double, 6, 6> D = Eigen::Matrix<double, 6, 6>::Zero();
    for (int i = 0; i < 3; ++i)
    {
      for (int j = 0; j < 3; ++j)
        D(i, j) = lambda;
      D(i, i) += 2.0 * mu;
      D(i + 3, i + 3) = mu;
    }
    return D;
  }
};

inline StiffnessTensor stiffness_tensor(const ElasticMaterial &mat)
{
  mat.validate();
  return {mat.lame_lambda(), mat.shear_modulus()};
}

/// Total stress from strain and pore pressure: C:eps - alpha p I.
inline Mat3 effective_stress(const StiffnessTensor &C, const Mat3 &eps, double alpha, double p)
{
  return C.apply(eps) - alpha * p * Mat3::Identity();
}

enum class FrictionKind : std::uint8_t
{
  constant,
  linear,
  exponential,
  arctan
};

constexpr std::string_view to_string(FrictionKind k)
{
  switch (k)
  {
    case FrictionKind::constant: return "constant";
    case FrictionKind::linear: return "linear";
    case FrictionKind::exponential: return "exponential";
    case FrictionKind::arctan: return "arctan";
  }
  return "unknown";
}

inline FrictionKind parse_friction_kind(std::string_view s)
{
  if (s == "constant") return FrictionKind::constant;
  if (s == "linear") return FrictionKind::linear;
  if (s == "exponential") return FrictionKind::exponential;
  if (s == "arctan") return FrictionKind::arctan;
  throw InputError("unknown friction law '" + std::string(s) + "'");
}

struct FrictionLaw
{
  FrictionKind kind = FrictionKind::constant;
  double c = 0.0;    // cohesion [Pa]
  double mu_s = 0.6; // static coefficient
  double mu_d = 0.6; // dynamic coefficient
  double D_c = 1.0;  // weakening distance [m]

  static FrictionLaw from_angles(FrictionKind kind, double c, double phi_s_deg,
                                 double phi_d_deg, double D_c)
  {
    return {kind, c, std::tan(deg2rad(phi_s_deg)), std::tan(deg2rad(phi_d_deg)), D_c};
  }

  void validate() const
  {
    if (!(c >= 0.0))
      throw InputError("friction: cohesion must be non-negative");
    if (!(mu_d > 0.0))
      throw InputError("friction: mu_d must be positive");
    if (!(mu_s >= mu_d))
      throw InputError("friction: mu_s must not be smaller than mu_d");
    if (kind != FrictionKind::constant && !(D_c > 0.0))
      throw InputError("friction: D_c must be positive");
  }
};

inline void check_slip(double slip)
{
  if (!(slip >= 0.0))
    throw DomainError("negative slip passed to friction law");
}

inline double friction_coefficient(const FrictionLaw &law, double slip)
{
  check_slip(slip);
  const double dmu = law.mu_s - law.mu_d;
  switch (law.kind)
  {
    case FrictionKind::constant: return law.mu_s;
    case FrictionKind::linear: return law.mu_s - dmu * std::min(slip, law.D_c) / law.D_c;
    case FrictionKind::exponential: return law.mu_d + dmu * std::exp(-slip / law.D_c);
    case FrictionKind::arctan:
      return law.mu_d + dmu * (1.0 - (2.0 / pi) * std::atan(slip / law.D_c));
  }
  return law.mu_s;
}

/// d mu / d slip; the linear law returns the right-sided value at the kink.
inline double friction_derivative(const FrictionLaw &law, double slip)
{
  check_slip(slip);
  const double dmu = law.mu_s - law.mu_d;
  switch (law.kind)
  {
    case FrictionKind::constant: return 0.0;
    case FrictionKind::linear: return slip < law.D_c ? -dmu / law.D_c : 0.0;
    case FrictionKind::exponential: return -dmu / law.D_c * std::exp(-slip / law.D_c);
    case FrictionKind::arctan:
    {
      const double r = slip / law.D_c;
      return -(2.0 / pi) * dmu / (law.D_c * (1.0 + r * r));
    }
  }
  return 0.0;
}

/// Coulomb strength c - t_N mu(slip); tensile tractions are clamped to the cohesion.
inline double tau_max(const FrictionLaw &law, double t_N, double slip)
{
  const double mu = friction_coefficient(law, slip);
  if (t_N > 0.0)
    return law.c;
  return law.c - t_N * mu;
}

/// Partial derivatives of tau_max with respect to t_N and slip.
struct TauMaxDerivatives
{
  double value = 0.0;
  double d_tn = 0.0;
  double d_slip = 0.0;
};

inline TauMaxDerivatives tau_max_derivatives(const FrictionLaw &law, double t_N, double slip,
                                             double derivative_scale = 1.0)
{
  TauMaxDerivatives r;
  const double mu = friction_coefficient(law, slip);
  if (t_N > 0.0)
  {
    r.value = law.c;
    return r;
  }
  r.value = law.c - t_N * mu;
  r.d_tn = -mu;
  r.d_slip = -t_N * friction_derivative(law, slip) * derivative_scale;
  return r;
}

} // namespace faultsim
