/**
 * @file contact.hpp
 * @brief Traction/jump decomposition, stick-slip-open classification and KKT residuals.
 */
#pragma once

#include "constitutive.hpp"
#include "types.hpp"

#include <algorithm>
#include <cmath>

namespace faultsim
{

struct ContactTolerances
{
  double p_ref = 1.0e6;  // [Pa]
  double tol_t = 1e-8;   // tensile threshold, relative to p_ref
  double tol_tau = 1e-6; // relative overshoot of the Coulomb bound
  double tol_gap = 1e-10; // [m]
  double length_scale = 1.0; // [m], normalizes gaps in kkt_residuals
};

struct FaultKinematics
{
  double g_N = 0.0;
  Vec2 g_T = Vec2::Zero();
  double slip_acc = 0.0;
  Vec2 dg_T = Vec2::Zero();
};

struct FaultTraction
{
  double t_N = 0.0;
  Vec2 t_T = Vec2::Zero();

  Vec3 local() const { return {t_N, t_T(0), t_T(1)}; }
  static FaultTraction from_local(const Vec3 &t) { return {t(0), Vec2(t(1), t(2))}; }
};

struct ContactState
{
  ContactStatus status = ContactStatus::stick;
  FaultKinematics kinematics;
  FaultTraction traction;
};

inline ContactStatus classify(const FaultTraction &t, const FaultKinematics &k, const FrictionLaw &law,
                              const ContactTolerances &tol = {})
{
  if (t.t_N > -tol.tol_t * tol.p_ref)
    return ContactStatus::open;
  if (t.t_T.norm() >= (1.0 - tol.tol_tau) * tau_max(law, t.t_N, k.slip_acc))
    return ContactStatus::slip;
  return ContactStatus::stick;
}

/// Coulomb target tau_max(t_N, slip_acc) * dg_T / |dg_T|. A zero increment uses `fallback`
/// as the direction when given, otherwise the direction of the current shear traction.
inline Vec2 slip_target(const FaultTraction &t, const FaultKinematics &k, const FrictionLaw &law,
                        const Vec2 *fallback = nullptr)
{
  const double tau = tau_max(law, t.t_N, k.slip_acc);
  const double n = k.dg_T.norm();
  if (n > 0.0)
    return tau * k.dg_T / n;
  Vec2 d = fallback ? *fallback : t.t_T;
  if (d.norm() > 0.0)
    return tau * d / d.norm();
  return Vec2::Zero();
}

struct KktResiduals
{
  double r_N = 0.0;
  double r_T = 0.0;
  double r_comp = 0.0;
};

/// Sign, Coulomb and complementarity violations; stresses divided by p_ref, gaps by length_scale.
inline KktResiduals kkt_residuals(const ContactState &s, const FrictionLaw &law,
                                  const ContactTolerances &tol = {})
{
  const auto &t = s.traction;
  const auto &k = s.kinematics;
  KktResiduals r;
  r.r_N = std::max(t.t_N, 0.0) / tol.p_ref + std::max(-k.g_N, 0.0) / tol.length_scale;
  r.r_T = std::max(t.t_T.norm() - tau_max(law, t.t_N, k.slip_acc), 0.0) / tol.p_ref;
  r.r_comp = std::abs(t.t_N * k.g_N) / (tol.p_ref * tol.length_scale);
  return r;
}

} // namespace faultsim
