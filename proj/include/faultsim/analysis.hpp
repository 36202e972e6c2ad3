/**
 * @file analysis.hpp
 * @brief Criticality index, depth profiles, maximum sliding, shear maps and stress paths.
 */
#pragma once

#include "constitutive.hpp"
#include "contact.hpp"
#include "errors.hpp"
#include "mesh.hpp"
#include "solver.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace faultsim
{

/// |t_T| / tau_max clamped to [0, 1]; absent for tensile tractions.
inline std::optional<double> criticality_index(const FaultTraction &t, double slip_acc, const FrictionLaw &law)
{
  if (t.t_N > 0.0)
    return std::nullopt;
  const double tau = tau_max(law, t.t_N, slip_acc);
  if (!(tau > 0.0))
    return t.t_T.norm() > 0.0 ? std::optional<double>(1.0) : std::optional<double>(0.0);
  return std::clamp(t.t_T.norm() / tau, 0.0, 1.0);
}

/// Unclamped ratio, for overshoot checks.
inline double criticality_ratio(const FaultTraction &t, double slip_acc, const FrictionLaw &law)
{
  const double tau = tau_max(law, t.t_N, slip_acc);
  return tau > 0.0 ? t.t_T.norm() / tau : 0.0;
}

inline std::optional<double> element_chi(const ContactState &c, const FrictionLaw &law)
{
  if (c.status == ContactStatus::open)
    return std::nullopt;
  return criticality_index(c.traction, c.kinematics.slip_acc, law);
}

struct ChiProfile
{
  int fault_id = 0;
  int step = 0;
  std::vector<double> z;        // bin centers, descending
  std::vector<double> chi_mean;
};

/// Mean chi of the elements whose centroid falls in each horizontal stripe of height
/// `bin_height`; stripes are aligned so that `anchor` is a stripe boundary.
inline ChiProfile depth_averaged_chi(const Mesh &mesh, int fault_id, const SolutionState &state,
                                     const FrictionLaw &law, double bin_height, double anchor = -2000.0)
{
  if (!(bin_height > 0.0))
    throw InputError("bin height must be positive");
  const auto els = mesh.fault_elements(fault_id);
  if (els.empty())
    throw InputError("fault has no interface elements");
  std::map<long, std::pair<double, int>> bins;
  for (Index e : els)
  {
    const auto chi = element_chi(state.contact[e], law);
    if (!chi)
      continue;
    const long b = static_cast<long>(std::floor((mesh.interfaces[e].centroid.z() - anchor) / bin_height));
    auto &acc = bins[b];
    acc.first += *chi;
    acc.second += 1;
  }
  ChiProfile p;
  p.fault_id = fault_id;
  p.step = state.step;
  for (auto it = bins.rbegin(); it != bins.rend(); ++it)
  {
    p.z.push_back(anchor + (static_cast<double>(it->first) + 0.5) * bin_height);
    p.chi_mean.push_back(it->second.first / it->second.second);
  }
  return p;
}

inline double max_chi(const Mesh &mesh, int fault_id, const SolutionState &state, const FrictionLaw &law)
{
  double m = 0.0;
  for (Index e : mesh.fault_elements(fault_id))
    if (auto chi = element_chi(state.contact[e], law))
      m = std::max(m, *chi);
  return m;
}

inline double mean_chi(const Mesh &mesh, int fault_id, const SolutionState &state, const FrictionLaw &law)
{
  double s = 0.0;
  int n = 0;
  for (Index e : mesh.fault_elements(fault_id))
    if (auto chi = element_chi(state.contact[e], law))
    {
      s += *chi;
      ++n;
    }
  return n ? s / n : 0.0;
}

/// Largest accumulated tangential jump on a fault.
inline double max_sliding(const Mesh &mesh, int fault_id, const SolutionState &state)
{
  double m = 0.0;
  for (Index e : mesh.fault_elements(fault_id))
    m = std::max(m, state.contact[e].kinematics.slip_acc);
  return m;
}

/// Vertical component of the shear traction in global axes.
inline double t_T_z(const InterfaceElement &ie, const FaultTraction &t)
{
  return ie.m1.z() * t.t_T(0) + ie.m2.z() * t.t_T(1);
}

inline std::vector<std::pair<Index, double>> t_T_z_map(const Mesh &mesh, int fault_id, const SolutionState &state)
{
  std::vector<std::pair<Index, double>> r;
  for (Index e : mesh.fault_elements(fault_id))
    r.emplace_back(e, t_T_z(mesh.interfaces[e], state.contact[e].traction));
  return r;
}

struct StressPathSample
{
  Index element = 0;
  int step = 0;
  double t_N = 0.0;
  double t_T = 0.0;      // |t_T|
  double tau_max = 0.0;  // bound at the current accumulated slip
  double tau_static = 0.0; // bound with the static friction coefficient
  ContactStatus status = ContactStatus::stick;
};

inline std::vector<StressPathSample> stress_path(Index element, const std::vector<SolutionState> &trajectory,
                                                 const FrictionLaw &law)
{
  std::vector<StressPathSample> r;
  for (const auto &s : trajectory)
  {
    if (element < 0 || element >= static_cast<Index>(s.contact.size()))
      throw InputError("unknown interface element " + std::to_string(element));
    const auto &c = s.contact[element];
    StressPathSample p;
    p.element = element;
    p.step = s.step;
    p.t_N = c.traction.t_N;
    p.t_T = c.traction.t_T.norm();
    p.tau_max = tau_max(law, c.traction.t_N, c.kinematics.slip_acc);
    p.tau_static = tau_max(law, c.traction.t_N, 0.0);
    p.status = c.status;
    r.push_back(p);
  }
  return r;
}

/// Element of a fault in the topmost row inside (z_bottom, z_top), closest to y = 0.
inline Index probe_element(const Mesh &mesh, int fault_id, double z_top, double z_bottom)
{
  Index best = -1;
  double best_z = -1e300, best_y = 1e300;
  for (Index e : mesh.fault_elements(fault_id))
  {
    const Vec3 &c = mesh.interfaces[e].centroid;
    if (c.z() >= z_top || c.z() <= z_bottom)
      continue;
    const double zr = std::round(c.z() * 1e6), yr = std::round(std::abs(c.y()) * 1e6);
    if (zr > best_z || (zr == best_z && yr < best_y))
    {
      best = e;
      best_z = zr;
      best_y = yr;
    }
  }
  if (best < 0)
    throw InputError("no interface element of the fault inside the reservoir band");
  return best;
}

// ---------------------------------------------------------------------------
// CSV output

inline std::string fmt_num(double v) { return fmt::format("{:.12g}", v == 0.0 ? 0.0 : v); }

inline void write_chi_profile_csv(std::ostream &out, const std::vector<ChiProfile> &profiles)
{
  out << "fault_id,step,z,chi_mean\n";
  for (const auto &p : profiles)
    for (std::size_t i = 0; i < p.z.size(); ++i)
      out << p.fault_id << ',' << p.step << ',' << fmt_num(p.z[i]) << ',' << fmt_num(p.chi_mean[i]) << '\n';
}

struct MaxSlipRecord
{
  int fault_id = 0;
  int step = 0;
  double slip = 0.0;
};

inline void write_max_slip_csv(std::ostream &out, const std::vector<MaxSlipRecord> &rows)
{
  out << "fault_id,step,slip_m\n";
  for (const auto &r : rows)
    out << r.fault_id << ',' << r.step << ',' << fmt_num(r.slip) << '\n';
}

inline void write_stress_path_csv(std::ostream &out, const std::vector<StressPathSample> &path)
{
  out << "element,step,tn_pa,tt_pa,taumax_pa,status\n";
  for (const auto &p : path)
    out << p.element << ',' << p.step << ',' << fmt_num(p.t_N) << ',' << fmt_num(p.t_T) << ','
        << fmt_num(p.tau_max) << ',' << to_string(p.status) << '\n';
}

} // namespace faultsim
