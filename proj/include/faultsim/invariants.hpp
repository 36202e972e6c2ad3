/**
 * @file invariants.hpp
 * @brief Property checks on converged states and on the discrete operators.
 *
 * Three suites: contact complementarity on converged steps, a directional
 * finite-difference check of the Newton Jacobian, and mirror symmetry of the
 * conceptual model.
 */
#pragma once

#include "analysis.hpp"
#include "assembly.hpp"
#include "contact.hpp"
#include "mesh.hpp"
#include "solver.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace faultsim
{

struct SuiteResult
{
  std::string name;
  bool pass = false;
  double metric = 0.0;    // worst observed value
  double threshold = 0.0;
  double seconds = 0.0;
  std::string detail;
};

// ---------------------------------------------------------------------------
// Complementarity

struct KktLimits
{
  double max_t_N = 0.01;       // [Pa]
  double min_g_N = -1e-10;     // [m]
  double max_complementarity = 1e-6; // [Pa m]
  double coulomb_rel = 1e-6;
  double min_cos = 1.0 - 1e-8;
  double alignment_gap = 1e-10; // [m] increments below this have no direction to check
};

struct KktReport
{
  double max_t_N = -std::numeric_limits<double>::infinity();
  double min_g_N = std::numeric_limits<double>::infinity();
  double max_complementarity = 0.0;
  double max_coulomb_ratio = 0.0; // |t_T| / tau_max
  double min_cos = 1.0;
  std::size_t elements = 0;
  std::size_t states = 0;
  bool pass = true;
  std::string first_violation;
};

inline void kkt_accumulate(KktReport &rep, const SolutionState &s, const FrictionLaw &law, const KktLimits &lim = {})
{
  ++rep.states;
  for (std::size_t e = 0; e < s.contact.size(); ++e)
  {
    const auto &c = s.contact[e];
    const auto &t = c.traction;
    const auto &k = c.kinematics;
    ++rep.elements;
    const double comp = std::abs(t.t_N * k.g_N);
    const double tau = tau_max(law, t.t_N, k.slip_acc);
    const double tt = t.t_T.norm();
    rep.max_t_N = std::max(rep.max_t_N, t.t_N);
    rep.min_g_N = std::min(rep.min_g_N, k.g_N);
    rep.max_complementarity = std::max(rep.max_complementarity, comp);
    if (tau > 0.0)
      rep.max_coulomb_ratio = std::max(rep.max_coulomb_ratio, tt / tau);
    double cosv = 1.0;
    if (c.status == ContactStatus::slip && k.dg_T.norm() > lim.alignment_gap && tt > 0.0)
    {
      cosv = t.t_T.dot(k.dg_T) / (tt * k.dg_T.norm());
      rep.min_cos = std::min(rep.min_cos, cosv);
    }
    std::string why;
    if (t.t_N > lim.max_t_N)
      why = fmt::format("t_N = {:.6g} Pa", t.t_N);
    else if (k.g_N < lim.min_g_N)
      why = fmt::format("g_N = {:.6g} m", k.g_N);
    else if (comp > lim.max_complementarity)
      why = fmt::format("|t_N g_N| = {:.6g} Pa m", comp);
    else if (tt > tau * (1.0 + lim.coulomb_rel))
      why = fmt::format("|t_T| / tau_max = {:.12g}", tt / tau);
    else if (cosv < lim.min_cos)
      why = fmt::format("slip alignment cosine {:.12g}", cosv);
    if (!why.empty() && rep.pass)
    {
      rep.pass = false;
      rep.first_violation = fmt::format("step {} element {} ({}): {}", s.step, e, to_string(c.status), why);
    }
  }
}

inline KktReport kkt_check(const std::vector<SolutionState> &states, const FrictionLaw &law, const KktLimits &lim = {})
{
  KktReport rep;
  for (const auto &s : states)
    kkt_accumulate(rep, s, law, lim);
  return rep;
}

inline SuiteResult kkt_suite(const std::vector<SolutionState> &states, const FrictionLaw &law, const KktLimits &lim = {})
{
  const auto t0 = std::chrono::steady_clock::now();
  const KktReport rep = kkt_check(states, law, lim);
  SuiteResult r;
  r.name = "kkt";
  r.pass = rep.pass;
  r.metric = rep.max_complementarity;
  r.threshold = lim.max_complementarity;
  r.detail = fmt::format("{} states, max t_N {:.3g} Pa, min g_N {:.3g} m, max |t_N g_N| {:.3g} Pa m, "
                         "max |t_T|/tau {:.9f}, min cos {:.12f}{}",
                         rep.states, rep.max_t_N, rep.min_g_N, rep.max_complementarity, rep.max_coulomb_ratio,
                         rep.min_cos, rep.pass ? "" : "; " + rep.first_violation);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---------------------------------------------------------------------------
// Jacobian

/// Two blocks split by an inclined fault near x = 1 on a 2 x 3 x 3 grid of unit cells.
inline Mesh two_block_mesh(double E = 1.0e10, double nu = 0.25)
{
  DomainSpec spec;
  spec.x = {0.0, 1.0, 2.0};
  spec.y = {0.0, 1.0, 2.0, 3.0};
  spec.z = {0.0, 1.0, 2.0, 3.0};
  spec.shears.push_back({0.0, 1.0, 2.0, 0.0, 3.0, 1.5, 0.2});
  spec.faults.push_back({"F", Axis::x, 1.0, {0.0, 0.0}, {3.0, 3.0}, 1});
  spec.default_region = 0;
  ElasticMaterial m;
  m.E = E;
  m.nu = nu;
  m.name = "block";
  spec.materials[0] = m;
  return build_structured_domain(spec);
}

struct JacobianCheckOptions
{
  int directions = 20;
  std::uint64_t seed = 20240601;
  double tol = 1e-5;
  double derivative_scale = 1.0; // != 1 injects a wrong friction derivative
};

struct JacobianCheckReport
{
  Index dofs = 0;
  std::size_t n_stick = 0, n_slip = 0, n_open = 0;
  std::vector<double> errors; // best relative error per direction
  double worst = 0.0;
};

/// Random mixed-status state on the two-block mesh; central differences of the residual
/// along random directions are compared with the assembled Jacobian.
inline JacobianCheckReport jacobian_check(const JacobianCheckOptions &opt = {})
{
  const Mesh mesh = two_block_mesh();
  AssemblyOptions aopt;
  aopt.friction_derivative_scale = opt.derivative_scale;
  const FaultSystem sys(mesh, default_boundary_conditions(), aopt);
  const FrictionLaw law = FrictionLaw::from_angles(FrictionKind::arctan, 2.0e6, 30.0, 10.0, 2.0e-3);
  const Index nu = sys.n_u(), nt = sys.n_t(), nf = sys.n_f();

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.0, 1.0);
  auto rand_vec = [&](Index n, double scale) {
    VecX v(n);
    for (Index i = 0; i < n; ++i)
      v(i) = scale * uni(rng);
    return v;
  };

  JacobianCheckReport rep;
  rep.dofs = nu + nt;
  std::vector<ContactStatus> status(nf);
  for (Index e = 0; e < nf; ++e)
    status[e] = static_cast<ContactStatus>(e % 3);

  StepHistory hist;
  hist.t0.resize(nt);
  VecX t(nt);
  for (Index e = 0; e < nf; ++e)
  {
    hist.t0.segment<3>(3 * e) = Vec3(-2.0e7 * (1.0 + 0.2 * uni(rng)), 2.0e6 * uni(rng), 2.0e6 * uni(rng));
    t.segment<3>(3 * e) = Vec3(-1.5e7 * (1.0 + 0.3 * uni(rng)), 5.0e6 * uni(rng), 5.0e6 * uni(rng));
    switch (status[e])
    {
      case ContactStatus::stick: ++rep.n_stick; break;
      case ContactStatus::slip: ++rep.n_slip; break;
      case ContactStatus::open: ++rep.n_open; break;
    }
  }
  VecX u = rand_vec(nu, 1.0e-3);
  hist.J_prev = sys.enriched_jump(u, t, hist.t0);
  hist.slip_prev.resize(nf);
  hist.fallback_dir.resize(nf);
  for (Index e = 0; e < nf; ++e)
  {
    const double A = mesh.interfaces[e].area;
    const double ang = 2.0 * pi * pos(rng);
    const Vec2 delta = (0.5e-3 + 1.0e-3 * pos(rng)) * Vec2(std::cos(ang), std::sin(ang));
    hist.J_prev.segment<2>(3 * e + 1) -= A * delta;
    hist.J_prev(3 * e) += A * 1.0e-4 * uni(rng);
    hist.slip_prev[e] = 4.0e-3 * pos(rng);
    hist.fallback_dir[e] = Vec2(1.0, 0.0);
  }
  StepLoad load;
  load.f_p = rand_vec(nu, 1.0e6);
  load.dp_f = VecX::Zero(nt);
  for (Index e = 0; e < nf; ++e)
    load.dp_f(3 * e) = 1.0e6 * uni(rng);

  const ResidualEval ev = evaluate_residual(sys, hist, load, status, law, u, t, true);
  const LinearSystem ls = assemble_jacobian(sys, ev);
  const double rs = sys.row_scale();
  auto weighted = [&](VecX v) {
    v.tail(nt) *= rs;
    return v;
  };
  auto residual = [&](const VecX &x) {
    const ResidualEval r = evaluate_residual(sys, hist, load, status, law, x.head(nu), x.tail(nt), false);
    VecX out(nu + nt);
    out << r.r_u, r.r_t;
    return out;
  };
  VecX x0(nu + nt);
  x0 << u, t;
  for (int d = 0; d < opt.directions; ++d)
  {
    VecX v(nu + nt);
    v << rand_vec(nu, 1.0e-3), rand_vec(nt, 1.0e6);
    const VecX Jv = weighted(ls.J * v);
    double best = std::numeric_limits<double>::infinity();
    for (double h : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6})
    {
      const VecX fd = weighted((residual(x0 + h * v) - residual(x0 - h * v)) / (2.0 * h));
      best = std::min(best, (fd - Jv).norm() / Jv.norm());
    }
    rep.errors.push_back(best);
    rep.worst = std::max(rep.worst, best);
  }
  return rep;
}

inline SuiteResult jacobian_suite(const JacobianCheckOptions &opt = {})
{
  const auto t0 = std::chrono::steady_clock::now();
  const JacobianCheckReport rep = jacobian_check(opt);
  SuiteResult r;
  r.name = "jacobian";
  r.metric = rep.worst;
  r.threshold = opt.tol;
  r.pass = rep.worst <= opt.tol;
  r.detail = fmt::format("{} dofs, {} stick / {} slip / {} open, {} directions, worst relative error {:.3g}",
                         rep.dofs, rep.n_stick, rep.n_slip, rep.n_open, rep.errors.size(), rep.worst);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// ---------------------------------------------------------------------------
// Mirror symmetry

inline double profile_distance(const ChiProfile &a, const ChiProfile &b)
{
  if (a.z.size() != b.z.size())
    return std::numeric_limits<double>::infinity();
  double d = 0.0;
  for (std::size_t i = 0; i < a.z.size(); ++i)
  {
    if (std::abs(a.z[i] - b.z[i]) > 1e-6)
      return std::numeric_limits<double>::infinity();
    d = std::max(d, std::abs(a.chi_mean[i] - b.chi_mean[i]));
  }
  return d;
}

/// Depth profiles of mirrored fault pairs must coincide at every step, and the fault on
/// the symmetry plane must stay unloaded.
inline SuiteResult symmetry_suite(const Mesh &mesh, const std::vector<SolutionState> &states, const FrictionLaw &law,
                                  double bin_height, double tol = 1e-8, double center_tol = 1e-6)
{
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult r;
  r.name = "symmetry";
  r.threshold = tol;
  const int f1 = mesh.fault_index("F1"), f2 = mesh.fault_index("F2"), f3 = mesh.fault_index("F3"),
            f4 = mesh.fault_index("F4"), f5 = mesh.fault_index("F5");
  double worst = 0.0, worst_center = 0.0;
  for (const auto &s : states)
  {
    worst = std::max(worst, profile_distance(depth_averaged_chi(mesh, f1, s, law, bin_height),
                                             depth_averaged_chi(mesh, f2, s, law, bin_height)));
    worst = std::max(worst, profile_distance(depth_averaged_chi(mesh, f4, s, law, bin_height),
                                             depth_averaged_chi(mesh, f5, s, law, bin_height)));
    worst_center = std::max(worst_center, mean_chi(mesh, f3, s, law));
  }
  r.metric = worst;
  r.pass = worst <= tol && worst_center <= center_tol;
  r.detail = fmt::format("{} states, max |chi(F1) - chi(F2)|, |chi(F4) - chi(F5)| = {:.3g}, max mean chi(F3) = {:.3g}",
                         states.size(), worst, worst_center);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

} // namespace faultsim
