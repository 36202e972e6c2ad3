/**
 * @file spring1d.hpp
 * @brief Displacement-driven single spring-slider with slip-weakening friction.
 */
#pragma once

#include "constitutive.hpp"
#include "errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

#include <fmt/format.h>

namespace faultsim
{

struct SpringSliderConfig
{
  double K = 11.0e9; // [N/m]
  double N = 3.0e7;  // [N]
  FrictionLaw law = FrictionLaw::from_angles(FrictionKind::arctan, 0.0, 30.0, 10.0, 2.0e-3);
  std::vector<double> d_schedule; // driving-point displacements [m]

  void validate() const
  {
    if (!(K > 0.0) || !(N > 0.0))
      throw InputError("spring-slider: K and N must be positive");
    law.validate();
  }
};

struct SpringSliderSample
{
  double d = 0.0;   // driving displacement [m]
  double F = 0.0;   // spring / friction force [N]
  double u_r = 0.0; // slider displacement [m]
  double K_bar = 0.0; // dF/dd [N/m]
  double U = 0.0;   // spring strain energy [J]
};

/// Uniform increments `dd` up to `d_fine`, then geometric growth by `growth` up to `d_max`.
inline std::vector<double> spring_schedule(double dd = 1.0e-6, double d_fine = 0.025, double d_max = 50.0,
                                           double growth = 1.01)
{
  std::vector<double> d;
  const long n = std::lround(d_fine / dd);
  for (long i = 0; i <= n; ++i)
    d.push_back(i * dd);
  double step = dd;
  while (d.back() < d_max)
  {
    step *= growth;
    d.push_back(std::min(d.back() + step, d_max));
  }
  return d;
}

/// Quasi-static response. A step crossing the slip onset is split at the onset so the peak
/// force is sampled exactly; when sliding, the slider moves to the first equilibrium
/// K (d - s) = mu(s) N ahead of its position (snap-through if the branch is unstable).
inline std::vector<SpringSliderSample> simulate(const SpringSliderConfig &cfg)
{
  cfg.validate();
  if (cfg.d_schedule.empty())
    throw InputError("spring-slider: empty displacement schedule");
  const double K = cfg.K, N = cfg.N;
  const auto &law = cfg.law;
  auto capacity = [&](double s) { return law.c + friction_coefficient(law, s) * N; };

  std::vector<SpringSliderSample> out;
  double s = 0.0;
  auto push = [&](double d) {
    SpringSliderSample p;
    p.d = d;
    p.u_r = s;
    p.F = K * (d - s);
    p.U = 0.5 * K * (d - s) * (d - s);
    if (out.empty())
      p.K_bar = K;
    else
    {
      const double dd = d - out.back().d;
      p.K_bar = dd != 0.0 ? (p.F - out.back().F) / dd : out.back().K_bar;
    }
    out.push_back(p);
  };

  double d_prev = cfg.d_schedule.front();
  push(d_prev);
  bool sliding = false;
  for (std::size_t i = 1; i < cfg.d_schedule.size(); ++i)
  {
    const double d = cfg.d_schedule[i];
    if (!(d >= d_prev))
      throw InputError("spring-slider: schedule must be non-decreasing");
    if (K * (d - s) <= capacity(s))
    {
      sliding = false;
      push(d);
      d_prev = d;
      continue;
    }
    if (!sliding)
    {
      const double d_on = s + capacity(s) / K;
      if (d_on > d_prev + 1e-12 && d_on < d - 1e-12)
        push(d_on);
      sliding = true;
    }
    auto f = [&](double x) { return K * (d - x) - capacity(x); };
    double lo = s, hi = s, step = std::max(1e-12, 1e-3 * law.D_c);
    // March forward to the first sign change: the nearest stable equilibrium.
    for (int k = 0;; ++k)
    {
      hi = lo + step;
      if (f(hi) <= 0.0)
        break;
      lo = hi;
      step *= 1.5;
      if (k > 2000)
        throw SolverError("spring-slider: no equilibrium found");
    }
    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
    s = 0.5 * (r.first + r.second);
    push(d);
    d_prev = d;
  }
  return out;
}

/// Minimum of mu'(u_r) N K / (K + mu'(u_r) N) over the sliding branch; -infinity when the
/// tangent becomes vertical (K + mu' N <= 0).
inline double analytic_min_stiffness(const SpringSliderConfig &cfg)
{
  cfg.validate();
  // |mu'| is largest at zero slip for all supported laws.
  const double mp = friction_derivative(cfg.law, 0.0);
  const double den = cfg.K + mp * cfg.N;
  if (den <= 0.0)
    return -std::numeric_limits<double>::infinity();
  return mp * cfg.N * cfg.K / den;
}

inline void write_spring1d_csv(std::ostream &out, const std::vector<SpringSliderSample> &samples)
{
  out << "d_m,F_n,ur_m,kbar_npm,U_j\n";
  for (const auto &p : samples)
    out << fmt::format("{:.12g},{:.12g},{:.12g},{:.12g},{:.12g}\n", p.d, p.F, p.u_r, p.K_bar, p.U);
}

} // namespace faultsim
