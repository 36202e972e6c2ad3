/**
 * @file solver.hpp
 * @brief Loading-step solver: outer active-set loop around an exact Newton method.
 */
#pragma once

#include "assembly.hpp"
#include "contact.hpp"
#include "errors.hpp"
#include "linear_solver.hpp"
#include "pressure.hpp"
#include "types.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace faultsim
{

struct SolverConfig
{
  double newton_tol = 1e-6;
  int newton_max = 25;
  int activeset_max = 20;
  double ls_tol = 1e-10;
  double ls_factor = 0.5;
  int ls_max_cuts = 8;
  int cycle_freeze = 3;     // consecutive toggles before an element is frozen to slip
  double gap_tol = 1e-14;   // [m] enriched-gap residual at convergence
  double shear_tol = 1e-3;  // [Pa] Coulomb-equality residual at convergence
  ContactTolerances contact;
};

struct SolutionState
{
  int step = 0;
  double time = 0.0;
  VecX u;
  VecX t; // local frames, effective traction
  std::vector<ContactState> contact;
  std::vector<Vec2> slip_dir; // last slip direction per element (zero when never slipped)
};

struct NewtonReport
{
  int iterations = 0;
  std::vector<double> residuals; // merit norm before each iteration and at the end
  int line_search_cuts = 0;
};

struct StepReport
{
  int activeset_iterations = 0;
  std::vector<NewtonReport> newton;
  std::size_t frozen = 0;
};

class Simulator
{
public:
  Simulator(const Mesh &mesh, const BoundaryConditions &bcs, const FrictionLaw &law, VecX t0,
            SolverConfig cfg = {}, AssemblyOptions opt = {})
      : sys_(mesh, bcs, opt), law_(law), t0_(std::move(t0)), cfg_(cfg)
  {
    law_.validate();
    if (t0_.size() != sys_.n_t())
      throw InputError("initial traction size does not match the interface count");
    cfg_.contact.length_scale = sys_.L_ref();
  }

  const FaultSystem &system() const { return sys_; }
  const FrictionLaw &law() const { return law_; }
  const SolverConfig &config() const { return cfg_; }
  const VecX &initial_traction() const { return t0_; }

  const SchurSolver &linear_solver() const
  {
    if (!schur_)
      schur_ = std::make_unique<SchurSolver>(sys_, cfg_.ls_tol);
    return *schur_;
  }

  SolutionState initial_state() const
  {
    SolutionState s;
    s.u = sys_.constraints().value;
    s.t = t0_;
    s.contact.resize(sys_.n_f());
    s.slip_dir.assign(sys_.n_f(), Vec2::Zero());
    for (Index e = 0; e < sys_.n_f(); ++e)
    {
      auto &c = s.contact[e];
      c.traction = FaultTraction::from_local(t0_.segment<3>(3 * e));
      c.status = c.traction.t_N > -cfg_.contact.tol_t * cfg_.contact.p_ref ? ContactStatus::open
                                                                            : ContactStatus::stick;
    }
    return s;
  }

  StepLoad make_load(const PressureSnapshot &p) const
  {
    return {sys_.pressure_load(p.cell_dp), sys_.fault_pressure_vector(p.fault_dp)};
  }

  StepHistory history_from(const SolutionState &prev) const
  {
    StepHistory h;
    h.t0 = t0_;
    h.J_prev = sys_.enriched_jump(prev.u, prev.t, t0_);
    h.slip_prev.resize(sys_.n_f());
    h.fallback_dir.resize(sys_.n_f());
    for (Index e = 0; e < sys_.n_f(); ++e)
    {
      h.slip_prev[e] = prev.contact[e].kinematics.slip_acc;
      Vec2 d = prev.slip_dir[e];
      if (d.norm() == 0.0)
        d = prev.contact[e].traction.t_T;
      if (d.norm() == 0.0)
        d = Vec2(0.0, 1.0);
      h.fallback_dir[e] = d.normalized();
    }
    return h;
  }

  double merit(const ResidualEval &ev) const
  {
    return std::sqrt(ev.r_u.squaredNorm() + std::pow(sys_.row_scale(), 2) * ev.r_t.squaredNorm());
  }

  /// Newton iterations for a frozen partition; updates u and t in place.
  NewtonReport newton_iterate(const StepHistory &hist, const StepLoad &load, const std::vector<ContactStatus> &status,
                              VecX &u, VecX &t) const
  {
    NewtonReport rep;
    const auto &solver = linear_solver();
    ResidualEval ev = evaluate_residual(sys_, hist, load, status, law_, u, t, true);
    double m = merit(ev);
    double area2 = 0.0;
    for (const auto &ie : sys_.mesh().interfaces)
      area2 += ie.area * ie.area;
    const double r_ref = std::max(m, cfg_.contact.p_ref * std::sqrt(area2));
    rep.residuals.push_back(m);
    const Index nu = sys_.n_u();
    for (int it = 1; it <= cfg_.newton_max; ++it)
    {
      const auto fact = solver.factorize(ev.blocks);
      VecX r(ev.r_u.size() + ev.r_t.size());
      r << ev.r_u, ev.r_t;
      const VecX dx = solver.solve(fact, r);
      double alpha = 1.0;
      VecX u_new, t_new;
      ResidualEval ev_new;
      double m_new = 0.0;
      for (int cut = 0;; ++cut)
      {
        u_new = u + alpha * dx.head(nu);
        t_new = t + alpha * dx.tail(dx.size() - nu);
        ev_new = evaluate_residual(sys_, hist, load, status, law_, u_new, t_new, true);
        m_new = merit(ev_new);
        if (m_new <= m || cut >= cfg_.ls_max_cuts)
          break;
        alpha *= cfg_.ls_factor;
        ++rep.line_search_cuts;
      }
      u = std::move(u_new);
      t = std::move(t_new);
      ev = std::move(ev_new);
      m = m_new;
      rep.residuals.push_back(m);
      rep.iterations = it;
      if (m <= cfg_.newton_tol * r_ref && rows_converged(ev, status, t))
        return rep;
    }
    throw StepError("Newton did not converge in " + std::to_string(cfg_.newton_max) +
                    " iterations (merit " + std::to_string(m) + ", reference " + std::to_string(r_ref) + ")");
  }

  /// One loading step: active-set loop with Newton solves for each frozen partition.
  SolutionState solve_step(const SolutionState &prev, const PressureSnapshot &p, StepReport *report = nullptr) const
  {
    const Index nf = sys_.n_f();
    const StepHistory hist_base = history_from(prev);
    StepHistory hist = hist_base;
    const StepLoad load = make_load(p);
    // Elastic predictor: sliding elements restart as stick and are promoted again when the
    // trial shear exceeds the bound, so a load reversal never has to flip a slip direction.
    std::vector<ContactStatus> status(nf);
    for (Index e = 0; e < nf; ++e)
      status[e] = prev.contact[e].status == ContactStatus::open ? ContactStatus::open : ContactStatus::stick;
    // Reference shear direction for the reversal test.
    std::vector<Vec2> t_ref(nf);
    for (Index e = 0; e < nf; ++e)
      t_ref[e] = prev.contact[e].traction.t_T;
    std::vector<int> toggles(nf, 0);
    std::vector<int> last_change(nf, -10);
    std::vector<char> frozen(nf, 0);

    VecX u = prev.u, t = prev.t;
    StepReport rep;
    const auto &tol = cfg_.contact;
    for (int outer = 0; outer < cfg_.activeset_max; ++outer)
    {
      rep.newton.push_back(newton_iterate(hist, load, status, u, t));
      rep.activeset_iterations = outer + 1;
      const VecX J = sys_.enriched_jump(u, t, t0_);
      bool changed = false;
      std::vector<ContactStatus> next = status;
      for (Index e = 0; e < nf; ++e)
      {
        const double A = sys_.mesh().interfaces[e].area;
        const Vec3 te = t.segment<3>(3 * e);
        const Vec2 tT = te.tail<2>();
        const Vec2 dg = (J.segment<2>(3 * e + 1) - hist.J_prev.segment<2>(3 * e + 1)) / A;
        const bool tensile = te(0) > -tol.tol_t * tol.p_ref;
        switch (status[e])
        {
          case ContactStatus::stick:
            if (tensile)
              next[e] = ContactStatus::open;
            else if (tT.norm() > tau_max(law_, te(0), hist.slip_prev[e]) * (1.0 + tol.tol_tau))
            {
              next[e] = ContactStatus::slip;
              t_ref[e] = tT;
              hist.fallback_dir[e] = tT.normalized();
            }
            break;
          case ContactStatus::slip:
            if (tensile)
              next[e] = ContactStatus::open;
            else if (!frozen[e] && dg.norm() > slip_direction_eps && dg.dot(t_ref[e]) < 0.0)
              next[e] = ContactStatus::stick;
            break;
          case ContactStatus::open:
            if (J(3 * e) / A < -tol.tol_gap)
              next[e] = ContactStatus::stick;
            break;
        }
        if (next[e] != status[e])
        {
          changed = true;
          toggles[e] = last_change[e] == outer - 1 ? toggles[e] + 1 : 1;
          last_change[e] = outer;
          if (toggles[e] >= cfg_.cycle_freeze && !frozen[e] && next[e] != ContactStatus::open)
          {
            frozen[e] = 1;
            if (next[e] != ContactStatus::slip)
            {
              next[e] = ContactStatus::slip;
              hist.fallback_dir[e] = tT.norm() > 0.0 ? Vec2(tT.normalized()) : hist.fallback_dir[e];
            }
            ++rep.frozen;
          }
        }
      }
      if (!changed)
      {
        if (report)
          *report = rep;
        return finalize(prev, hist, status, u, t);
      }
      status = std::move(next);
    }
    throw CyclingError("active set did not settle in " + std::to_string(cfg_.activeset_max) + " iterations");
  }

private:
  bool rows_converged(const ResidualEval &ev, const std::vector<ContactStatus> &status, const VecX &t) const
  {
    const auto &ifs = sys_.mesh().interfaces;
    const double k = sys_.k_scale();
    for (std::size_t e = 0; e < status.size(); ++e)
    {
      const double A = ifs[e].area;
      const Vec3 r = ev.r_t.segment<3>(3 * e);
      switch (status[e])
      {
        case ContactStatus::stick:
          if (r.cwiseAbs().maxCoeff() / A > cfg_.gap_tol)
            return false;
          break;
        case ContactStatus::slip:
          if (std::abs(r(0)) / A > cfg_.gap_tol || r.tail<2>().norm() * k > cfg_.shear_tol)
            return false;
          break;
        case ContactStatus::open:
          if (t.segment<3>(3 * e).norm() > cfg_.shear_tol)
            return false;
          break;
      }
    }
    return true;
  }

  SolutionState finalize(const SolutionState &prev, const StepHistory &hist, const std::vector<ContactStatus> &status,
                         const VecX &u, const VecX &t) const
  {
    SolutionState s;
    s.step = prev.step + 1;
    s.time = prev.time;
    s.u = u;
    s.t = t;
    s.contact.resize(sys_.n_f());
    s.slip_dir = prev.slip_dir;
    const VecX J = sys_.enriched_jump(u, t, t0_);
    for (Index e = 0; e < sys_.n_f(); ++e)
    {
      const double A = sys_.mesh().interfaces[e].area;
      auto &c = s.contact[e];
      c.status = status[e];
      c.traction = FaultTraction::from_local(t.segment<3>(3 * e));
      c.kinematics.g_N = J(3 * e) / A;
      c.kinematics.g_T = J.segment<2>(3 * e + 1) / A;
      c.kinematics.dg_T = (J.segment<2>(3 * e + 1) - hist.J_prev.segment<2>(3 * e + 1)) / A;
      double slip = hist.slip_prev[e];
      if (status[e] != ContactStatus::stick)
        slip += c.kinematics.dg_T.norm();
      c.kinematics.slip_acc = slip;
      if (status[e] == ContactStatus::slip)
      {
        const double n = c.kinematics.dg_T.norm();
        s.slip_dir[e] = n > slip_direction_eps ? Vec2(c.kinematics.dg_T / n) : hist.fallback_dir[e];
      }
    }
    return s;
  }

  FaultSystem sys_;
  FrictionLaw law_;
  VecX t0_;
  SolverConfig cfg_;
  mutable std::unique_ptr<SchurSolver> schur_;
};

} // namespace faultsim
