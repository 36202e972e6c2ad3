/**
 * @file march.hpp
 * @brief Time marching over the loading steps of a scenario.
 */
#pragma once

#include "checkpoint.hpp"
#include "errors.hpp"
#include "scenario.hpp"
#include "solver.hpp"

#include <chrono>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace faultsim
{

struct Trajectory
{
  std::vector<SolutionState> states; // states[0] is the start state
  std::vector<StepReport> reports;   // reports[k] belongs to states[k]; empty for step 0
  double seconds = 0.0;
};

/// A step failed; the last converged state was written to `restart_file`.
class MarchError : public SolverError
{
public:
  MarchError(const std::string &what, std::string restart, int step)
      : SolverError(what), restart_file(std::move(restart)), failed_step(step)
  {
  }
  std::string restart_file;
  int failed_step = 0;
};

struct MarchOptions
{
  std::string restart_path;                 // written on failure when non-empty
  std::optional<SolutionState> start;       // resume from a converged state
  int last_step = -1;                       // -1: run the whole schedule
  const PressureTable *table = nullptr;     // overrides the compartment schedule
  std::function<void(const SolutionState &, const StepReport &)> on_step;
};

inline Simulator make_simulator(const Scenario &s, const Mesh &mesh)
{
  return Simulator(mesh, s.bcs, s.friction, initial_tractions(mesh, s.stress), s.solver, s.assembly);
}

inline Trajectory march(const Scenario &scn, const Mesh &mesh, const Simulator &sim, const MarchOptions &opt = {})
{
  const auto t_start = std::chrono::steady_clock::now();
  Trajectory tr;
  SolutionState state = opt.start ? *opt.start : sim.initial_state();
  if (!opt.start)
    state.time = scn.step_times.front();
  tr.states.push_back(state);
  tr.reports.emplace_back();
  const int last = opt.last_step < 0 ? scn.n_steps() - 1 : std::min(opt.last_step, scn.n_steps() - 1);
  for (int k = state.step + 1; k <= last; ++k)
  {
    try
    {
      StepReport rep;
      SolutionState next = sim.solve_step(state, step_pressure(scn, mesh, k, opt.table), &rep);
      next.step = k;
      next.time = scn.step_times[k];
      state = std::move(next);
      tr.states.push_back(state);
      tr.reports.push_back(rep);
      if (opt.on_step)
        opt.on_step(state, rep);
    }
    catch (const SolverError &e)
    {
      if (!opt.restart_path.empty())
        write_checkpoint(opt.restart_path, state);
      throw MarchError("step " + std::to_string(k) + " failed: " + e.what() +
                           (opt.restart_path.empty() ? "" : " (restart file: " + opt.restart_path + ")"),
                       opt.restart_path, k);
    }
  }
  tr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return tr;
}

} // namespace faultsim
