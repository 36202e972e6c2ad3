/**
 * @file pipeline.hpp
 * @brief Scenario run: mesh, march and the derived output files.
 */
#pragma once

#include "analysis.hpp"
#include "march.hpp"
#include "pressure.hpp"
#include "scenario.hpp"
#include "vtk.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace faultsim
{

struct PipelineOptions
{
  std::string restart_path;            // written when a step fails
  std::optional<SolutionState> start;  // resume from a checkpoint
  int last_step = -1;
  bool write_vtk = true;
  std::function<void(const SolutionState &, const StepReport &)> on_step;
};

struct PipelineResult
{
  Mesh mesh;
  Trajectory trajectory;
  Index probe = -1;
  double bin_height = 0.0;
  double setup_seconds = 0.0;
  std::map<std::string, std::string> files; // file name -> contents
};

/// Loading steps whose fault state is written as VTK: phase ends and the last step.
inline std::vector<int> snapshot_steps(int last)
{
  std::vector<int> r;
  for (int k = 1; k <= last; ++k)
    if (k == last || phase_of_step(k) != phase_of_step(k + 1))
      r.push_back(k);
  return r;
}

inline std::map<std::string, std::string> render_outputs(const Scenario &scn, const Mesh &mesh, const Trajectory &tr,
                                                         Index probe, double bin_height, bool with_vtk)
{
  std::map<std::string, std::string> files;
  std::vector<ChiProfile> profiles;
  std::vector<MaxSlipRecord> slips;
  for (const auto &s : tr.states)
    for (int f = 0; f < static_cast<int>(mesh.fault_names.size()); ++f)
    {
      profiles.push_back(depth_averaged_chi(mesh, f, s, scn.friction, bin_height, scn.reservoir_top));
      slips.push_back({f, s.step, max_sliding(mesh, f, s)});
    }
  std::ostringstream chi, slip, path;
  write_chi_profile_csv(chi, profiles);
  write_max_slip_csv(slip, slips);
  write_stress_path_csv(path, stress_path(probe, tr.states, scn.friction));
  files["chi_profile.csv"] = chi.str();
  files["max_slip.csv"] = slip.str();
  files["stress_path.csv"] = path.str();
  if (with_vtk)
  {
    std::ostringstream m;
    write_mesh_vtk(m, mesh);
    files["mesh.vtk"] = m.str();
    const auto steps = snapshot_steps(tr.states.back().step);
    for (const auto &s : tr.states)
    {
      if (std::find(steps.begin(), steps.end(), s.step) == steps.end())
        continue;
      std::ostringstream v;
      write_fault_state_vtk(v, mesh, s, scn.friction);
      files[fmt::format("fault_state_{:03d}.vtk", s.step)] = v.str();
    }
  }
  return files;
}

/// Builds the mesh of a scenario, marches its schedule and renders the outputs.
inline PipelineResult run_pipeline(const Scenario &scn, const PipelineOptions &opt = {})
{
  scn.validate();
  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult r;
  r.mesh = build_mesh(scn);
  std::unique_ptr<PressureTable> table;
  if (!scn.pressure_table.empty())
    table = std::make_unique<PressureTable>(
        load_pressure_table(scn.pressure_table, static_cast<Index>(r.mesh.hexes.size())));
  const Simulator sim = make_simulator(scn, r.mesh);
  sim.linear_solver();
  r.setup_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.bin_height = reservoir_cell_height(r.mesh, scn.reservoir_bottom, scn.reservoir_top);
  r.probe = probe_element(r.mesh, r.mesh.fault_index(scn.probe_fault), scn.reservoir_top, scn.reservoir_bottom);
  MarchOptions mo;
  mo.restart_path = opt.restart_path;
  mo.start = opt.start;
  mo.last_step = opt.last_step;
  mo.table = table.get();
  mo.on_step = opt.on_step;
  r.trajectory = march(scn, r.mesh, sim, mo);
  r.files = render_outputs(scn, r.mesh, r.trajectory, r.probe, r.bin_height, opt.write_vtk);
  return r;
}

inline void write_files(const std::filesystem::path &dir, const std::map<std::string, std::string> &files)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw InputError("cannot create output directory '" + dir.string() + "': " + ec.message());
  for (const auto &[name, body] : files)
  {
    std::ofstream out(dir / name, std::ios::binary);
    out << body;
    if (!out)
      throw InputError("cannot write '" + (dir / name).string() + "'");
  }
}

} // namespace faultsim
