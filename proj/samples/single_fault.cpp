/**
 * @file single_fault.cpp
 * @brief Marches a scenario through depletion and prints the stress path of its probe element.
 */
#include <faultsim/faultsim.hpp>

#include <cstdio>
#include <string>

int main(int argc, char **argv)
{
  using namespace faultsim;
  const Scenario scn = argc > 1 ? load_scenario(argv[1]) : conceptual_scenario(16.0, 1);
  PipelineOptions opt;
  opt.write_vtk = false;
  opt.last_step = 12;
  const PipelineResult res = run_pipeline(scn, opt);

  const auto &last = res.trajectory.states.back();
  std::printf("%zu hexahedra, %ld interface elements, %d steps in %.2f s\n", res.mesh.hexes.size(),
              static_cast<long>(res.mesh.n_interfaces()), last.step, res.trajectory.seconds);
  for (const auto &p : stress_path(res.probe, res.trajectory.states, scn.friction))
    std::printf("step %2d  t_N %8.2f MPa  |t_T| %6.2f MPa  bound %6.2f MPa  %s\n", p.step, 1e-6 * p.t_N,
                1e-6 * p.t_T, 1e-6 * p.tau_max, std::string(to_string(p.status)).c_str());
  return 0;
}
