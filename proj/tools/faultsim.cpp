/**
 * @file faultsim.cpp
 * @brief Command-line entry point: scenario runs, spring-slider curves and invariant checks.
 */
#include <faultsim/faultsim.hpp>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace faultsim;

namespace
{

constexpr const char *faultsim_version = "1.0.0";

enum ExitCode : int
{
  exit_ok = 0,
  exit_usage = 2,
  exit_solver = 3,
  exit_invariant = 4
};

std::string sha256(const std::string &data)
{
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw Error("SHA-256 digest failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i)
    hex += fmt::format("{:02x}", md[i]);
  return hex;
}

fs::path output_root(const std::string &flag)
{
  if (!flag.empty())
    return flag;
  if (const char *env = std::getenv("FAULTSIM_OUT"); env && *env)
    return env;
  return "faultsim_out";
}

struct RunArgs
{
  std::string scenario = "conceptual";
  int variant = 1;
  double resolution = 4.0;
  int threads = 1;
  std::string out;
  std::string pressure_table;
  std::vector<std::string> hydraulic;
  std::string restart;
  int last_step = -1;
  bool vtk = true;
  bool quiet = false;
};

Scenario scenario_from(const RunArgs &a)
{
  Scenario s = a.scenario == "conceptual" ? conceptual_scenario(a.resolution, a.variant) : load_scenario(a.scenario);
  if (!a.pressure_table.empty())
    s.pressure_table = a.pressure_table;
  for (const auto &h : a.hydraulic)
  {
    const auto eq = h.find('=');
    if (eq == std::string::npos)
      throw InputError("--hydraulic-mode expects fault=sealing|non_sealing, got '" + h + "'");
    const std::string key = h.substr(0, eq);
    const HydraulicMode mode = parse_hydraulic_mode(h.substr(eq + 1));
    int id = -1;
    for (std::size_t i = 0; i < s.faults.size(); ++i)
      if (s.faults[i].name == key || std::to_string(i) == key)
        id = static_cast<int>(i);
    if (id < 0)
      throw InputError("--hydraulic-mode: unknown fault '" + key + "'");
    s.hydraulic.resize(s.faults.size(), HydraulicMode::sealing);
    s.hydraulic[id] = mode;
  }
  s.validate();
  return s;
}

int cmd_run(const RunArgs &a)
{
  Eigen::setNbThreads(a.threads);
  const Scenario scn = scenario_from(a);
  const fs::path out = output_root(a.out);
  fs::create_directories(out);
  const nlohmann::json cfg = scenario_to_json(scn);
  {
    std::ofstream f(out / "scenario.json");
    f << cfg.dump(2) << '\n';
  }

  PipelineOptions opt;
  opt.restart_path = (out / "restart.bin").string();
  opt.last_step = a.last_step;
  opt.write_vtk = a.vtk;
  if (!a.restart.empty())
    opt.start = read_checkpoint(a.restart);
  if (!a.quiet)
    opt.on_step = [](const SolutionState &s, const StepReport &r) {
      std::size_t newton = 0;
      for (const auto &n : r.newton)
        newton += static_cast<std::size_t>(n.iterations);
      int slip = 0, open = 0;
      for (const auto &c : s.contact)
      {
        slip += c.status == ContactStatus::slip;
        open += c.status == ContactStatus::open;
      }
      std::fprintf(stderr, "step %2d %-15s active-set %d newton %zu slip %d open %d\n", s.step,
                   phase_of_step(s.step).c_str(), r.activeset_iterations, newton, slip, open);
    };

  const auto t0 = std::chrono::steady_clock::now();
  PipelineResult res;
  try
  {
    res = run_pipeline(scn, opt);
  }
  catch (const MarchError &e)
  {
    std::fprintf(stderr, "error: %s\n", e.what());
    std::fprintf(stderr, "restart file: %s\n", e.restart_file.c_str());
    return exit_solver;
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_files(out, res.files);
  write_checkpoint((out / "final_state.bin").string(), res.trajectory.states.back());

  nlohmann::json manifest;
  manifest["tool"] = {{"name", "faultsim"}, {"version", faultsim_version}};
  manifest["versions"] = {{"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION,
                                                EIGEN_MINOR_VERSION)},
                          {"fmt", FMT_VERSION},
                          {"compiler", __VERSION__}};
  manifest["inputs"] = {{"scenario_sha256", sha256(cfg.dump())},
                        {"scenario", a.scenario},
                        {"variant", scn.variant},
                        {"resolution", scn.resolution},
                        {"threads", a.threads},
                        {"restart", a.restart}};
  manifest["mesh"] = {{"nodes", res.mesh.n_nodes()},
                      {"hexahedra", res.mesh.hexes.size()},
                      {"interface_elements", res.mesh.n_interfaces()}};
  manifest["timings_s"] = {{"setup", res.setup_seconds}, {"march", res.trajectory.seconds}, {"total", total}};
  nlohmann::json files = nlohmann::json::object();
  std::string all;
  for (const auto &[name, body] : res.files)
  {
    const std::string h = sha256(body);
    files[name] = h;
    all += name + ':' + h + '\n';
  }
  manifest["outputs"] = files;
  manifest["outputs_sha256"] = sha256(all);
  {
    std::ofstream f(out / "manifest.json");
    f << manifest.dump(2) << '\n';
  }
  std::printf("%zu steps in %.1f s, outputs in %s (outputs_sha256 %s)\n", res.trajectory.states.size() - 1, total,
              out.string().c_str(), manifest["outputs_sha256"].get<std::string>().c_str());
  return exit_ok;
}

struct SpringArgs
{
  std::string law = "all";
  double Dc = 2.0e-3;
  double phi_s = 30.0;
  double phi_d = 10.0;
  double K = 11.0e9;
  double N = 3.0e7;
  std::string out;
};

int cmd_spring1d(const SpringArgs &a)
{
  std::vector<FrictionKind> kinds;
  if (a.law == "all")
    kinds = {FrictionKind::linear, FrictionKind::exponential, FrictionKind::arctan};
  else
    kinds = {parse_friction_kind(a.law)};
  const fs::path out = output_root(a.out);
  fs::create_directories(out);
  for (auto kind : kinds)
  {
    SpringSliderConfig cfg;
    cfg.K = a.K;
    cfg.N = a.N;
    cfg.law = FrictionLaw::from_angles(kind, 0.0, a.phi_s, a.phi_d, a.Dc);
    cfg.d_schedule = spring_schedule();
    const auto samples = simulate(cfg);
    const fs::path file = out / fmt::format("spring1d_{}.csv", to_string(kind));
    std::ofstream f(file);
    write_spring1d_csv(f, samples);
    double peak = 0.0, kmin = 0.0;
    for (const auto &p : samples)
    {
      peak = std::max(peak, p.F);
      kmin = std::min(kmin, p.K_bar);
    }
    std::printf("%-11s peak %.8e N, residual %.8e N, min stiffness %.5e N/m (closed form %.5e), %s\n",
                std::string(to_string(kind)).c_str(), peak, samples.back().F, kmin, analytic_min_stiffness(cfg),
                file.string().c_str());
  }
  return exit_ok;
}

struct CheckArgs
{
  double resolution = 8.0;
  int variant = 1;
  double derivative_scale = 1.0;
  std::uint64_t seed = 20240601;
};

int cmd_check(const CheckArgs &a)
{
  std::vector<SuiteResult> results;
  JacobianCheckOptions jo;
  jo.derivative_scale = a.derivative_scale;
  jo.seed = a.seed;
  results.push_back(jacobian_suite(jo));

  const Scenario scn = conceptual_scenario(a.resolution, a.variant);
  PipelineOptions po;
  po.write_vtk = false;
  const auto res = run_pipeline(scn, po);
  results.push_back(kkt_suite(res.trajectory.states, scn.friction));
  results.push_back(symmetry_suite(res.mesh, res.trajectory.states, scn.friction, res.bin_height));

  bool ok = true;
  for (const auto &r : results)
  {
    std::printf("%-4s %-9s %8.2f s  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds, r.detail.c_str());
    ok = ok && r.pass;
  }
  return ok ? exit_ok : exit_invariant;
}

int cmd_dump(const RunArgs &a)
{
  std::cout << scenario_to_json(scenario_from(a)).dump(2) << '\n';
  return exit_ok;
}

} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Quasi-static frictional contact on faults in a pressurized reservoir"};
  app.require_subcommand(1);
  app.set_version_flag("--version", faultsim_version);

  RunArgs run;
  auto *run_cmd = app.add_subcommand("run", "March a scenario and write profiles, paths, VTK and a manifest");
  run_cmd->add_option("--scenario", run.scenario, "'conceptual' or a JSON configuration file")->required();
  run_cmd->add_option("--variant", run.variant, "Conceptual scenario variant (1 or 2)")->check(CLI::IsMember({1, 2}));
  run_cmd->add_option("--resolution", run.resolution, "Resolution factor r (cells 100r x 100r x 20r m)")
      ->check(CLI::Range(1.0, 1000.0));
  run_cmd->add_option("--threads", run.threads, "Threads for dense kernels (1 keeps runs reproducible)")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--out", run.out, "Output directory (default $FAULTSIM_OUT or ./faultsim_out)");
  run_cmd->add_option("--pressure-table", run.pressure_table, "Per-cell pressure table (cell_id,time_s,dp_pa)");
  run_cmd->add_option("--hydraulic-mode", run.hydraulic, "fault=sealing|non_sealing, by name or index");
  run_cmd->add_option("--restart", run.restart, "Resume from a checkpoint file")->check(CLI::ExistingFile);
  run_cmd->add_option("--last-step", run.last_step, "Stop after this loading step");
  run_cmd->add_flag("!--no-vtk", run.vtk, "Skip VTK output");
  run_cmd->add_flag("--quiet", run.quiet, "No per-step progress");

  SpringArgs spring;
  auto *spring_cmd = app.add_subcommand("spring1d", "Spring-slider force-displacement curves");
  spring_cmd->add_option("--law", spring.law, "linear, exponential, arctan or all")
      ->check(CLI::IsMember({"all", "linear", "exponential", "arctan"}));
  spring_cmd->add_option("--Dc", spring.Dc, "Weakening distance [m]");
  spring_cmd->add_option("--phi-s", spring.phi_s, "Static friction angle [deg]");
  spring_cmd->add_option("--phi-d", spring.phi_d, "Dynamic friction angle [deg]");
  spring_cmd->add_option("--K", spring.K, "Spring stiffness [N/m]");
  spring_cmd->add_option("--N", spring.N, "Normal load [N]");
  spring_cmd->add_option("--out", spring.out, "Output directory (default $FAULTSIM_OUT or ./faultsim_out)");

  CheckArgs check;
  auto *check_cmd = app.add_subcommand("check", "Jacobian, KKT and symmetry suites on the conceptual model");
  check_cmd->add_option("--resolution", check.resolution, "Resolution factor of the conceptual model")
      ->check(CLI::Range(1.0, 1000.0));
  check_cmd->add_option("--variant", check.variant, "Scenario variant (1 or 2)")->check(CLI::IsMember({1, 2}));
  check_cmd->add_option("--seed", check.seed, "Seed of the random Jacobian directions");
  check_cmd->add_option("--jacobian-derivative-scale", check.derivative_scale,
                        "Scale the friction derivative in the Jacobian (negative control)");

  RunArgs dump;
  auto *dump_cmd = app.add_subcommand("dump-scenario", "Print a scenario as a JSON configuration");
  dump_cmd->add_option("--scenario", dump.scenario, "'conceptual' or a JSON configuration file");
  dump_cmd->add_option("--variant", dump.variant, "Conceptual scenario variant")->check(CLI::IsMember({1, 2}));
  dump_cmd->add_option("--resolution", dump.resolution, "Resolution factor")->check(CLI::Range(1.0, 1000.0));
  dump_cmd->add_option("--pressure-table", dump.pressure_table, "Per-cell pressure table");
  dump_cmd->add_option("--hydraulic-mode", dump.hydraulic, "fault=sealing|non_sealing");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_usage;
  }

  try
  {
    if (*run_cmd)
      return cmd_run(run);
    if (*spring_cmd)
      return cmd_spring1d(spring);
    if (*check_cmd)
      return cmd_check(check);
    if (*dump_cmd)
      return cmd_dump(dump);
  }
  catch (const SolverError &e)
  {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return exit_solver;
  }
  catch (const Error &e)
  {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_usage;
  }
  catch (const fs::filesystem_error &e)
  {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_usage;
  }
  return exit_usage;
}
