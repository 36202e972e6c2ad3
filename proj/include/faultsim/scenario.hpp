/**
 * @file scenario.hpp
 * @brief Conceptual two-compartment reservoir: geometry, materials, faults, initial stress, schedule.
 */
#pragma once

#include "assembly.hpp"
#include "constitutive.hpp"
#include "contact.hpp"
#include "errors.hpp"
#include "mesh.hpp"
#include "pressure.hpp"
#include "solver.hpp"
#include "types.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace faultsim
{

/// Principal effective stresses proportional to depth, anchored at z_anchor; axes Cartesian.
struct InitialStress
{
  double z_anchor = -2100.0;
  double sigma_v = -25.4e6; // z
  double sigma_H = -21.1e6; // y
  double sigma_h = -18.8e6; // x
};

inline Mat3 initial_stress_at(const InitialStress &s, double z)
{
  if (z > 0.0)
    throw DomainError("initial stress requested above the ground surface");
  const double f = z / s.z_anchor;
  Mat3 sig = Mat3::Zero();
  sig(0, 0) = s.sigma_h * f;
  sig(1, 1) = s.sigma_H * f;
  sig(2, 2) = s.sigma_v * f;
  return sig;
}

/// Traction sigma n_f at the element centroid resolved in the element frame.
inline FaultTraction initial_fault_traction(const InterfaceElement &ie, const InitialStress &s)
{
  const Vec3 tg = initial_stress_at(s, ie.centroid.z()) * ie.n_f;
  return FaultTraction::from_local(ie.rotation().transpose() * tg);
}

inline VecX initial_tractions(const Mesh &mesh, const InitialStress &s)
{
  VecX t0(3 * mesh.n_interfaces());
  for (const auto &ie : mesh.interfaces)
    t0.segment<3>(3 * ie.id) = initial_fault_traction(ie, s).local();
  return t0;
}

/// Grid lines of one axis, either explicit or generated by graded_axis (optionally mirrored about 0).
struct AxisGrading
{
  std::vector<double> lines;
  std::vector<double> breakpoints;
  double fine_lo = 0.0, fine_hi = 0.0, h_fine = 0.0;
  bool mirror = false;

  std::vector<double> resolve() const
  {
    if (!lines.empty())
      return lines;
    auto g = graded_axis(breakpoints, fine_lo, fine_hi, h_fine);
    return mirror ? mirror_axis(g) : g;
  }
};

struct Scenario
{
  std::string name = "conceptual";
  int variant = 1;
  double resolution = 4.0;
  AxisGrading axis_x, axis_y, axis_z;
  std::vector<ColumnShear> shears;
  std::vector<FaultSurface> faults;
  std::vector<double> fault_dip_deg;
  std::vector<HydraulicMode> hydraulic;
  std::vector<RegionBox> regions;
  int default_region = 0;
  std::map<int, ElasticMaterial> materials;
  FrictionLaw friction;
  InitialStress stress;
  PiecewiseLinear dp_of_time;
  std::vector<double> step_times; // end time of every step, step 0 included
  std::vector<int> compartment_regions;
  std::string pressure_table; // optional path; overrides the compartment schedule
  BoundaryConditions bcs = default_boundary_conditions();
  SolverConfig solver;
  AssemblyOptions assembly;
  double reservoir_top = -2000.0;
  double reservoir_bottom = -2200.0;
  std::string probe_fault = "F1";

  DomainSpec domain_spec() const
  {
    DomainSpec d;
    d.x = axis_x.resolve();
    d.y = axis_y.resolve();
    d.z = axis_z.resolve();
    d.shears = shears;
    d.faults = faults;
    d.regions = regions;
    d.default_region = default_region;
    d.materials = materials;
    return d;
  }

  int n_steps() const { return static_cast<int>(step_times.size()); }

  void validate() const
  {
    for (const auto &[id, m] : materials)
      m.validate();
    friction.validate();
    if (step_times.empty() || step_times.front() != 0.0)
      throw InputError("schedule must start with step 0 at t = 0");
    for (std::size_t i = 1; i < step_times.size(); ++i)
      if (!(step_times[i] > step_times[i - 1]))
        throw InputError("step times must be strictly increasing");
    for (std::size_t i = 1; i < dp_of_time.points.size(); ++i)
      if (!(dp_of_time.points[i].first > dp_of_time.points[i - 1].first))
        throw InputError("pressure control times must be strictly increasing");
    if (!(resolution >= 1.0))
      throw InputError("resolution factor must be >= 1");
    if (variant != 1 && variant != 2)
      throw InputError("scenario variant must be 1 or 2");
  }
};

/// Phase name of a conceptual-model step.
inline std::string phase_of_step(int step)
{
  if (step == 0) return "initial";
  if (step <= 10) return "PP";
  if (step <= 22) return "CGI";
  if (step <= 25) return "UGS-production";
  return "UGS-injection";
}

inline FrictionLaw scenario_friction(int variant)
{
  if (variant == 1)
    return FrictionLaw::from_angles(FrictionKind::constant, 2.0e6, 30.0, 30.0, 2.0e-3);
  if (variant == 2)
    return FrictionLaw::from_angles(FrictionKind::arctan, 2.0e6, 30.0, 10.0, 2.0e-3);
  throw InputError("scenario variant must be 1 or 2");
}

enum ConceptualRegion : int
{
  overburden = 0,
  upper_zechstein = 1,
  lower_zechstein = 2,
  reservoir_west = 3,
  reservoir_east = 4,
  sideburden = 5,
  underburden = 6
};

/// Conceptual model at a resolution factor r: lateral cells 100 r m and vertical cells
/// 20 r m in the reservoir band, graded outward.
inline Scenario conceptual_scenario(double resolution = 4.0, int variant = 1)
{
  if (!(resolution >= 1.0))
    throw InputError("resolution factor must be >= 1");
  Scenario s;
  s.variant = variant;
  s.resolution = resolution;
  const double hl = 100.0 * resolution, hz = 20.0 * resolution;
  s.axis_x = {{}, {0.0, 2000.0, 4000.0, 15000.0}, 0.0, 2000.0 + hl, hl, true};
  s.axis_y = {{}, {0.0, 1000.0, 15000.0}, 0.0, 1000.0 + hl, hl, true};
  s.axis_z = {{}, {-5000.0, -3000.0, -2400.0, -2200.0, -2000.0, -1800.0, -1600.0, -1500.0, 0.0}, -2400.0, -2000.0, hz,
              false};

  const double tan10 = std::tan(deg2rad(10.0));
  s.shears.push_back({-4000.0, -2000.0, 0.0, -3000.0, -1600.0, -2100.0, -tan10});
  s.shears.push_back({0.0, 2000.0, 4000.0, -3000.0, -1600.0, -2100.0, tan10});

  s.faults = {
      {"F1", Axis::x, -2000.0, {-1000.0, -3000.0}, {1000.0, -1600.0}, 1},
      {"F2", Axis::x, 2000.0, {-1000.0, -3000.0}, {1000.0, -1600.0}, -1},
      {"F3", Axis::x, 0.0, {-1000.0, -3000.0}, {1000.0, -1600.0}, 1},
      {"F4", Axis::y, -1000.0, {-2000.0, -3000.0}, {2000.0, -1600.0}, 1},
      {"F5", Axis::y, 1000.0, {-2000.0, -3000.0}, {2000.0, -1600.0}, -1},
  };
  s.fault_dip_deg = {10.0, -10.0, 90.0, 90.0, 90.0};
  s.hydraulic.assign(5, HydraulicMode::sealing);

  const double inf = 1e300;
  s.regions = {
      {Vec3(-2000, -1000, -2200), Vec3(0, 1000, -2000), reservoir_west},
      {Vec3(0, -1000, -2200), Vec3(2000, 1000, -2000), reservoir_east},
      {Vec3(-2000, -1000, -inf), Vec3(2000, 1000, -2200), underburden},
      {Vec3(-inf, -inf, -1500), Vec3(inf, inf, inf), overburden},
      {Vec3(-inf, -inf, -1800), Vec3(inf, inf, -1500), upper_zechstein},
      {Vec3(-inf, -inf, -2200), Vec3(inf, inf, -1800), lower_zechstein},
      {Vec3(-inf, -inf, -2400), Vec3(inf, inf, -2200), sideburden},
  };
  s.default_region = underburden;

  const ElasticMaterial over{10.0e9, 0.25, 2200.0, 1.0, "Overburden"};
  const ElasticMaterial uz{35.0e9, 0.30, 2100.0, 1.0, "Upper Zechstein"};
  const ElasticMaterial lz{20.0e9, 0.30, 2100.0, 1.0, "Lower Zechstein"};
  const ElasticMaterial res{11.0e9, 0.15, 2400.0, 1.0, "Reservoir"};
  const ElasticMaterial under{30.0e9, 0.20, 2600.0, 1.0, "Underburden"};
  s.materials = {{overburden, over},  {upper_zechstein, uz}, {lower_zechstein, lz}, {reservoir_west, res},
                 {reservoir_east, res}, {sideburden, res},    {underburden, under}};

  s.friction = scenario_friction(variant);

  const double y = seconds_per_year;
  s.dp_of_time.points = {{0.0, 0.0}, {10.0 * y, -20.0e6}, {12.0 * y, 0.0}, {12.5 * y, -10.0e6}, {13.0 * y, 0.0}};
  s.step_times.push_back(0.0);
  for (int k = 1; k <= 10; ++k)
    s.step_times.push_back(k * y);
  for (int k = 1; k <= 12; ++k)
    s.step_times.push_back((10.0 + k / 6.0) * y);
  for (int k = 1; k <= 6; ++k)
    s.step_times.push_back((12.0 + k / 6.0) * y);
  s.compartment_regions = {reservoir_west, reservoir_east};
  return s;
}

inline Mesh build_mesh(const Scenario &s) { return build_structured_domain(s.domain_spec()); }

inline std::pair<Scenario, Mesh> build_conceptual_model(double resolution = 4.0, int variant = 1)
{
  Scenario s = conceptual_scenario(resolution, variant);
  Mesh m = build_mesh(s);
  return {std::move(s), std::move(m)};
}

/// Height of the vertical cells inside the reservoir band (default bin height for profiles).
inline double reservoir_cell_height(const Mesh &mesh, double z_bottom, double z_top)
{
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < mesh.grid_z.size(); ++k)
  {
    const double mid = 0.5 * (mesh.grid_z[k] + mesh.grid_z[k - 1]);
    if (mid > z_bottom && mid < z_top)
      h = std::min(h, mesh.grid_z[k] - mesh.grid_z[k - 1]);
  }
  if (!std::isfinite(h))
    throw InputError("no grid layer inside the reservoir band");
  return h;
}

inline PressureSnapshot step_pressure(const Scenario &s, const Mesh &mesh, int step,
                                      const PressureTable *table = nullptr)
{
  if (step < 0 || step >= s.n_steps())
    throw InputError("loading step " + std::to_string(step) + " out of range");
  const double t = s.step_times[step];
  if (table)
    return table->snapshot(mesh, t, s.hydraulic);
  return compartment_schedule(mesh, s.compartment_regions, s.dp_of_time, t, s.hydraulic);
}

// ---------------------------------------------------------------------------
// Configuration file (JSON)

using json = nlohmann::json;

namespace detail
{

inline Axis parse_axis(const std::string &a)
{
  if (a == "x") return Axis::x;
  if (a == "y") return Axis::y;
  if (a == "z") return Axis::z;
  throw InputError("unknown axis '" + a + "'");
}

inline const char *axis_name(Axis a) { return a == Axis::x ? "x" : (a == Axis::y ? "y" : "z"); }

inline json axis_to_json(const AxisGrading &a)
{
  if (!a.lines.empty())
    return a.lines;
  return {{"breakpoints", a.breakpoints}, {"fine_lo", a.fine_lo}, {"fine_hi", a.fine_hi}, {"h_fine", a.h_fine},
          {"mirror", a.mirror}};
}

inline AxisGrading axis_from_json(const json &j)
{
  AxisGrading a;
  if (j.is_array())
    a.lines = j.get<std::vector<double>>();
  else
  {
    a.breakpoints = j.at("breakpoints").get<std::vector<double>>();
    a.fine_lo = j.at("fine_lo").get<double>();
    a.fine_hi = j.at("fine_hi").get<double>();
    a.h_fine = j.at("h_fine").get<double>();
    a.mirror = j.value("mirror", false);
  }
  return a;
}

inline json vec3_json(const Vec3 &v)
{
  auto c = [](double x) -> json {
    if (x >= 1e299) return "inf";
    if (x <= -1e299) return "-inf";
    return x;
  };
  return json::array({c(v.x()), c(v.y()), c(v.z())});
}

inline Vec3 vec3_from(const json &j)
{
  if (!j.is_array() || j.size() != 3)
    throw InputError("expected a 3-vector");
  Vec3 v;
  for (int i = 0; i < 3; ++i)
  {
    if (j[i].is_string())
    {
      const auto s = j[i].get<std::string>();
      if (s == "inf") v(i) = 1e300;
      else if (s == "-inf") v(i) = -1e300;
      else throw InputError("bad number '" + s + "'");
    }
    else
      v(i) = j[i].get<double>();
  }
  return v;
}

} // namespace detail

inline json scenario_to_json(const Scenario &s)
{
  json j;
  j["name"] = s.name;
  j["variant"] = s.variant;
  j["resolution"] = s.resolution;
  json dom;
  dom["x"] = detail::axis_to_json(s.axis_x);
  dom["y"] = detail::axis_to_json(s.axis_y);
  dom["z"] = detail::axis_to_json(s.axis_z);
  dom["shears"] = json::array();
  for (const auto &c : s.shears)
    dom["shears"].push_back({{"x_lo", c.x_lo}, {"x_peak", c.x_peak}, {"x_hi", c.x_hi}, {"z_lo", c.z_lo},
                             {"z_hi", c.z_hi}, {"z_pivot", c.z_pivot}, {"slope", c.slope}});
  dom["regions"] = json::array();
  for (const auto &r : s.regions)
    dom["regions"].push_back({{"lo", detail::vec3_json(r.lo)}, {"hi", detail::vec3_json(r.hi)}, {"region", r.region}});
  dom["default_region"] = s.default_region;
  dom["reservoir_top"] = s.reservoir_top;
  dom["reservoir_bottom"] = s.reservoir_bottom;
  j["domain"] = dom;

  j["materials"] = json::array();
  for (const auto &[id, m] : s.materials)
    j["materials"].push_back(
        {{"region", id}, {"name", m.name}, {"E", m.E}, {"nu", m.nu}, {"rho", m.rho}, {"alpha", m.alpha}});

  j["faults"] = json::array();
  for (std::size_t i = 0; i < s.faults.size(); ++i)
  {
    const auto &f = s.faults[i];
    j["faults"].push_back({{"name", f.name},
                           {"normal_axis", detail::axis_name(f.normal_axis)},
                           {"position", f.position},
                           {"lo", f.lo},
                           {"hi", f.hi},
                           {"orientation", f.orientation},
                           {"dip_deg", i < s.fault_dip_deg.size() ? s.fault_dip_deg[i] : 90.0},
                           {"hydraulic", to_string(i < s.hydraulic.size() ? s.hydraulic[i] : HydraulicMode::sealing)}});
  }

  j["friction"] = {{"law", to_string(s.friction.kind)},
                   {"c", s.friction.c},
                   {"mu_s", s.friction.mu_s},
                   {"mu_d", s.friction.mu_d},
                   {"D_c", s.friction.D_c}};
  j["initial_stress"] = {{"z_anchor", s.stress.z_anchor},
                         {"sigma_v", s.stress.sigma_v},
                         {"sigma_H", s.stress.sigma_H},
                         {"sigma_h", s.stress.sigma_h}};
  json sched;
  sched["step_times"] = s.step_times;
  sched["pressure_points"] = json::array();
  for (const auto &[t, v] : s.dp_of_time.points)
    sched["pressure_points"].push_back({t, v});
  sched["compartment_regions"] = s.compartment_regions;
  sched["pressure_table"] = s.pressure_table;
  j["schedule"] = sched;

  j["boundary"] = json::array();
  for (const auto &b : s.bcs)
    j["boundary"].push_back({{"node_set", b.node_set}, {"fixed", b.fixed}, {"value", b.value}});

  const auto &c = s.solver;
  j["solver"] = {{"newton_tol", c.newton_tol},
                 {"newton_max", c.newton_max},
                 {"activeset_max", c.activeset_max},
                 {"ls_tol", c.ls_tol},
                 {"line_search_factor", c.ls_factor},
                 {"line_search_max_cuts", c.ls_max_cuts},
                 {"tol_t", c.contact.tol_t},
                 {"tol_tau", c.contact.tol_tau},
                 {"tol_gap", c.contact.tol_gap},
                 {"p_ref", c.contact.p_ref},
                 {"stabilization_beta", s.assembly.beta}};
  j["outputs"] = {{"probe_fault", s.probe_fault}};
  return j;
}

inline Scenario scenario_from_json(const json &j)
{
  try
  {
    Scenario s;
    s.name = j.value("name", std::string("custom"));
    s.variant = j.value("variant", 1);
    s.resolution = j.value("resolution", 1.0);
    const auto &dom = j.at("domain");
    s.axis_x = detail::axis_from_json(dom.at("x"));
    s.axis_y = detail::axis_from_json(dom.at("y"));
    s.axis_z = detail::axis_from_json(dom.at("z"));
    for (const auto &c : dom.value("shears", json::array()))
      s.shears.push_back({c.at("x_lo"), c.at("x_peak"), c.at("x_hi"), c.at("z_lo"), c.at("z_hi"), c.at("z_pivot"),
                          c.at("slope")});
    for (const auto &r : dom.value("regions", json::array()))
      s.regions.push_back({detail::vec3_from(r.at("lo")), detail::vec3_from(r.at("hi")), r.at("region").get<int>()});
    s.default_region = dom.value("default_region", 0);
    s.reservoir_top = dom.value("reservoir_top", s.reservoir_top);
    s.reservoir_bottom = dom.value("reservoir_bottom", s.reservoir_bottom);

    for (const auto &m : j.at("materials"))
    {
      ElasticMaterial mat{m.at("E"), m.at("nu"), m.value("rho", 2000.0), m.value("alpha", 1.0),
                          m.value("name", std::string())};
      mat.validate();
      s.materials[m.at("region").get<int>()] = mat;
    }

    s.faults.clear();
    s.fault_dip_deg.clear();
    s.hydraulic.clear();
    for (const auto &f : j.at("faults"))
    {
      FaultSurface fs;
      fs.name = f.at("name");
      fs.normal_axis = detail::parse_axis(f.at("normal_axis"));
      fs.position = f.at("position");
      fs.lo = f.at("lo").get<std::array<double, 2>>();
      fs.hi = f.at("hi").get<std::array<double, 2>>();
      fs.orientation = f.value("orientation", 1);
      s.faults.push_back(fs);
      s.fault_dip_deg.push_back(f.value("dip_deg", 90.0));
      s.hydraulic.push_back(parse_hydraulic_mode(f.value("hydraulic", std::string("sealing"))));
    }

    const auto &fr = j.at("friction");
    s.friction.kind = parse_friction_kind(fr.at("law").get<std::string>());
    s.friction.c = fr.at("c");
    if (fr.contains("phi_s_deg"))
    {
      s.friction.mu_s = std::tan(deg2rad(fr.at("phi_s_deg").get<double>()));
      s.friction.mu_d = std::tan(deg2rad(fr.value("phi_d_deg", fr.at("phi_s_deg").get<double>())));
    }
    else
    {
      s.friction.mu_s = fr.at("mu_s");
      s.friction.mu_d = fr.value("mu_d", s.friction.mu_s);
    }
    s.friction.D_c = fr.value("D_c", 1.0);

    if (j.contains("initial_stress"))
    {
      const auto &st = j.at("initial_stress");
      s.stress = {st.at("z_anchor"), st.at("sigma_v"), st.at("sigma_H"), st.at("sigma_h")};
    }

    const auto &sc = j.at("schedule");
    s.step_times = sc.at("step_times").get<std::vector<double>>();
    s.dp_of_time.points.clear();
    for (const auto &p : sc.value("pressure_points", json::array()))
      s.dp_of_time.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    s.compartment_regions = sc.value("compartment_regions", std::vector<int>{});
    s.pressure_table = sc.value("pressure_table", std::string());

    if (j.contains("boundary"))
    {
      s.bcs.clear();
      for (const auto &b : j.at("boundary"))
      {
        BoundaryCondition bc;
        bc.node_set = b.at("node_set");
        if (b.contains("fixed"))
          bc.fixed = b.at("fixed").get<std::array<bool, 3>>();
        if (b.contains("value"))
          bc.value = b.at("value").get<std::array<double, 3>>();
        s.bcs.push_back(bc);
      }
    }

    if (j.contains("solver"))
    {
      const auto &c = j.at("solver");
      s.solver.newton_tol = c.value("newton_tol", s.solver.newton_tol);
      s.solver.newton_max = c.value("newton_max", s.solver.newton_max);
      s.solver.activeset_max = c.value("activeset_max", s.solver.activeset_max);
      s.solver.ls_tol = c.value("ls_tol", s.solver.ls_tol);
      s.solver.ls_factor = c.value("line_search_factor", s.solver.ls_factor);
      s.solver.ls_max_cuts = c.value("line_search_max_cuts", s.solver.ls_max_cuts);
      s.solver.contact.tol_t = c.value("tol_t", s.solver.contact.tol_t);
      s.solver.contact.tol_tau = c.value("tol_tau", s.solver.contact.tol_tau);
      s.solver.contact.tol_gap = c.value("tol_gap", s.solver.contact.tol_gap);
      s.solver.contact.p_ref = c.value("p_ref", s.solver.contact.p_ref);
      s.assembly.beta = c.value("stabilization_beta", s.assembly.beta);
      if (!(s.solver.newton_tol > 0 && s.solver.newton_tol < 1 && s.solver.ls_tol > 0 && s.solver.ls_tol < 1 &&
            s.solver.newton_max > 0 && s.solver.activeset_max > 0 && s.assembly.beta >= 0))
        throw InputError("solver section: tolerances must lie in (0, 1) and counts must be positive");
    }
    if (j.contains("outputs"))
      s.probe_fault = j.at("outputs").value("probe_fault", s.probe_fault);
    s.validate();
    return s;
  }
  catch (const json::exception &e)
  {
    throw InputError(std::string("configuration: ") + e.what());
  }
}

inline Scenario load_scenario(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
    throw InputError("cannot open configuration '" + path + "'");
  json j;
  try
  {
    in >> j;
  }
  catch (const json::exception &e)
  {
    throw InputError("configuration '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

} // namespace faultsim
