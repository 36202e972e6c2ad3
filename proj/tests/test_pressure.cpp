#include <faultsim/pressure.hpp>
#include <faultsim/scenario.hpp>

#include <gtest/gtest.h>

#include <sstream>

using namespace faultsim;

TEST(FaultPressure, SealingIsZero)
{
  EXPECT_EQ(fault_pressure(HydraulicMode::sealing, -5e6, -3e6), 0.0);
}

TEST(FaultPressure, NonSealingIsSideMean)
{
  EXPECT_DOUBLE_EQ(fault_pressure(HydraulicMode::non_sealing, -5e6, -3e6), -4e6);
  EXPECT_DOUBLE_EQ(fault_pressure(HydraulicMode::non_sealing, -5e6, 0.0), -2.5e6);
}

TEST(FaultPressure, MissingSideRejected)
{
  EXPECT_THROW(fault_pressure(HydraulicMode::non_sealing, std::nullopt, 1.0), InputError);
  EXPECT_THROW(fault_pressure(HydraulicMode::sealing, 1.0, std::nullopt), InputError);
}

TEST(FaultPressure, ModeNames)
{
  EXPECT_EQ(parse_hydraulic_mode("sealing"), HydraulicMode::sealing);
  EXPECT_EQ(parse_hydraulic_mode(to_string(HydraulicMode::non_sealing)), HydraulicMode::non_sealing);
  EXPECT_THROW(parse_hydraulic_mode("leaky"), InputError);
}

TEST(PiecewiseLinear, InterpolatesAndClamps)
{
  PiecewiseLinear f{{{0.0, 0.0}, {10.0, -20.0}, {12.0, 0.0}}};
  EXPECT_DOUBLE_EQ(f(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(f(5.0), -10.0);
  EXPECT_DOUBLE_EQ(f(10.0), -20.0);
  EXPECT_DOUBLE_EQ(f(11.0), -10.0);
  EXPECT_DOUBLE_EQ(f(30.0), 0.0);
  EXPECT_DOUBLE_EQ(PiecewiseLinear{}(3.0), 0.0);
}

TEST(Schedule, ConceptualPressureHistory)
{
  const auto s = conceptual_scenario(8.0, 1);
  ASSERT_EQ(s.n_steps(), 29);
  // PP: -2 MPa per year for 10 years
  for (int k = 0; k <= 10; ++k)
    EXPECT_NEAR(s.dp_of_time(s.step_times[k]), -2.0e6 * k, 1e-3);
  // CGI: back to 0 over 2 years in 12 steps
  for (int k = 11; k <= 22; ++k)
    EXPECT_NEAR(s.dp_of_time(s.step_times[k]), -20.0e6 + 20.0e6 * (k - 10) / 12.0, 1e-3);
  // UGS: down to -10 MPa in 3 steps, back up in 3
  const double ugs[] = {-10.0e6 / 3, -20.0e6 / 3, -10.0e6, -20.0e6 / 3, -10.0e6 / 3, 0.0};
  for (int k = 23; k <= 28; ++k)
    EXPECT_NEAR(s.dp_of_time(s.step_times[k]), ugs[k - 23], 1e-3);
  EXPECT_EQ(phase_of_step(10), "PP");
  EXPECT_EQ(phase_of_step(11), "CGI");
  EXPECT_EQ(phase_of_step(25), "UGS-production");
  EXPECT_EQ(phase_of_step(26), "UGS-injection");
}

TEST(Schedule, CompartmentsOnlyAndSealedFaults)
{
  const auto [s, m] = build_conceptual_model(8.0, 1);
  const auto snap = step_pressure(s, m, 5);
  int loaded = 0;
  for (const auto &h : m.hexes)
  {
    const bool res = h.region_id == reservoir_west || h.region_id == reservoir_east;
    EXPECT_DOUBLE_EQ(snap.cell_dp[h.id], res ? -10.0e6 : 0.0);
    loaded += res;
  }
  EXPECT_GT(loaded, 0);
  for (double f : snap.fault_dp)
    EXPECT_EQ(f, 0.0);
  EXPECT_THROW(step_pressure(s, m, 29), InputError);
}

TEST(Schedule, NonSealingFaultSeesMeanOfSides)
{
  auto [s, m] = build_conceptual_model(8.0, 1);
  s.hydraulic.assign(5, HydraulicMode::non_sealing);
  const auto snap = step_pressure(s, m, 10);
  const int f3 = m.fault_index("F3"), f1 = m.fault_index("F1");
  for (const auto &ie : m.interfaces)
  {
    const double a = snap.cell_dp[ie.neighbor_cells[0]], b = snap.cell_dp[ie.neighbor_cells[1]];
    EXPECT_DOUBLE_EQ(snap.fault_dp[ie.id], 0.5 * (a + b));
    const bool in_res = ie.centroid.z() < -2000.0 && ie.centroid.z() > -2200.0;
    if (ie.fault_id == f3 && in_res)
    {
      EXPECT_DOUBLE_EQ(snap.fault_dp[ie.id], -20.0e6);
    }
    if (ie.fault_id == f1 && in_res)
    {
      EXPECT_DOUBLE_EQ(snap.fault_dp[ie.id], -10.0e6);
    }
  }
}

TEST(Table, ParseAndInterpolate)
{
  std::istringstream in("cell_id,time_s,dp_pa\n3,0,0\n3,10,-1e6\r\n\n7,0,5\n");
  const auto t = parse_pressure_table(in, 10);
  EXPECT_DOUBLE_EQ(t.cell_dp(3, 5.0), -0.5e6);
  EXPECT_DOUBLE_EQ(t.cell_dp(7, 100.0), 5.0);
  EXPECT_DOUBLE_EQ(t.cell_dp(4, 1.0), 0.0);
}

TEST(Table, Errors)
{
  auto parse = [](const std::string &s, Index n = -1) {
    std::istringstream in(s);
    return parse_pressure_table(in, n);
  };
  EXPECT_THROW(parse(""), InputError);
  EXPECT_THROW(parse("cell,time,dp\n"), InputError);
  EXPECT_THROW(parse("cell_id,time_s,dp_pa\n1,2\n"), InputError);
  EXPECT_THROW(parse("cell_id,time_s,dp_pa\n1,x,3\n"), InputError);
  EXPECT_THROW(parse("cell_id,time_s,dp_pa\n1.5,0,3\n"), InputError);
  EXPECT_THROW(parse("cell_id,time_s,dp_pa\n-1,0,3\n"), InputError);
  EXPECT_THROW(parse("cell_id,time_s,dp_pa\n1,5,3\n1,5,4\n"), InputError);
  EXPECT_THROW(parse("cell_id,time_s,dp_pa\n12,0,3\n", 10), InputError);
  EXPECT_THROW(load_pressure_table("/nonexistent/table.csv"), InputError);
}

TEST(Table, RoundTripReproducesSchedule)
{
  const auto [s, m] = build_conceptual_model(8.0, 1);
  std::vector<PressureSnapshot> snaps;
  for (int k = 0; k < s.n_steps(); ++k)
    snaps.push_back(step_pressure(s, m, k));
  std::stringstream io;
  write_pressure_table(io, s.step_times, snaps);
  const auto table = parse_pressure_table(io, static_cast<Index>(m.hexes.size()));
  for (int k = 0; k < s.n_steps(); ++k)
  {
    const auto from_table = step_pressure(s, m, k, &table);
    EXPECT_EQ(from_table.cell_dp, snaps[k].cell_dp) << "step " << k;
    EXPECT_EQ(from_table.fault_dp, snaps[k].fault_dp);
  }
}
