#include <faultsim/invariants.hpp>
#include <faultsim/scenario.hpp>

#include <gtest/gtest.h>

using namespace faultsim;

namespace
{

SolutionState single(const ContactStatus st, const FaultTraction &t, const FaultKinematics &k)
{
  SolutionState s;
  s.contact.resize(1);
  s.contact[0].status = st;
  s.contact[0].traction = t;
  s.contact[0].kinematics = k;
  return s;
}

const FrictionLaw law = FrictionLaw::from_angles(FrictionKind::constant, 0.0, 30.0, 30.0, 1.0);

} // namespace

TEST(Jacobian, ExactOnMixedStates)
{
  const auto rep = jacobian_check();
  EXPECT_LE(rep.dofs, 500);
  EXPECT_GT(rep.n_stick, 0u);
  EXPECT_GT(rep.n_slip, 0u);
  EXPECT_GT(rep.n_open, 0u);
  EXPECT_EQ(rep.errors.size(), 20u);
  EXPECT_LE(rep.worst, 1e-5);
  EXPECT_TRUE(jacobian_suite().pass);
}

TEST(Jacobian, WrongFrictionDerivativeDetected)
{
  JacobianCheckOptions opt;
  opt.derivative_scale = 2.0;
  const auto r = jacobian_suite(opt);
  EXPECT_FALSE(r.pass);
  EXPECT_GT(r.metric, 1e-5);
}

TEST(Kkt, ConsistentStatesPass)
{
  const double tau = 1e7 * std::tan(deg2rad(30.0));
  FaultKinematics slipping;
  slipping.dg_T = Vec2(1e-3, 0.0);
  FaultKinematics open;
  open.g_N = 1e-3;
  const auto r = kkt_check({single(ContactStatus::stick, {-1e7, Vec2(1e6, 0)}, {}),
                            single(ContactStatus::slip, {-1e7, Vec2(tau, 0)}, slipping),
                            single(ContactStatus::open, {0.0, Vec2::Zero()}, open)},
                           law);
  EXPECT_TRUE(r.pass) << r.first_violation;
  EXPECT_EQ(r.states, 3u);
  EXPECT_NEAR(r.max_coulomb_ratio, 1.0, 1e-12);
}

TEST(Kkt, EachViolationDetected)
{
  const double tau = 1e7 * std::tan(deg2rad(30.0));
  FaultKinematics k;
  EXPECT_FALSE(kkt_check({single(ContactStatus::open, {1.0, Vec2::Zero()}, k)}, law).pass);
  k.g_N = -1e-9;
  EXPECT_FALSE(kkt_check({single(ContactStatus::stick, {-1e7, Vec2::Zero()}, k)}, law).pass);
  k.g_N = 1e-12;
  EXPECT_FALSE(kkt_check({single(ContactStatus::stick, {-1e7, Vec2::Zero()}, k)}, law).pass);
  k.g_N = 0.0;
  EXPECT_FALSE(kkt_check({single(ContactStatus::stick, {-1e7, Vec2(tau * (1 + 1e-5), 0)}, k)}, law).pass);
  k.dg_T = Vec2(1e-3, 1e-5);
  const auto r = kkt_check({single(ContactStatus::slip, {-1e7, Vec2(tau, 0)}, k)}, law);
  EXPECT_FALSE(r.pass);
  EXPECT_NE(r.first_violation.find("alignment"), std::string::npos);
  // a vanishing increment has no direction to check
  k.dg_T = Vec2(1e-12, 1e-12);
  EXPECT_TRUE(kkt_check({single(ContactStatus::slip, {-1e7, Vec2(tau, 0)}, k)}, law).pass);
}

TEST(Symmetry, DistanceOfProfiles)
{
  const ChiProfile a{0, 1, {-1.0, -2.0}, {0.1, 0.2}};
  ChiProfile b = a;
  EXPECT_EQ(profile_distance(a, b), 0.0);
  b.chi_mean[1] = 0.25;
  EXPECT_NEAR(profile_distance(a, b), 0.05, 1e-15);
  b.z.pop_back();
  EXPECT_TRUE(std::isinf(profile_distance(a, b)));
}

TEST(Symmetry, ConceptualInitialStateIsSymmetric)
{
  const auto [scn, mesh] = build_conceptual_model(8.0, 1);
  const Simulator sim(mesh, scn.bcs, scn.friction, initial_tractions(mesh, scn.stress));
  const auto r = symmetry_suite(mesh, {sim.initial_state()}, scn.friction, reservoir_cell_height(mesh, -2200, -2000));
  EXPECT_TRUE(r.pass) << r.detail;
}
