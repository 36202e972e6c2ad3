#include <faultsim/constitutive.hpp>
#include <faultsim/contact.hpp>

#include <gtest/gtest.h>

using namespace faultsim;

namespace
{

FrictionLaw law_of(FrictionKind k) { return FrictionLaw::from_angles(k, 0.0, 30.0, 10.0, 2.0e-3); }

} // namespace

TEST(Elastic, LameParameters)
{
  ElasticMaterial m{10.0e9, 0.25, 2000.0, 1.0, "rock"};
  EXPECT_NEAR(m.lame_lambda(), 4.0e9, 1.0);
  EXPECT_NEAR(m.shear_modulus(), 4.0e9, 1.0);
  EXPECT_NEAR(m.bulk_modulus(), 10.0e9 / 3.0 / 0.5, 1.0);
}

TEST(Elastic, IncompressibleRejected)
{
  ElasticMaterial m{10.0e9, 0.5, 2000.0, 1.0, "rubber"};
  EXPECT_THROW(m.validate(), DomainError);
}

TEST(Elastic, StressOfUniaxialStrain)
{
  ElasticMaterial m{10.0e9, 0.25, 2000.0, 1.0, "rock"};
  const auto C = stiffness_tensor(m);
  Mat3 eps = Mat3::Zero();
  eps(2, 2) = -1e-4;
  const Mat3 s = C.apply(eps);
  EXPECT_NEAR(s(2, 2), -(4.0e9 + 8.0e9) * 1e-4, 1e-3);
  EXPECT_NEAR(s(0, 0), -4.0e9 * 1e-4, 1e-3);
  // a pore pressure rise makes the total stress more tensile by alpha p on the diagonal
  const Mat3 se = effective_stress(C, eps, 0.8, 1.0e6);
  EXPECT_NEAR(se(0, 0) - s(0, 0), -0.8e6, 1e-6);
  EXPECT_NEAR(se(0, 1), 0.0, 1e-9);
}

TEST(Friction, CoefficientsAtOneMillimetre)
{
  EXPECT_NEAR(friction_coefficient(law_of(FrictionKind::constant), 1e-3), 0.577350269189626, 1e-14);
  EXPECT_NEAR(friction_coefficient(law_of(FrictionKind::linear), 1e-3), 0.376838624949045, 1e-14);
  EXPECT_NEAR(friction_coefficient(law_of(FrictionKind::exponential), 1e-3), 0.419559900431073, 1e-14);
  EXPECT_NEAR(friction_coefficient(law_of(FrictionKind::arctan), 1e-3), 0.45898133383738, 1e-13);
}

TEST(Friction, EndPoints)
{
  for (auto k : {FrictionKind::linear, FrictionKind::exponential, FrictionKind::arctan})
  {
    const auto law = law_of(k);
    EXPECT_DOUBLE_EQ(friction_coefficient(law, 0.0), law.mu_s);
  }
  EXPECT_DOUBLE_EQ(friction_coefficient(law_of(FrictionKind::linear), 5e-3), std::tan(deg2rad(10.0)));
  EXPECT_NEAR(friction_coefficient(law_of(FrictionKind::exponential), 1.0), std::tan(deg2rad(10.0)), 1e-15);
}

TEST(Friction, InitialSlopes)
{
  EXPECT_NEAR(friction_derivative(law_of(FrictionKind::linear), 0.0), -200.5116442, 1e-6);
  EXPECT_NEAR(friction_derivative(law_of(FrictionKind::exponential), 0.0), -200.5116442, 1e-6);
  EXPECT_NEAR(friction_derivative(law_of(FrictionKind::arctan), 0.0), -127.6496773, 1e-6);
  EXPECT_EQ(friction_derivative(law_of(FrictionKind::constant), 0.0), 0.0);
}

TEST(Friction, DerivativeMatchesCentralDifference)
{
  for (auto k : {FrictionKind::exponential, FrictionKind::arctan, FrictionKind::linear})
  {
    const auto law = law_of(k);
    for (double s : {1e-4, 7e-4, 1.3e-3, 3e-3, 1e-2})
    {
      if (k == FrictionKind::linear && std::abs(s - law.D_c) < 1e-6)
        continue;
      const double h = 1e-8;
      const double fd = (friction_coefficient(law, s + h) - friction_coefficient(law, s - h)) / (2 * h);
      EXPECT_NEAR(friction_derivative(law, s), fd, 1e-5 * std::max(1.0, std::abs(fd))) << to_string(k) << ' ' << s;
    }
  }
}

TEST(Friction, NegativeSlipRejected)
{
  EXPECT_THROW(friction_coefficient(law_of(FrictionKind::arctan), -1e-9), DomainError);
}

TEST(Friction, InvalidParameters)
{
  auto law = law_of(FrictionKind::arctan);
  law.D_c = 0.0;
  EXPECT_THROW(law.validate(), InputError);
  law = law_of(FrictionKind::linear);
  std::swap(law.mu_s, law.mu_d);
  EXPECT_THROW(law.validate(), InputError);
  EXPECT_THROW(parse_friction_kind("cubic"), InputError);
  EXPECT_EQ(parse_friction_kind("arctan"), FrictionKind::arctan);
}

TEST(Coulomb, StrengthOnCompressedSurface)
{
  const auto law = FrictionLaw::from_angles(FrictionKind::constant, 2.0e6, 30.0, 30.0, 1.0);
  EXPECT_NEAR(tau_max(law, -20.0e6, 0.0), 13547005.38, 0.01);
  EXPECT_DOUBLE_EQ(tau_max(law, 1.0e6, 0.0), 2.0e6);
}

TEST(Coulomb, DerivativesMatchDifferences)
{
  const auto law = FrictionLaw::from_angles(FrictionKind::arctan, 2.0e6, 30.0, 10.0, 2.0e-3);
  const double tn = -15e6, s = 1.1e-3;
  const auto d = tau_max_derivatives(law, tn, s);
  EXPECT_DOUBLE_EQ(d.value, tau_max(law, tn, s));
  EXPECT_NEAR(d.d_tn, (tau_max(law, tn + 1.0, s) - tau_max(law, tn - 1.0, s)) / 2.0, 1e-6);
  EXPECT_NEAR(d.d_slip, (tau_max(law, tn, s + 1e-9) - tau_max(law, tn, s - 1e-9)) / 2e-9, 1e-4 * std::abs(d.d_slip));
  const auto wrong = tau_max_derivatives(law, tn, s, 2.0);
  EXPECT_DOUBLE_EQ(wrong.d_slip, 2.0 * d.d_slip);
}

TEST(Contact, Classification)
{
  const auto law = FrictionLaw::from_angles(FrictionKind::constant, 2.0e6, 30.0, 30.0, 1.0);
  FaultKinematics k;
  EXPECT_EQ(classify({1.0e3, Vec2::Zero()}, k, law), ContactStatus::open);
  EXPECT_EQ(classify({-20.0e6, Vec2(6.7735e6, 0.0)}, k, law), ContactStatus::stick);
  EXPECT_EQ(classify({-20.0e6, Vec2(0.0, 13547005.38)}, k, law), ContactStatus::slip);
}

TEST(Contact, SlipTargetFollowsIncrement)
{
  const auto law = FrictionLaw::from_angles(FrictionKind::constant, 0.0, 45.0, 45.0, 1.0);
  FaultKinematics k;
  k.dg_T = Vec2(3.0, 4.0);
  const Vec2 t = slip_target({-10.0, Vec2(1.0, 0.0)}, k, law);
  EXPECT_NEAR(t(0), 6.0, 1e-12);
  EXPECT_NEAR(t(1), 8.0, 1e-12);
  k.dg_T.setZero();
  const Vec2 f(0.0, -1.0);
  const Vec2 t2 = slip_target({-10.0, Vec2(1.0, 0.0)}, k, law, &f);
  EXPECT_NEAR(t2(1), -10.0, 1e-12);
}

TEST(Contact, KktResidualsVanishOnAdmissibleState)
{
  const auto law = FrictionLaw::from_angles(FrictionKind::constant, 0.0, 30.0, 30.0, 1.0);
  ContactState s;
  s.traction = {-1e6, Vec2(1e5, 0.0)};
  const auto r = kkt_residuals(s, law);
  EXPECT_EQ(r.r_N, 0.0);
  EXPECT_EQ(r.r_T, 0.0);
  EXPECT_EQ(r.r_comp, 0.0);
  s.kinematics.g_N = 1e-3;
  EXPECT_NEAR(kkt_residuals(s, law).r_comp, 1e-3, 1e-15);
}
