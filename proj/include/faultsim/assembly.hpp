/**
 * @file assembly.hpp
 * @brief Residuals and saddle-point Jacobian of the Q1 displacement / P0 traction discretization.
 */
#pragma once

#include "constitutive.hpp"
#include "contact.hpp"
#include "errors.hpp"
#include "fem.hpp"
#include "mesh.hpp"
#include "pressure.hpp"
#include "types.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <string>
#include <vector>

namespace faultsim
{

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

/// Prescribed displacement components on a named node set.
struct BoundaryCondition
{
  std::string node_set;
  std::array<bool, 3> fixed{true, true, true};
  std::array<double, 3> value{0.0, 0.0, 0.0};
};

using BoundaryConditions = std::vector<BoundaryCondition>;

struct DofConstraints
{
  std::vector<char> fixed; // per displacement dof
  VecX value;

  Index count() const { return std::count(fixed.begin(), fixed.end(), 1); }
};

inline DofConstraints build_constraints(const Mesh &mesh, const BoundaryConditions &bcs)
{
  DofConstraints c;
  c.fixed.assign(mesh.n_dofs(), 0);
  c.value = VecX::Zero(mesh.n_dofs());
  for (const auto &bc : bcs)
  {
    auto it = mesh.node_sets.find(bc.node_set);
    if (it == mesh.node_sets.end())
      throw InputError("boundary condition references unknown node set '" + bc.node_set + "'");
    for (Index n : it->second)
      for (int i = 0; i < 3; ++i)
        if (bc.fixed[i])
        {
          c.fixed[3 * n + i] = 1;
          c.value(3 * n + i) = bc.value[i];
        }
  }
  return c;
}

/// Zero displacement on the lateral and bottom boundaries; the top is traction free.
inline BoundaryConditions default_boundary_conditions()
{
  BoundaryConditions b;
  for (const char *s : {"x_min", "x_max", "y_min", "y_max", "z_min"})
    b.push_back({s});
  return b;
}

struct AssemblyOptions
{
  double beta = 1.0; // stabilization coefficient
  double friction_derivative_scale = 1.0; // 1 for the exact Jacobian; other values only for negative controls
};

/// Multiplier-jump penalty: for each edge-sharing pair (i, j) of one fault and each local
/// component, w (t_i - t_j)^2 with w = beta h_e mean(A_i, A_j) / E_loc.
inline SpMat stabilization(const Mesh &mesh, double beta = 1.0)
{
  const Index nt = 3 * mesh.n_interfaces();
  std::vector<Triplet> trip;
  for (const auto &pr : mesh.adjacency)
  {
    const auto &a = mesh.interfaces[pr.a];
    const auto &b = mesh.interfaces[pr.b];
    double inv = 0.0;
    int n = 0;
    for (const auto *ie : {&a, &b})
      for (Index h : ie->neighbor_cells)
      {
        inv += 1.0 / mesh.material_of(h).E;
        ++n;
      }
    const double E_loc = n / inv;
    const double w = beta * pr.edge_length * 0.5 * (a.area + b.area) / E_loc;
    for (int c = 0; c < 3; ++c)
    {
      const int i = static_cast<int>(3 * pr.a + c), j = static_cast<int>(3 * pr.b + c);
      trip.emplace_back(i, i, w);
      trip.emplace_back(j, j, w);
      trip.emplace_back(i, j, -w);
      trip.emplace_back(j, i, -w);
    }
  }
  SpMat S(nt, nt);
  S.setFromTriplets(trip.begin(), trip.end());
  return S;
}

/// Constant operators of a faulted mesh: elastic stiffness, jump operator, stabilization, scales.
class FaultSystem
{
public:
  FaultSystem(const Mesh &mesh, const BoundaryConditions &bcs, AssemblyOptions opt = {})
      : mesh_(&mesh), opt_(opt)
  {
    constraints_ = build_constraints(mesh, bcs);
    assemble_stiffness();
    assemble_jump();
    S_ = stabilization(mesh, opt.beta);
    compute_scales();
  }

  const Mesh &mesh() const { return *mesh_; }
  const AssemblyOptions &options() const { return opt_; }
  const DofConstraints &constraints() const { return constraints_; }
  Index n_u() const { return mesh_->n_dofs(); }
  Index n_t() const { return 3 * mesh_->n_interfaces(); }
  Index n_f() const { return mesh_->n_interfaces(); }

  const SpMat &K() const { return K_; }
  const SpMat &Jmp() const { return Jmp_; }
  const SpMat &S() const { return S_; }

  double E_ref() const { return E_ref_; }
  double L_ref() const { return L_ref_; }
  /// Dimensional constant of the traction rows [Pa/m^3].
  double k_scale() const { return E_ref_ / (L_ref_ * L_ref_ * L_ref_); }
  /// Converts traction-row residuals [m^3] to forces [N].
  double row_scale() const { return E_ref_ / L_ref_; }

  /// Consistent nodal load int alpha dp grad N dV.
  VecX pressure_load(const std::vector<double> &cell_dp) const
  {
    const auto &m = *mesh_;
    if (static_cast<Index>(cell_dp.size()) != static_cast<Index>(m.hexes.size()))
      throw InputError("pressure field size does not match the mesh");
    VecX f = VecX::Zero(n_u());
    for (const auto &h : m.hexes)
    {
      const double dp = cell_dp[h.id];
      if (dp == 0.0)
        continue;
      const HexLoad fe = hex_pressure_load(m.hex_coords(h.id), m.material_of(h.id).alpha * dp);
      for (int a = 0; a < 8; ++a)
        for (int i = 0; i < 3; ++i)
          f(3 * h.node_ids[a] + i) += fe(3 * a + i);
    }
    return f;
  }

  /// Fault pressure change as a local-frame traction vector dp e_N.
  VecX fault_pressure_vector(const std::vector<double> &fault_dp) const
  {
    VecX v = VecX::Zero(n_t());
    if (static_cast<Index>(fault_dp.size()) != n_f())
      throw InputError("fault pressure size does not match the mesh");
    for (Index e = 0; e < n_f(); ++e)
      v(3 * e) = fault_dp[e];
    return v;
  }

  /// Enriched area-weighted jump Jmp u - S (t - t0), local frame [m^3].
  VecX enriched_jump(const VecX &u, const VecX &t, const VecX &t0) const
  {
    return Jmp_ * u - S_ * (t - t0);
  }

private:
  void assemble_stiffness()
  {
    const auto &m = *mesh_;
    std::vector<Triplet> trip;
    trip.reserve(m.hexes.size() * 576);
    for (const auto &h : m.hexes)
    {
      const HexStiffness Ke = hex_stiffness(m.hex_coords(h.id), stiffness_tensor(m.material_of(h.id)));
      for (int a = 0; a < 8; ++a)
        for (int i = 0; i < 3; ++i)
          for (int b = 0; b < 8; ++b)
            for (int j = 0; j < 3; ++j)
              trip.emplace_back(static_cast<int>(3 * h.node_ids[a] + i), static_cast<int>(3 * h.node_ids[b] + j),
                                Ke(3 * a + i, 3 * b + j));
    }
    K_.resize(n_u(), n_u());
    K_.setFromTriplets(trip.begin(), trip.end());
  }

  void assemble_jump()
  {
    const auto &m = *mesh_;
    std::vector<Triplet> trip;
    for (const auto &ie : m.interfaces)
    {
      const Mat3 Rt = ie.rotation().transpose();
      for (int a = 0; a < 4; ++a)
        for (int r = 0; r < 3; ++r)
          for (int i = 0; i < 3; ++i)
          {
            const double v = ie.weights[a] * Rt(r, i);
            if (v == 0.0)
              continue;
            trip.emplace_back(static_cast<int>(3 * ie.id + r), static_cast<int>(3 * ie.face_top[a] + i), v);
            trip.emplace_back(static_cast<int>(3 * ie.id + r), static_cast<int>(3 * ie.face_bottom[a] + i), -v);
          }
    }
    Jmp_.resize(n_t(), n_u());
    Jmp_.setFromTriplets(trip.begin(), trip.end());
  }

  void compute_scales()
  {
    const auto &m = *mesh_;
    double inv = 0.0, area = 0.0;
    int n = 0;
    for (const auto &ie : m.interfaces)
    {
      area += ie.area;
      for (Index h : ie.neighbor_cells)
      {
        inv += 1.0 / m.material_of(h).E;
        ++n;
      }
    }
    if (n == 0)
    {
      for (const auto &h : m.hexes)
      {
        inv += 1.0 / m.material_of(h.id).E;
        ++n;
      }
      L_ref_ = 1.0;
    }
    else
      L_ref_ = std::sqrt(area / m.n_interfaces());
    E_ref_ = n / inv;
  }

  const Mesh *mesh_;
  AssemblyOptions opt_;
  DofConstraints constraints_;
  SpMat K_, Jmp_, S_;
  double E_ref_ = 1.0, L_ref_ = 1.0;
};

/// Per-element quantities carried over from the previous converged step.
struct StepHistory
{
  VecX t0;             // initial traction, local frames
  VecX J_prev;         // enriched jump at the previous converged step
  std::vector<double> slip_prev;
  std::vector<Vec2> fallback_dir; // slip direction used for a vanishing increment
};

/// Loads of the current step.
struct StepLoad
{
  VecX f_p;   // pressure load on displacement dofs
  VecX dp_f;  // fault pressure as local traction vector
};

/// Per-element 3x3 blocks: R_t = G J + h(t), dR_t/dt = H - G S.
struct ContactBlocks
{
  std::vector<Mat3> G;
  std::vector<Mat3> H;
};

struct ResidualEval
{
  VecX r_u;
  VecX r_t;
  ContactBlocks blocks;
};

/// Increments below this norm [m] use the fallback slip direction.
inline constexpr double slip_direction_eps = 1e-13;

/// Residuals (and, optionally, the Jacobian blocks) for a frozen status partition.
inline ResidualEval evaluate_residual(const FaultSystem &sys, const StepHistory &hist, const StepLoad &load,
                                      const std::vector<ContactStatus> &status, const FrictionLaw &law,
                                      const VecX &u, const VecX &t, bool with_blocks)
{
  const Index nf = sys.n_f();
  if (static_cast<Index>(status.size()) != nf)
    throw StateError("status array does not match the number of interface elements");
  const double k = sys.k_scale();
  ResidualEval ev;
  ev.r_u = sys.K() * u + sys.Jmp().transpose() * (t - hist.t0 - load.dp_f) - load.f_p;
  const auto &c = sys.constraints();
  for (Index i = 0; i < sys.n_u(); ++i)
    if (c.fixed[i])
      ev.r_u(i) = u(i) - c.value(i);

  const VecX J = sys.enriched_jump(u, t, hist.t0);
  ev.r_t.resize(3 * nf);
  if (with_blocks)
  {
    ev.blocks.G.assign(nf, Mat3::Zero());
    ev.blocks.H.assign(nf, Mat3::Zero());
  }
  const auto &ifs = sys.mesh().interfaces;
  for (Index e = 0; e < nf; ++e)
  {
    const Vec3 Je = J.segment<3>(3 * e);
    const Vec3 te = t.segment<3>(3 * e);
    switch (status[e])
    {
      case ContactStatus::stick:
      {
        ev.r_t(3 * e) = Je(0);
        ev.r_t.segment<2>(3 * e + 1) = Je.tail<2>() - hist.J_prev.segment<2>(3 * e + 1);
        if (with_blocks)
          ev.blocks.G[e] = Mat3::Identity();
        break;
      }
      case ContactStatus::open:
      {
        ev.r_t.segment<3>(3 * e) = te / k;
        if (with_blocks)
          ev.blocks.H[e] = Mat3::Identity() / k;
        break;
      }
      case ContactStatus::slip:
      {
        const double A = ifs[e].area;
        const Vec2 dg = (Je.tail<2>() - hist.J_prev.segment<2>(3 * e + 1)) / A;
        const double ng = dg.norm();
        const bool free_dir = ng > slip_direction_eps;
        const Vec2 d = free_dir ? Vec2(dg / ng) : hist.fallback_dir[e];
        const double s = hist.slip_prev[e] + ng;
        const auto tm = tau_max_derivatives(law, te(0), s, sys.options().friction_derivative_scale);
        ev.r_t(3 * e) = Je(0);
        ev.r_t.segment<2>(3 * e + 1) = (te.tail<2>() - tm.value * d) / k;
        if (with_blocks)
        {
          Mat2 Dg = tm.d_slip * d * d.transpose();
          if (free_dir)
            Dg += tm.value * (Mat2::Identity() - d * d.transpose()) / ng;
          Mat3 G = Mat3::Zero();
          G(0, 0) = 1.0;
          G.block<2, 2>(1, 1) = -Dg / (k * A);
          Mat3 H = Mat3::Zero();
          H.block<2, 1>(1, 0) = -tm.d_tn * d / k;
          H.block<2, 2>(1, 1) = Mat2::Identity() / k;
          ev.blocks.G[e] = G;
          ev.blocks.H[e] = H;
        }
        break;
      }
    }
  }
  return ev;
}

/// Monolithic sparse Jacobian [[K, Jmp^T], [G Jmp, H - G S]] with Dirichlet rows as identity.
struct LinearSystem
{
  SpMat J;
  VecX r;
  Index n_u = 0;
  Index n_t = 0;
};

inline SpMat block_diagonal(const std::vector<Mat3> &B)
{
  std::vector<Triplet> trip;
  for (std::size_t e = 0; e < B.size(); ++e)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (B[e](i, j) != 0.0)
          trip.emplace_back(static_cast<int>(3 * e + i), static_cast<int>(3 * e + j), B[e](i, j));
  SpMat M(3 * B.size(), 3 * B.size());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

inline LinearSystem assemble_jacobian(const FaultSystem &sys, const ResidualEval &ev)
{
  const Index nu = sys.n_u(), nt = sys.n_t();
  const SpMat G = block_diagonal(ev.blocks.G);
  const SpMat H = block_diagonal(ev.blocks.H);
  const SpMat GJ = G * sys.Jmp();
  const SpMat D = H - G * sys.S();
  const SpMat JT = sys.Jmp().transpose();
  std::vector<Triplet> trip;
  trip.reserve(sys.K().nonZeros() + 2 * sys.Jmp().nonZeros() + D.nonZeros());
  const auto &fixed = sys.constraints().fixed;
  auto add = [&](const SpMat &M, Index r0, Index c0) {
    for (int col = 0; col < M.outerSize(); ++col)
      for (SpMat::InnerIterator it(M, col); it; ++it)
      {
        const Index row = r0 + it.row();
        if (row < nu && fixed[row])
          continue;
        trip.emplace_back(static_cast<int>(row), static_cast<int>(c0 + it.col()), it.value());
      }
  };
  add(sys.K(), 0, 0);
  add(JT, 0, nu);
  for (Index i = 0; i < nu; ++i)
    if (fixed[i])
      trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
  add(GJ, nu, 0);
  add(D, nu, nu);
  LinearSystem ls;
  ls.n_u = nu;
  ls.n_t = nt;
  ls.J.resize(nu + nt, nu + nt);
  ls.J.setFromTriplets(trip.begin(), trip.end());
  ls.r.resize(nu + nt);
  ls.r << ev.r_u, ev.r_t;
  return ls;
}

/// Dirichlet rows and columns replaced by identity; the right-hand side absorbs the
/// eliminated columns so that J dx = -r keeps its solution.
inline LinearSystem apply_bcs(const LinearSystem &in, const DofConstraints &c)
{
  LinearSystem out = in;
  const Index n = in.J.rows();
  if (static_cast<Index>(c.fixed.size()) > n)
    throw InputError("constraint set larger than the system");
  // Known increments dx_i = -r_i on constrained rows.
  VecX dx_known = VecX::Zero(n);
  for (Index i = 0; i < static_cast<Index>(c.fixed.size()); ++i)
    if (c.fixed[i])
      dx_known(i) = -in.r(i);
  // -r_new = -r - J_{:,fixed} dx_known  =>  r_new = r + J dx_known
  out.r = in.r + in.J * dx_known;
  std::vector<Triplet> trip;
  trip.reserve(in.J.nonZeros());
  for (int col = 0; col < in.J.outerSize(); ++col)
    for (SpMat::InnerIterator it(in.J, col); it; ++it)
    {
      const bool fr = it.row() < static_cast<Index>(c.fixed.size()) && c.fixed[it.row()];
      const bool fc = it.col() < static_cast<Index>(c.fixed.size()) && c.fixed[it.col()];
      if (!fr && !fc)
        trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  for (Index i = 0; i < static_cast<Index>(c.fixed.size()); ++i)
    if (c.fixed[i])
    {
      trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
      out.r(i) = in.r(i);
    }
  out.J.resize(n, n);
  out.J.setFromTriplets(trip.begin(), trip.end());
  return out;
}

} // namespace faultsim
