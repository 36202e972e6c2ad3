/**
 * @file fem.hpp
 * @brief Trilinear hexahedron and bilinear quadrilateral kernels.
 */
#pragma once

#include "constitutive.hpp"
#include "errors.hpp"
#include "types.hpp"

#include <array>
#include <cmath>

namespace faultsim
{

// Reference corners of the hexahedron in VTK order.
inline constexpr std::array<std::array<int, 3>, 8> hex_corners = {{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}};

// Local node lists of the six faces (outward orientation not implied).
inline constexpr std::array<std::array<int, 4>, 6> hex_faces = {{
    {0, 3, 7, 4}, // xi = 0
    {1, 2, 6, 5}, // xi = 1
    {0, 1, 5, 4}, // eta = 0
    {3, 2, 6, 7}, // eta = 1
    {0, 1, 2, 3}, // zeta = 0
    {4, 5, 6, 7}, // zeta = 1
}};

inline constexpr double gauss_pt = 0.57735026918962576451; // 1/sqrt(3)

using HexCoords = Eigen::Matrix<double, 8, 3>;
using HexGrad = Eigen::Matrix<double, 8, 3>;
using HexStiffness = Eigen::Matrix<double, 24, 24>;
using HexLoad = Eigen::Matrix<double, 24, 1>;

/// Trilinear shape functions on [0,1]^3.
inline Eigen::Matrix<double, 8, 1> hex_shape(double xi, double eta, double zeta)
{
  Eigen::Matrix<double, 8, 1> N;
  for (int a = 0; a < 8; ++a)
  {
    const auto &c = hex_corners[a];
    N(a) = (c[0] ? xi : 1.0 - xi) * (c[1] ? eta : 1.0 - eta) * (c[2] ? zeta : 1.0 - zeta);
  }
  return N;
}

inline HexGrad hex_shape_ref_grad(double xi, double eta, double zeta)
{
  HexGrad dN;
  for (int a = 0; a < 8; ++a)
  {
    const auto &c = hex_corners[a];
    const double fx = c[0] ? xi : 1.0 - xi, gx = c[0] ? 1.0 : -1.0;
    const double fy = c[1] ? eta : 1.0 - eta, gy = c[1] ? 1.0 : -1.0;
    const double fz = c[2] ? zeta : 1.0 - zeta, gz = c[2] ? 1.0 : -1.0;
    dN(a, 0) = gx * fy * fz;
    dN(a, 1) = fx * gy * fz;
    dN(a, 2) = fx * fy * gz;
  }
  return dN;
}

struct HexQuadPoint
{
  double xi, eta, zeta, weight;
};

inline std::array<HexQuadPoint, 8> hex_quadrature()
{
  const double lo = 0.5 * (1.0 - gauss_pt), hi = 0.5 * (1.0 + gauss_pt);
  std::array<HexQuadPoint, 8> q{};
  for (int a = 0; a < 8; ++a)
  {
    const auto &c = hex_corners[a];
    q[a] = {c[0] ? hi : lo, c[1] ? hi : lo, c[2] ? hi : lo, 0.125};
  }
  return q;
}

/// Physical gradients and Jacobian determinant at a reference point.
inline double hex_physical_grad(const HexCoords &X, double xi, double eta, double zeta, HexGrad &dNdx)
{
  const HexGrad dN = hex_shape_ref_grad(xi, eta, zeta);
  const Mat3 J = X.transpose() * dN; // J(i,k) = dx_i/dxi_k
  const double det = J.determinant();
  dNdx = dN * J.inverse();
  return det;
}

inline double hex_min_jacobian(const HexCoords &X)
{
  double m = std::numeric_limits<double>::infinity();
  for (const auto &q : hex_quadrature())
  {
    const Mat3 J = X.transpose() * hex_shape_ref_grad(q.xi, q.eta, q.zeta);
    m = std::min(m, J.determinant());
  }
  return m;
}

inline double hex_volume(const HexCoords &X)
{
  double v = 0.0;
  for (const auto &q : hex_quadrature())
  {
    const Mat3 J = X.transpose() * hex_shape_ref_grad(q.xi, q.eta, q.zeta);
    v += q.weight * J.determinant();
  }
  return v;
}

/// Strain-displacement matrix in Voigt order (xx, yy, zz, yz, xz, xy), engineering shears.
inline Eigen::Matrix<double, 6, 24> hex_B(const HexGrad &dNdx)
{
  Eigen::Matrix<double, 6, 24> B = Eigen::Matrix<double, 6, 24>::Zero();
  for (int a = 0; a < 8; ++a)
  {
    const double gx = dNdx(a, 0), gy = dNdx(a, 1), gz = dNdx(a, 2);
    B(0, 3 * a) = gx;
    B(1, 3 * a + 1) = gy;
    B(2, 3 * a + 2) = gz;
    B(3, 3 * a + 1) = gz;
    B(3, 3 * a + 2) = gy;
    B(4, 3 * a) = gz;
    B(4, 3 * a + 2) = gx;
    B(5, 3 * a) = gy;
    B(5, 3 * a + 1) = gx;
  }
  return B;
}

inline HexStiffness hex_stiffness(const HexCoords &X, const StiffnessTensor &C)
{
  const Eigen::Matrix<double, 6, 6> D = C.voigt();
  HexStiffness K = HexStiffness::Zero();
  HexGrad dNdx;
  for (const auto &q : hex_quadrature())
  {
    const double det = hex_physical_grad(X, q.xi, q.eta, q.zeta, dNdx);
    if (!(det > 0.0))
      throw MeshError("hexahedron with non-positive Jacobian");
    const auto B = hex_B(dNdx);
    K.noalias() += (q.weight * det) * B.transpose() * D * B;
  }
  return K;
}

/// Consistent nodal load of a uniform pore pressure change: f_a = int alpha dp grad N_a dV.
inline HexLoad hex_pressure_load(const HexCoords &X, double alpha_dp)
{
  HexLoad f = HexLoad::Zero();
  HexGrad dNdx;
  for (const auto &q : hex_quadrature())
  {
    const double det = hex_physical_grad(X, q.xi, q.eta, q.zeta, dNdx);
    for (int a = 0; a < 8; ++a)
      for (int i = 0; i < 3; ++i)
        f(3 * a + i) += q.weight * det * alpha_dp * dNdx(a, i);
  }
  return f;
}

/// Strain tensor at a reference point from element displacements.
inline Mat3 hex_strain(const HexCoords &X, const HexLoad &ue, double xi, double eta, double zeta)
{
  HexGrad dNdx;
  hex_physical_grad(X, xi, eta, zeta, dNdx);
  Mat3 G = Mat3::Zero(); // G(i,j) = du_i/dx_j
  for (int a = 0; a < 8; ++a)
    for (int i = 0; i < 3; ++i)
      G.row(i) += ue(3 * a + i) * dNdx.row(a);
  return 0.5 * (G + G.transpose());
}

/// Integral of the bilinear shape functions over a quadrilateral given by 4 cyclic corners.
inline std::array<double, 4> quad_weights(const std::array<Vec3, 4> &P)
{
  std::array<double, 4> w{0.0, 0.0, 0.0, 0.0};
  const double lo = 0.5 * (1.0 - gauss_pt), hi = 0.5 * (1.0 + gauss_pt);
  const double pts[2] = {lo, hi};
  for (double s : pts)
    for (double t : pts)
    {
      const double N[4] = {(1 - s) * (1 - t), s * (1 - t), s * t, (1 - s) * t};
      const Vec3 ds = (1 - t) * (P[1] - P[0]) + t * (P[2] - P[3]);
      const Vec3 dt = (1 - s) * (P[3] - P[0]) + s * (P[2] - P[1]);
      const double jac = ds.cross(dt).norm();
      for (int a = 0; a < 4; ++a)
        w[a] += 0.25 * N[a] * jac;
    }
  return w;
}

} // namespace faultsim
