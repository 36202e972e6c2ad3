/**
 * @file vtk.hpp
 * @brief Legacy ASCII VTK unstructured-grid output.
 */
#pragma once

#include "analysis.hpp"
#include "mesh.hpp"
#include "solver.hpp"

#include <fmt/format.h>

#include <ostream>

namespace faultsim
{

namespace detail
{

inline void vtk_points(std::ostream &out, const Mesh &mesh)
{
  out << "POINTS " << mesh.nodes.size() << " double\n";
  for (const auto &n : mesh.nodes)
    out << fmt::format("{:.10g} {:.10g} {:.10g}\n", n.x, n.y, n.z);
}

} // namespace detail

/// Hexahedra (VTK type 12) followed by the interface quads (type 9, bottom face).
inline void write_mesh_vtk(std::ostream &out, const Mesh &mesh)
{
  out << "# vtk DataFile Version 3.0\nfaultsim mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  detail::vtk_points(out, mesh);
  const std::size_t nh = mesh.hexes.size(), nf = mesh.interfaces.size();
  out << "CELLS " << nh + nf << ' ' << 9 * nh + 5 * nf << '\n';
  for (const auto &h : mesh.hexes)
  {
    out << 8;
    for (Index v : h.node_ids)
      out << ' ' << v;
    out << '\n';
  }
  for (const auto &ie : mesh.interfaces)
    out << 4 << ' ' << ie.face_bottom[0] << ' ' << ie.face_bottom[1] << ' ' << ie.face_bottom[2] << ' '
        << ie.face_bottom[3] << '\n';
  out << "CELL_TYPES " << nh + nf << '\n';
  for (std::size_t i = 0; i < nh; ++i)
    out << "12\n";
  for (std::size_t i = 0; i < nf; ++i)
    out << "9\n";
  out << "CELL_DATA " << nh + nf << "\nSCALARS region int 1\nLOOKUP_TABLE default\n";
  for (const auto &h : mesh.hexes)
    out << h.region_id << '\n';
  for (std::size_t i = 0; i < nf; ++i)
    out << -1 << '\n';
  out << "SCALARS fault int 1\nLOOKUP_TABLE default\n";
  for (std::size_t i = 0; i < nh; ++i)
    out << -1 << '\n';
  for (const auto &ie : mesh.interfaces)
    out << ie.fault_id << '\n';
}

/// Interface elements only, with chi, t_N, t_T,z, accumulated slip and status as cell data.
inline void write_fault_state_vtk(std::ostream &out, const Mesh &mesh, const SolutionState &s, const FrictionLaw &law)
{
  out << "# vtk DataFile Version 3.0\nfaultsim fault state step " << s.step
      << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  const std::size_t nf = mesh.interfaces.size();
  out << "POINTS " << 4 * nf << " double\n";
  for (const auto &ie : mesh.interfaces)
    for (Index v : ie.face_bottom)
      out << fmt::format("{:.10g} {:.10g} {:.10g}\n", mesh.nodes[v].x, mesh.nodes[v].y, mesh.nodes[v].z);
  out << "CELLS " << nf << ' ' << 5 * nf << '\n';
  for (std::size_t i = 0; i < nf; ++i)
    out << 4 << ' ' << 4 * i << ' ' << 4 * i + 1 << ' ' << 4 * i + 2 << ' ' << 4 * i + 3 << '\n';
  out << "CELL_TYPES " << nf << '\n';
  for (std::size_t i = 0; i < nf; ++i)
    out << "9\n";
  out << "CELL_DATA " << nf << '\n';
  auto scalar = [&](const char *name, auto f) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (const auto &ie : mesh.interfaces)
      out << fmt::format("{:.10g}\n", f(ie));
  };
  scalar("chi", [&](const InterfaceElement &ie) { return element_chi(s.contact[ie.id], law).value_or(-1.0); });
  scalar("t_N", [&](const InterfaceElement &ie) { return s.contact[ie.id].traction.t_N; });
  scalar("t_T_z", [&](const InterfaceElement &ie) { return t_T_z(ie, s.contact[ie.id].traction); });
  scalar("slip", [&](const InterfaceElement &ie) { return s.contact[ie.id].kinematics.slip_acc; });
  scalar("status", [&](const InterfaceElement &ie) { return static_cast<double>(s.contact[ie.id].status); });
  scalar("fault", [&](const InterfaceElement &ie) { return static_cast<double>(ie.fault_id); });
}

} // namespace faultsim
