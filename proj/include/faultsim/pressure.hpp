/**
 * @file pressure.hpp
 * @brief Prescribed pore-pressure changes per loading step and the fault pressure rule.
 */
#pragma once

#include "errors.hpp"
#include "mesh.hpp"
#include "types.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

namespace faultsim
{

enum class HydraulicMode : std::uint8_t
{
  sealing,
  non_sealing
};

constexpr std::string_view to_string(HydraulicMode m)
{
  return m == HydraulicMode::sealing ? "sealing" : "non_sealing";
}

inline HydraulicMode parse_hydraulic_mode(std::string_view s)
{
  if (s == "sealing") return HydraulicMode::sealing;
  if (s == "non_sealing") return HydraulicMode::non_sealing;
  throw InputError("unknown hydraulic mode '" + std::string(s) + "'");
}

inline double fault_pressure(HydraulicMode mode, std::optional<double> dp_minus, std::optional<double> dp_plus)
{
  if (!dp_minus || !dp_plus)
    throw InputError("fault pressure needs both side cells");
  if (mode == HydraulicMode::sealing)
    return 0.0;
  return 0.5 * (*dp_minus + *dp_plus);
}

/// Pressure change of one loading step: per hex and per interface element.
struct PressureSnapshot
{
  std::vector<double> cell_dp;
  std::vector<double> fault_dp;
};

/// Piecewise-linear function of time through control points.
struct PiecewiseLinear
{
  std::vector<std::pair<double, double>> points; // (t, value), strictly increasing t

  double operator()(double t) const
  {
    if (points.empty())
      return 0.0;
    if (t <= points.front().first)
      return points.front().second;
    for (std::size_t i = 1; i < points.size(); ++i)
    {
      const auto [t1, v1] = points[i];
      if (t == t1)
        return v1;
      if (t < t1)
      {
        const auto [t0, v0] = points[i - 1];
        return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
      }
    }
    return points.back().second;
  }
};

inline std::vector<double> fault_pressures(const Mesh &mesh, const std::vector<double> &cell_dp,
                                           const std::vector<HydraulicMode> &modes)
{
  std::vector<double> f(mesh.interfaces.size(), 0.0);
  for (const auto &ie : mesh.interfaces)
  {
    const HydraulicMode mode =
        ie.fault_id < static_cast<int>(modes.size()) ? modes[ie.fault_id] : HydraulicMode::sealing;
    const auto side = [&](Index h) -> std::optional<double> {
      if (h < 0 || h >= static_cast<Index>(cell_dp.size()))
        return std::nullopt;
      return cell_dp[h];
    };
    f[ie.id] = fault_pressure(mode, side(ie.neighbor_cells[0]), side(ie.neighbor_cells[1]));
  }
  return f;
}

/// Uniform pressure change dp(t) on every hex whose region is listed, zero elsewhere.
inline PressureSnapshot compartment_schedule(const Mesh &mesh, const std::vector<int> &regions,
                                             const PiecewiseLinear &dp_of_time, double time,
                                             const std::vector<HydraulicMode> &modes)
{
  PressureSnapshot s;
  s.cell_dp.assign(mesh.hexes.size(), 0.0);
  const double dp = dp_of_time(time);
  for (const auto &h : mesh.hexes)
    if (std::find(regions.begin(), regions.end(), h.region_id) != regions.end())
      s.cell_dp[h.id] = dp;
  s.fault_dp = fault_pressures(mesh, s.cell_dp, modes);
  return s;
}

/// Per-cell pressure histories read from `cell_id,time_s,dp_pa` text tables.
struct PressureTable
{
  std::map<Index, PiecewiseLinear> cells;

  double cell_dp(Index cell, double time) const
  {
    auto it = cells.find(cell);
    return it == cells.end() ? 0.0 : it->second(time);
  }

  PressureSnapshot snapshot(const Mesh &mesh, double time, const std::vector<HydraulicMode> &modes) const
  {
    PressureSnapshot s;
    s.cell_dp.assign(mesh.hexes.size(), 0.0);
    for (const auto &[cell, f] : cells)
    {
      if (cell >= static_cast<Index>(mesh.hexes.size()))
        throw InputError("pressure table references unknown cell " + std::to_string(cell));
      s.cell_dp[cell] = f(time);
    }
    s.fault_dp = fault_pressures(mesh, s.cell_dp, modes);
    return s;
  }
};

namespace detail
{

inline bool parse_number(std::string_view s, double &v)
{
  while (!s.empty() && s.front() == ' ')
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r'))
    s.remove_suffix(1);
  if (s.empty())
    return false;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

} // namespace detail

inline PressureTable parse_pressure_table(std::istream &in, Index n_cells = -1)
{
  std::string line;
  if (!std::getline(in, line))
    throw InputError("pressure table: empty file");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  if (line != "cell_id,time_s,dp_pa")
    throw InputError("pressure table: header must be 'cell_id,time_s,dp_pa'");
  PressureTable table;
  std::size_t row = 1;
  while (std::getline(in, line))
  {
    ++row;
    if (line.empty() || line == "\r")
      continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos;)
    {
      fields.push_back(rest.substr(0, pos));
      rest.remove_prefix(pos + 1);
    }
    fields.push_back(rest);
    double id = 0.0, t = 0.0, dp = 0.0;
    if (fields.size() != 3 || !detail::parse_number(fields[0], id) || !detail::parse_number(fields[1], t) ||
        !detail::parse_number(fields[2], dp) || id < 0.0 || id != std::floor(id))
      throw InputError("pressure table: malformed row " + std::to_string(row));
    const Index cell = static_cast<Index>(id);
    if (n_cells >= 0 && cell >= n_cells)
      throw InputError("pressure table: unknown cell id " + std::to_string(cell) + " at row " +
                       std::to_string(row));
    auto &pts = table.cells[cell].points;
    if (!pts.empty() && !(t > pts.back().first))
      throw InputError("pressure table: times not increasing for cell " + std::to_string(cell) +
                       " at row " + std::to_string(row));
    pts.emplace_back(t, dp);
  }
  return table;
}

inline PressureTable load_pressure_table(const std::string &path, Index n_cells = -1)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open pressure table '" + path + "'");
  return parse_pressure_table(in, n_cells);
}

/// Writes the non-zero cells of a sequence of snapshots as a pressure table.
inline void write_pressure_table(std::ostream &out, const std::vector<double> &times,
                                 const std::vector<PressureSnapshot> &snaps)
{
  out << "cell_id,time_s,dp_pa\n";
  if (snaps.empty())
    return;
  const std::size_t n = snaps.front().cell_dp.size();
  for (std::size_t c = 0; c < n; ++c)
  {
    bool any = false;
    for (const auto &s : snaps)
      any = any || s.cell_dp[c] != 0.0;
    if (!any)
      continue;
    for (std::size_t k = 0; k < snaps.size(); ++k)
      out << fmt::format("{},{:.17g},{:.17g}\n", c, times[k], snaps[k].cell_dp[c]);
  }
}

} // namespace faultsim
