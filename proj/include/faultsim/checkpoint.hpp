/**
 * @file checkpoint.hpp
 * @brief Versioned binary dump of a SolutionState.
 *
 * Layout (all little-endian): magic "FSCKPT01", u32 version, i32 step, f64 time,
 * u64 n_u, u64 n_f, n_u x f64 u, 3 n_f x f64 t, then per element:
 * u8 status, f64 g_N, 2 f64 g_T, f64 slip_acc, 2 f64 dg_T, 2 f64 slip_dir.
 */
#pragma once

#include "errors.hpp"
#include "solver.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

namespace faultsim
{

inline constexpr char checkpoint_magic[8] = {'F', 'S', 'C', 'K', 'P', 'T', '0', '1'};
inline constexpr std::uint32_t checkpoint_version = 1;

namespace detail
{

template <typename T>
void put_le(std::ostream &out, T v)
{
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(b, b + sizeof(T));
  out.write(reinterpret_cast<const char *>(b), sizeof(T));
}

template <typename T>
T get_le(std::istream &in)
{
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char *>(b), sizeof(T)))
    throw StateError("checkpoint truncated");
  if constexpr (std::endian::native == std::endian::big)
    std::reverse(b, b + sizeof(T));
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

} // namespace detail

inline void write_checkpoint(std::ostream &out, const SolutionState &s)
{
  out.write(checkpoint_magic, 8);
  detail::put_le<std::uint32_t>(out, checkpoint_version);
  detail::put_le<std::int32_t>(out, s.step);
  detail::put_le<double>(out, s.time);
  detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(s.u.size()));
  detail::put_le<std::uint64_t>(out, static_cast<std::uint64_t>(s.contact.size()));
  for (Index i = 0; i < s.u.size(); ++i)
    detail::put_le<double>(out, s.u(i));
  for (Index i = 0; i < s.t.size(); ++i)
    detail::put_le<double>(out, s.t(i));
  for (std::size_t e = 0; e < s.contact.size(); ++e)
  {
    const auto &c = s.contact[e];
    detail::put_le<std::uint8_t>(out, static_cast<std::uint8_t>(c.status));
    const auto &k = c.kinematics;
    for (double v : {k.g_N, k.g_T(0), k.g_T(1), k.slip_acc, k.dg_T(0), k.dg_T(1), s.slip_dir[e](0), s.slip_dir[e](1)})
      detail::put_le<double>(out, v);
  }
}

inline void write_checkpoint(const std::string &path, const SolutionState &s)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw InputError("cannot write checkpoint '" + path + "'");
  write_checkpoint(out, s);
}

inline SolutionState read_checkpoint(std::istream &in)
{
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, checkpoint_magic, 8) != 0)
    throw StateError("not a checkpoint file");
  const auto version = detail::get_le<std::uint32_t>(in);
  if (version != checkpoint_version)
    throw StateError("unsupported checkpoint version " + std::to_string(version));
  SolutionState s;
  s.step = detail::get_le<std::int32_t>(in);
  s.time = detail::get_le<double>(in);
  const auto nu = detail::get_le<std::uint64_t>(in);
  const auto nf = detail::get_le<std::uint64_t>(in);
  if (nu > (1ull << 32) || nf > (1ull << 32))
    throw StateError("checkpoint sizes out of range");
  s.u.resize(static_cast<Index>(nu));
  s.t.resize(static_cast<Index>(3 * nf));
  for (Index i = 0; i < s.u.size(); ++i)
    s.u(i) = detail::get_le<double>(in);
  for (Index i = 0; i < s.t.size(); ++i)
    s.t(i) = detail::get_le<double>(in);
  s.contact.resize(nf);
  s.slip_dir.resize(nf);
  for (std::size_t e = 0; e < nf; ++e)
  {
    auto &c = s.contact[e];
    const auto st = detail::get_le<std::uint8_t>(in);
    if (st > 2)
      throw StateError("invalid contact status in checkpoint");
    c.status = static_cast<ContactStatus>(st);
    double v[8];
    for (double &x : v)
      x = detail::get_le<double>(in);
    c.kinematics = {v[0], Vec2(v[1], v[2]), v[3], Vec2(v[4], v[5])};
    s.slip_dir[e] = Vec2(v[6], v[7]);
    c.traction = FaultTraction::from_local(s.t.segment<3>(3 * e));
  }
  return s;
}

inline SolutionState read_checkpoint(const std::string &path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError("cannot open checkpoint '" + path + "'");
  return read_checkpoint(in);
}

} // namespace faultsim
