/**
 * @file types.hpp
 * @brief Small vocabulary types used across the library.
 */
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string_view>

namespace faultsim
{

using Index = std::int64_t;
using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double seconds_per_year = 365.25 * 86400.0;

inline double deg2rad(double deg) { return deg * pi / 180.0; }

enum class ContactStatus : std::uint8_t
{
  stick = 0,
  slip = 1,
  open = 2
};

constexpr std::string_view to_string(ContactStatus s)
{
  switch (s)
  {
    case ContactStatus::stick: return "stick";
    case ContactStatus::slip: return "slip";
    case ContactStatus::open: return "open";
  }
  return "unknown";
}

enum class Axis : std::uint8_t
{
  x = 0,
  y = 1,
  z = 2
};

} // namespace faultsim
