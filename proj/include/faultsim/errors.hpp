/**
 * @file errors.hpp
 * @brief Exception hierarchy shared by all faultsim modules.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace faultsim
{

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Fault geometry that cannot be represented by the grid, degenerate faces.
class GeometryError : public Error
{
public:
  using Error::Error;
};

/// Invalid (non-positive Jacobian) elements.
class MeshError : public Error
{
public:
  using Error::Error;
};

/// Non-manifold fault configurations.
class TopologyError : public Error
{
public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function (negative slip, z above surface, ...).
class DomainError : public Error
{
public:
  using Error::Error;
};

/// Invalid user input: tables, configuration files, boundary sets.
class InputError : public Error
{
public:
  using Error::Error;
};

/// Inconsistent solution/contact state.
class StateError : public Error
{
public:
  using Error::Error;
};

/// Linear or nonlinear solver failure.
class SolverError : public Error
{
public:
  using Error::Error;
};

/// Newton stagnation inside a loading step.
class StepError : public SolverError
{
public:
  using SolverError::SolverError;
};

/// Active-set loop exceeded its iteration budget.
class CyclingError : public SolverError
{
public:
  using SolverError::SolverError;
};

} // namespace faultsim
