/**
 * @file faultsim.hpp
 * @brief Umbrella header.
 */
#pragma once

#include "analysis.hpp"
#include "assembly.hpp"
#include "checkpoint.hpp"
#include "constitutive.hpp"
#include "contact.hpp"
#include "errors.hpp"
#include "fem.hpp"
#include "invariants.hpp"
#include "linear_solver.hpp"
#include "march.hpp"
#include "mesh.hpp"
#include "pipeline.hpp"
#include "pressure.hpp"
#include "scenario.hpp"
#include "solver.hpp"
#include "spring1d.hpp"
#include "types.hpp"
#include "vtk.hpp"
