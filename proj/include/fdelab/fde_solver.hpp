#pragma once

#include "grid_core.hpp"
#include "solver/barenblatt.hpp"
#include "solver/solver.hpp"
#include "solver/structure.hpp"
#include "solver/weak_residual.hpp"
