#pragma once

#include "error.hpp"
#include "grid/cylinder.hpp"
#include "grid/gradient.hpp"
#include "grid/interpolate.hpp"
#include "grid/overlap.hpp"
#include "grid/params.hpp"
#include "grid/quadrature.hpp"
#include "grid/scalar_field.hpp"
#include "grid/snapshot.hpp"
#include "grid/space_time_grid.hpp"
#include "parallel.hpp"
