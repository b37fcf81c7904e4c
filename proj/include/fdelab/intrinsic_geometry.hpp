#pragma once

#include "geometry/constants.hpp"
#include "geometry/engulf.hpp"
#include "geometry/profile.hpp"
#include "geometry/verify.hpp"
#include "geometry/window_integrator.hpp"
#include "grid_core.hpp"
