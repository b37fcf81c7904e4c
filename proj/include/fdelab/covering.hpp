#pragma once

#include "covering/box_maximal.hpp"
#include "covering/family.hpp"
#include "covering/rescale.hpp"
#include "covering/stopping.hpp"
#include "covering/vitali.hpp"
#include "intrinsic_geometry.hpp"
