#pragma once

#include "estimates/algebra.hpp"
#include "estimates/bounds.hpp"
#include "estimates/energy.hpp"
#include "estimates/fields.hpp"
#include "estimates/higher_integrability.hpp"
#include "estimates/regime.hpp"
#include "estimates/report.hpp"
#include "estimates/reverse_holder.hpp"
