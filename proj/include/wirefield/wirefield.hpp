#pragma once

#include "wirefield/errors.hpp"
#include "wirefield/current_model.hpp"
#include "wirefield/potential.hpp"
#include "wirefield/potential_source.hpp"
#include "wirefield/em_fields.hpp"
#include "wirefield/dynamics.hpp"
#include "wirefield/triplets.hpp"
#include "wirefield/continuation.hpp"
#include "wirefield/twist.hpp"
#include "wirefield/orbit_search.hpp"

namespace wirefield {
inline constexpr const char* version = "0.1.0";
}
