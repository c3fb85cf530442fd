#pragma once

// Umbrella header for the detuning-modulated composite pulse toolkit.

#include "dmcp/core.hpp"
#include "dmcp/cpt.hpp"
#include "dmcp/derivative.hpp"
#include "dmcp/design.hpp"
#include "dmcp/error.hpp"
#include "dmcp/io.hpp"
#include "dmcp/parallel.hpp"
#include "dmcp/polynomial.hpp"
#include "dmcp/robustness.hpp"
#include "dmcp/waveguide.hpp"

namespace dmcp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dmcp
