// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "iop/core.hpp"
#include "iop/materials.hpp"
#include "iop/geometry.hpp"
#include "iop/propagation.hpp"
#include "iop/noise.hpp"
#include "iop/capacity.hpp"
#include "iop/calibration.hpp"
#include "iop/netsim.hpp"

namespace iop {
inline constexpr const char* kVersion = "1.0.0";
}
