#pragma once

#include <string>

namespace nsquant {

// Per-point diagnostics carried through curves, bands and reports.
enum PointFlag : unsigned {
  kFlagNone = 0,
  kFlagMissing = 1u << 0,           // value could not be computed at this point
  kFlagDegenerateDesign = 1u << 1,  // window had a single distinct time; local constant fallback
  kFlagBoundary = 1u << 2,          // kernel window truncated by the edge of [0, 1]
  kFlagSigmaFloor = 1u << 3,        // long-run variance hit its lower floor
  kFlagDensityFloor = 1u << 4,      // density estimate hit its lower floor
  kFlagCrossing = 1u << 5,          // quantile curves crossed (negative IQR clamped)
  kFlagApproximate = 1u << 6,       // solver could not certify exact optimality
  kFlagClamped = 1u << 7,           // selected bandwidth hit a clamp bound
};

std::string flags_to_string(unsigned flags);

}  // namespace nsquant
