#include "nsquant/flags.hpp"

namespace nsquant {

std::string flags_to_string(unsigned flags) {
  static const struct {
    unsigned bit;
    const char* token;
  } kTokens[] = {
      {kFlagMissing, "missing"},
      {kFlagDegenerateDesign, "degenerate_design"},
      {kFlagBoundary, "boundary"},
      {kFlagSigmaFloor, "sigma_floor"},
      {kFlagDensityFloor, "density_floor"},
      {kFlagCrossing, "crossing"},
      {kFlagApproximate, "approximate"},
      {kFlagClamped, "clamped"},
  };
  std::string out;
  for (const auto& [bit, token] : kTokens) {
    if (!(flags & bit)) continue;
    if (!out.empty()) out += ';';
    out += token;
  }
  return out;
}

}  // namespace nsquant
