// Command-line front end. Exit codes: 0 success, 2 invalid input or flags,
// 3 numerical failure.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gms {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// args[0] is the program name. Diagnostics go to err, summaries to out.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Library version string recorded in run manifests.
const char* version();

/// Fixed five-stop color ramp used by the SVG plot: t in [0,1] maps through
/// #440154, #3b528b, #21918c, #5ec962, #fde725 by linear RGB interpolation.
/// Returns "#rrggbb".
std::string ramp_color(double t);

} // namespace gms
