#pragma once

#include <string>
#include <vector>

#include "limitfrac/config.hpp"

namespace limitfrac {

/// Named experiment configurations. Throws ConfigError listing the valid
/// names when `name` is unknown.
RunConfig preset(const std::string& name);

std::vector<std::string> preset_names();

/// LEFM preset with the same geometry and loading as an NLSL preset, or an
/// empty string when there is none.
std::string lefm_counterpart(const std::string& nlsl_name);

}  // namespace limitfrac
