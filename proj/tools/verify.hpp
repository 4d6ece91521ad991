#pragma once

#include <iosfwd>

namespace limitfrac::tools {

/// Quick invariant checks on small meshes; prints one line per check and
/// returns true when all pass.
bool verify(std::ostream& os);

}  // namespace limitfrac::tools
