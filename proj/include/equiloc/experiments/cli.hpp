#pragma once

#include <iosfwd>

namespace equiloc::experiments {

/// equiloc command line. Returns 0 on success, 1 on usage errors, 2 on runtime errors.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace equiloc::experiments
