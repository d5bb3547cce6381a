#pragma once

#include <iosfwd>

namespace aquactl {

/// Command-line entry point. Returns 0 on success, 1 on configuration or
/// usage errors, 2 on runtime failures.
int cli_main(int argc, char** argv);
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace aquactl
