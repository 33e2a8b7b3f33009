#ifndef PHASELAB_CLI_HPP
#define PHASELAB_CLI_HPP

#include <string>
#include <vector>

namespace phaselab::cli {

// Parses and runs one command line. Exit codes: 0 success, 1 runtime
// failure (single-line error on stderr), 2 usage error.
int dispatch(int argc, const char* const* argv);

// Same, args given without the program name.
int dispatch(const std::vector<std::string>& args);

}  // namespace phaselab::cli

#endif
