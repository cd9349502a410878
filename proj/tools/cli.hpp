#pragma once
// Entry point of the lscape command line, callable in-process.
#include <ostream>
#include <string>
#include <vector>

namespace lscape {

// args excludes the program name. Returns the process exit code: 0 on
// success, 2 for usage errors, 3 for data or validation errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lscape
