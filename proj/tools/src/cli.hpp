#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pathprob::cli {

// args excludes the program name. Exit codes: 0 ok, 1 usage, 2 numeric, 3 invariant.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace pathprob::cli
