#pragma once

#include <ostream>

namespace qres {

// Exit codes: 0 success, 1 validation error, 2 physics-contract violation,
// 3 optimizer non-convergence.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace qres
