#pragma once

#include <iosfwd>

namespace pimmmu::cli {

// Exit status: 0 success, 1 validation failure or diff breach, 2 simulation abort.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pimmmu::cli
