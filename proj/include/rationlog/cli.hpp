#pragma once

#include <iosfwd>

namespace rationlog {

// Exit codes: 0 success, 1 domain error, 2 usage error.
int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rationlog
