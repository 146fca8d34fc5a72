#pragma once

#include <iosfwd>

namespace dampwave {

// Entry point of the dampwave tool. Exit codes: 0 ok, 1 configuration or
// usage error, 2 numerical failure, 3 blow-up.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dampwave
