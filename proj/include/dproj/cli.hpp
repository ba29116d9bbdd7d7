#pragma once

#include <iosfwd>

namespace dproj::cli {

// Exit status: 0 pass, 1 violation or numerical failure, 2 usage error.
int run(int argc, char** argv);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace dproj::cli
