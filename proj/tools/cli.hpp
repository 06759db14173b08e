#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace tenrec {

// Exit codes of the command-line front end.
//   0  success
//   1  usage or argument error
//   2  I/O or file format error
//   3  numerical failure or failed certification check
//   4  non-convergence with --strict
int cli_run(const std::vector<std::string>& args, std::ostream& out = std::cout,
            std::ostream& err = std::cerr);

} // namespace tenrec
