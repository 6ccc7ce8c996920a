#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace neurocactus {

// args excludes the program name. Returns 0 (ok), 1 (domain error) or 2 (usage).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace neurocactus
