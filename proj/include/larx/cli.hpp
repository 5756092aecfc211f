#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace larx {

// larx <fit|forecast|caa|synth|check> --config <path> [--data <path>]... [--out <dir>]
//      [--format json|csv] [--variant <name>] [--seed <n>]
// Returns 0 on success, 1 on a module error and 2 on a usage error; errors are
// written to `err` as {"error":{"code":...,"message":...}}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace larx
