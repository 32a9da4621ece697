#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tsh/config.hpp"
#include "tsh/helmholtz.hpp"

namespace tsh::cli {

enum ExitCode : int { kOk = 0, kNotHamiltonian = 1, kError = 2 };

/// Entry point of the `tsh` tool; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Dispatch a verb on an already loaded configuration.
int run_command(const std::string& verb, const RunConfig& cfg, std::ostream& out, std::ostream& err);

nlohmann::json to_json(const HelmholtzReport& r);

}  // namespace tsh::cli
