#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace eigenfem::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kError = 1,
    kWeakOnly = 2,
    kConditionsFail = 3,
    kSolverFailure = 4,
};

/// Validated command configuration; echoed into every output file.
struct RunConfig {
    std::string command;
    std::string problem = "laplace";
    std::string mesh = "mesh45";
    std::vector<int> J{21};
    std::vector<std::string> node_files;
    std::vector<std::string> ele_files;
    int k = 6;
    std::string mass = "consistent";
    double tol = 1e-10;
    double ref = 0.0;  ///< 0 selects the documented default for catalog problems
    std::string out = ".";

    nlohmann::json to_json() const;
};

/// Parses argv and runs the selected subcommand, writing human-readable
/// output to out and diagnostics to err. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace eigenfem::cli
