#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace varxl::cli {

enum ExitCode : int { Success = 0, ValidationFailure = 2, NumericalFailure = 3 };

struct RunConfig {
    std::string command;
    std::string endog_path;
    std::string exog_path;
    std::string losses_path;
    std::vector<std::string> structures; // command default when empty
    int p = 1;
    int s = 0;
    int h = 1;
    int gridpoints = 10;
    std::optional<double> grid_depth; // 25 for data commands, 1000 for simulate
    std::optional<double> alpha; // structure default 1/(k+1) when empty
    bool minnesota = false;
    std::vector<std::string> benchmarks;
    bool mcs = false;
    double mcs_alpha = 0.15;
    int n_boot = 5000;
    std::uint64_t seed = 1;
    std::string out_path;
    double tol = 1e-4;
    int max_iter = 1000;
    double bgr_delta = 0.0;
    int scenario = 1;
    int reps = 100;
    int length = 100;

    // Keys mirror the long flag names with dashes replaced by underscores.
    void merge_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

// Each command validates its inputs and returns the JSON report; errors
// surface as ValidationError / NumericalError.
nlohmann::json cmd_fit(const RunConfig& config);
nlohmann::json cmd_evaluate(const RunConfig& config);
nlohmann::json cmd_compare(const RunConfig& config);
nlohmann::json cmd_simulate(const RunConfig& config);
nlohmann::json cmd_mcs(const RunConfig& config);

// Human-readable rendering of a command report.
std::string render_table(const std::string& command, const nlohmann::json& report);

// Full command line entry point. The JSON report goes to --out when given,
// otherwise to `out` with the table on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace varxl::cli
