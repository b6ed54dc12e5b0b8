#pragma once

#include <optional>
#include <string>
#include <vector>

#include "varxl/mcs.hpp"
#include "varxl/penalties.hpp"
#include "varxl/solvers.hpp"
#include "varxl/validation.hpp"
#include "varxl/varx.hpp"

namespace varxl {

struct ComparisonConfig {
    VarxSpec spec;
    std::vector<PenaltyStructure> structures;
    std::vector<std::string> benchmarks; // mean, rw, aic, bic, bgr, factor
    int gridpoints = 10;
    double grid_depth = 25.0;
    bool minnesota = false;
    SolverOptions solver;
    double bgr_delta = 0.0;
    int bgr_gridpoints = 10;
    double factor_threshold = 0.95;

    void validate() const;
};

const std::vector<std::string>& benchmark_names();

struct ModelOutcome {
    EvaluationReport report;
    std::optional<CvResult> cv; // penalized models only
    std::string error;          // nonempty when the model failed
};

struct ComparisonReport {
    std::vector<ModelOutcome> models; // structures first, then benchmarks, in request order
    EvaluationReport baseline;        // sample mean on the same origins
    std::vector<Index> origins;
    int h = 1;
};

// Every structure goes through rolling cross-validation and then expanding-
// window evaluation; benchmarks with a tuning parameter (bgr) are tuned the
// same way. All models share the evaluation origins and are reported relative
// to the sample mean.
ComparisonReport compare_models(const Matrix& endog, const Matrix& exog, const ComparisonConfig& config);

// Per-period losses of the models that completed, in report order.
LossMatrix loss_matrix(const ComparisonReport& report);

} // namespace varxl
