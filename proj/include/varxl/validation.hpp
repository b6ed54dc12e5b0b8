#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "varxl/penalties.hpp"
#include "varxl/solvers.hpp"
#include "varxl/types.hpp"
#include "varxl/varx.hpp"

namespace varxl {

// T1 = floor(T/3), T2 = floor(2T/3). An origin t means observations 1..t are
// known and y_{t+h} is forecast.
struct SplitPoints {
    Index T1 = 0;
    Index T2 = 0;
};

SplitPoints split_indices(Index T, int h);
std::vector<Index> cv_origins(Index T, int h);         // T1 .. T2-h
std::vector<Index> evaluation_origins(Index T, int h); // T2-h .. T-h

// A forecasting strategy that refits on an expanding window. Calls come with
// non-decreasing origins, so models may keep warm-start state between them.
class ForecastModel {
public:
    virtual ~ForecastModel() = default;
    virtual std::string name() const = 0;
    // Forecast of row t+h-1 (0-based) from rows 0..t-1.
    virtual Vector forecast(Index t) = 0;
    // Fraction of zero coefficients in the most recent fit; NaN when the
    // model has no coefficient matrix.
    virtual double sparsity() const { return std::numeric_limits<double>::quiet_NaN(); }
};

using ModelFactory = std::function<std::unique_ptr<ForecastModel>(double lambda)>;

struct CvResult {
    double lambda_hat = 0.0;
    std::vector<double> grid;
    std::vector<double> msfe_curve;
    std::vector<Index> origins;
    Matrix per_origin_errors; // origins x grid; NaN marks a failed fit
    std::vector<char> valid;  // per grid value
};

// Rolling-origin selection over a grid: every candidate is refit at each
// origin and scored by its h-step squared forecast error. Ties go to the
// larger grid value.
CvResult rolling_cv(const Matrix& endog, const std::vector<double>& grid, int h, const ModelFactory& make_model,
                    const std::vector<Index>& origins);

struct VarxlSettings {
    VarxSpec spec;
    PenaltyStructure structure;
    std::optional<MinnesotaTarget> target;
    SolverOptions solver;
};

// VARX-L refit at a fixed lambda with warm starts across origins. Models
// created from the same DesignCache share lagged designs and solver
// workspaces at each origin.
class VarxlModel : public ForecastModel {
public:
    struct DesignCache;

    VarxlModel(const Matrix& endog, const Matrix& exog, VarxlSettings settings, double lambda,
               std::shared_ptr<DesignCache> cache = nullptr);
    ~VarxlModel() override;

    std::string name() const override;
    Vector forecast(Index t) override;
    double sparsity() const override { return sparsity_; }
    const std::optional<FitResult>& last_fit() const { return last_; }

    static std::shared_ptr<DesignCache> make_cache();

private:
    const Matrix& endog_;
    const Matrix& exog_;
    VarxlSettings settings_;
    double lambda_;
    std::shared_ptr<DesignCache> cache_;
    std::optional<Matrix> warm_;
    std::optional<FitResult> last_;
    double sparsity_ = std::numeric_limits<double>::quiet_NaN();
};

// Design over rows 0..t-1 for the given horizon, with the target applied and
// centered, exactly as the VARX-L fits see it.
LaggedDesign varxl_design(const Matrix& endog, const Matrix& exog, const VarxlSettings& settings, Index t);

// Grid from lambda_max of the design over rows 0..t-1.
LambdaGrid varxl_lambda_grid(const Matrix& endog, const Matrix& exog, const VarxlSettings& settings, Index t,
                             int n_points, double depth);

CvResult rolling_cv(const Matrix& endog, const Matrix& exog, const VarxlSettings& settings, const LambdaGrid& grid);

struct EvaluationReport {
    std::string model;
    double msfe = 0.0;
    double msfe_relative = std::numeric_limits<double>::quiet_NaN();
    double sparsity_ratio_avg = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> per_period_sse;
    std::vector<Index> origins;
    Matrix forecasts; // origins x k
};

// Expanding-window forecasts from the given origins, scored against the
// realized values.
EvaluationReport evaluate(const Matrix& endog, ForecastModel& model, int h, const std::vector<Index>& origins);

// Sets msfe_relative = msfe / baseline.msfe.
void set_relative(EvaluationReport& report, const EvaluationReport& baseline);

} // namespace varxl
