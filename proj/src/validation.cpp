#include "varxl/validation.hpp"

#include <cmath>
#include <string>

namespace varxl {

SplitPoints split_indices(Index T, int h)
{
    if (h < 1) throw ValidationError("forecast horizon must be at least 1");
    SplitPoints sp{T / 3, (2 * T) / 3};
    if (sp.T1 < 1 || sp.T2 - h < sp.T1) {
        throw ValidationError("series of length " + std::to_string(T) + " is too short to split into initialization, "
                              "training and evaluation thirds at horizon " + std::to_string(h));
    }
    return sp;
}

std::vector<Index> cv_origins(Index T, int h)
{
    const SplitPoints sp = split_indices(T, h);
    std::vector<Index> out;
    for (Index t = sp.T1; t <= sp.T2 - h; ++t) out.push_back(t);
    return out;
}

std::vector<Index> evaluation_origins(Index T, int h)
{
    const SplitPoints sp = split_indices(T, h);
    std::vector<Index> out;
    for (Index t = sp.T2 - h; t <= T - h; ++t) out.push_back(t);
    return out;
}

CvResult rolling_cv(const Matrix& endog, const std::vector<double>& grid, int h, const ModelFactory& make_model,
                    const std::vector<Index>& origins)
{
    if (grid.empty()) throw ValidationError("rolling_cv needs a nonempty grid");
    if (origins.empty()) throw ValidationError("rolling_cv needs at least one origin");
    const Index n_grid = static_cast<Index>(grid.size());
    std::vector<std::unique_ptr<ForecastModel>> models;
    models.reserve(grid.size());
    for (double lambda : grid) models.push_back(make_model(lambda));

    CvResult out;
    out.grid = grid;
    out.origins = origins;
    out.per_origin_errors = Matrix::Zero(static_cast<Index>(origins.size()), n_grid);
    out.valid.assign(grid.size(), 1);
    for (std::size_t o = 0; o < origins.size(); ++o) {
        const Index t = origins[o];
        if (t < 1 || t + h > endog.rows()) throw ValidationError("forecast origin outside the sample");
        const Vector actual = endog.row(t + h - 1).transpose();
        for (Index g = 0; g < n_grid; ++g) {
            double err = std::numeric_limits<double>::quiet_NaN();
            try {
                const Vector yhat = models[static_cast<std::size_t>(g)]->forecast(t);
                err = (actual - yhat).squaredNorm();
            } catch (const Error&) {
            }
            if (!std::isfinite(err)) out.valid[static_cast<std::size_t>(g)] = 0;
            out.per_origin_errors(static_cast<Index>(o), g) = err;
        }
    }

    out.msfe_curve.resize(grid.size());
    int best = -1;
    for (Index g = 0; g < n_grid; ++g) {
        const auto gi = static_cast<std::size_t>(g);
        out.msfe_curve[gi] = out.valid[gi] ? out.per_origin_errors.col(g).mean()
                                           : std::numeric_limits<double>::quiet_NaN();
        if (!out.valid[gi]) continue;
        const auto bi = static_cast<std::size_t>(best);
        if (best < 0 || out.msfe_curve[gi] < out.msfe_curve[bi] ||
            (out.msfe_curve[gi] == out.msfe_curve[bi] && grid[gi] > grid[bi])) {
            best = static_cast<int>(g);
        }
    }
    if (best < 0) throw NumericalError("every candidate failed during cross-validation");
    out.lambda_hat = grid[static_cast<std::size_t>(best)];
    return out;
}

struct VarxlModel::DesignCache {
    Index t = -1;
    std::unique_ptr<LaggedDesign> design;
    std::unique_ptr<SolverWorkspace> workspace;
};

std::shared_ptr<VarxlModel::DesignCache> VarxlModel::make_cache() { return std::make_shared<DesignCache>(); }

VarxlModel::VarxlModel(const Matrix& endog, const Matrix& exog, VarxlSettings settings, double lambda,
                       std::shared_ptr<DesignCache> cache)
    : endog_(endog), exog_(exog), settings_(std::move(settings)), lambda_(lambda),
      cache_(cache ? std::move(cache) : make_cache())
{
    settings_.spec.validate();
}

VarxlModel::~VarxlModel() = default;

std::string VarxlModel::name() const { return std::string(to_string(settings_.structure.kind)); }

LaggedDesign varxl_design(const Matrix& endog, const Matrix& exog, const VarxlSettings& settings, Index t)
{
    const VarxSpec& spec = settings.spec;
    const Matrix exog_window = spec.m > 0 ? Matrix(exog.topRows(t)) : Matrix(t, 0);
    LaggedDesign design = build_lagged_design(endog.topRows(t), exog_window, spec, spec.h, false);
    if (settings.target) apply_target(design, settings.target->stacked());
    center_design(design);
    return design;
}

LambdaGrid varxl_lambda_grid(const Matrix& endog, const Matrix& exog, const VarxlSettings& settings, Index t,
                             int n_points, double depth)
{
    const LaggedDesign design = varxl_design(endog, exog, settings, t);
    return lambda_grid(lambda_max(design, settings.structure, settings.spec), n_points, depth);
}

Vector VarxlModel::forecast(Index t)
{
    const VarxSpec& spec = settings_.spec;
    if (cache_->t != t || !cache_->design) {
        cache_->workspace.reset();
        cache_->design = std::make_unique<LaggedDesign>(varxl_design(endog_, exog_, settings_, t));
        cache_->workspace = std::make_unique<SolverWorkspace>(*cache_->design);
        cache_->t = t;
    }
    SolverOptions opts = settings_.solver;
    opts.warm_start = warm_;
    opts.workspace = cache_->workspace.get();
    FitResult fit = fit_design(*cache_->design, settings_.structure, lambda_, opts);
    warm_ = fit.B;
    if (settings_.target) {
        fit.coeffs = CoefficientSet::from_stacked(fit.coeffs.nu, fit.B + settings_.target->stacked(), spec);
    }
    sparsity_ = fit.sparsity_ratio;

    const Index lag = spec.max_lag();
    const Matrix endog_tail = endog_.middleRows(t - lag, lag);
    const Matrix exog_tail = spec.m > 0 ? Matrix(exog_.middleRows(t - lag, lag)) : Matrix(lag, 0);
    Vector yhat = forecast_direct(fit.coeffs, endog_tail, exog_tail, spec);
    last_ = std::move(fit);
    return yhat;
}

CvResult rolling_cv(const Matrix& endog, const Matrix& exog, const VarxlSettings& settings, const LambdaGrid& grid)
{
    const auto cache = VarxlModel::make_cache();
    const auto factory = [&](double lambda) -> std::unique_ptr<ForecastModel> {
        return std::make_unique<VarxlModel>(endog, exog, settings, lambda, cache);
    };
    return rolling_cv(endog, grid.values, settings.spec.h, factory, cv_origins(endog.rows(), settings.spec.h));
}

EvaluationReport evaluate(const Matrix& endog, ForecastModel& model, int h, const std::vector<Index>& origins)
{
    EvaluationReport out;
    out.model = model.name();
    out.origins = origins;
    out.forecasts.resize(static_cast<Index>(origins.size()), endog.cols());
    double sparsity_sum = 0.0;
    int sparsity_count = 0;
    for (std::size_t o = 0; o < origins.size(); ++o) {
        const Index t = origins[o];
        if (t < 1 || t + h > endog.rows()) throw ValidationError("forecast origin outside the sample");
        const Vector yhat = model.forecast(t);
        if (yhat.size() != endog.cols() || !yhat.allFinite()) {
            throw NumericalError(model.name() + " produced an invalid forecast at origin " + std::to_string(t));
        }
        out.forecasts.row(static_cast<Index>(o)) = yhat.transpose();
        out.per_period_sse.push_back((endog.row(t + h - 1).transpose() - yhat).squaredNorm());
        const double s = model.sparsity();
        if (std::isfinite(s)) {
            sparsity_sum += s;
            ++sparsity_count;
        }
    }
    double total = 0.0;
    for (double v : out.per_period_sse) total += v;
    out.msfe = out.per_period_sse.empty() ? 0.0 : total / static_cast<double>(out.per_period_sse.size());
    if (sparsity_count > 0) out.sparsity_ratio_avg = sparsity_sum / sparsity_count;
    return out;
}

void set_relative(EvaluationReport& report, const EvaluationReport& baseline)
{
    report.msfe_relative = baseline.msfe > 0.0 ? report.msfe / baseline.msfe
                                               : std::numeric_limits<double>::quiet_NaN();
}

} // namespace varxl
