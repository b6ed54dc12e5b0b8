#include "varxl/comparison.hpp"

#include <algorithm>

#include "varxl/benchmarks.hpp"

namespace varxl {

const std::vector<std::string>& benchmark_names()
{
    static const std::vector<std::string> names{"mean", "rw", "aic", "bic", "bgr", "factor"};
    return names;
}

void ComparisonConfig::validate() const
{
    spec.validate();
    if (structures.empty() && benchmarks.empty()) throw ValidationError("no models requested");
    for (const auto& b : benchmarks) {
        const auto& known = benchmark_names();
        if (std::find(known.begin(), known.end(), b) == known.end()) {
            throw ValidationError("unknown benchmark '" + b + "' (expected mean, rw, aic, bic, bgr or factor)");
        }
    }
    for (const auto& s : structures) {
        if (s.alpha && !(*s.alpha >= 0.0 && *s.alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
    }
    if (gridpoints < 2) throw ValidationError("gridpoints must be at least 2");
    if (!(grid_depth > 1.0)) throw ValidationError("grid depth must exceed 1");
    if (bgr_gridpoints < 1) throw ValidationError("BGR gridpoints must be at least 1");
    if (!(factor_threshold > 0.0 && factor_threshold <= 1.0)) throw ValidationError("factor threshold must lie in (0, 1]");
    solver.validate();
}

namespace {

ModelOutcome run_structure(const Matrix& endog, const Matrix& exog, const ComparisonConfig& config,
                           const PenaltyStructure& structure, const std::vector<Index>& origins)
{
    VarxlSettings settings;
    settings.spec = config.spec;
    settings.structure = structure;
    settings.solver = config.solver;
    if (config.minnesota) settings.target = MinnesotaTarget::random_walk(config.spec);

    ModelOutcome out;
    out.report.model = std::string(to_string(structure.kind));
    try {
        const SplitPoints sp = split_indices(endog.rows(), config.spec.h);
        const LambdaGrid grid =
            varxl_lambda_grid(endog, exog, settings, sp.T2, config.gridpoints, config.grid_depth);
        out.cv = rolling_cv(endog, exog, settings, grid);
        VarxlModel model(endog, exog, settings, out.cv->lambda_hat);
        out.report = evaluate(endog, model, config.spec.h, origins);
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

std::unique_ptr<ForecastModel> make_benchmark(const std::string& name, const Matrix& endog, const Matrix& exog,
                                              const Matrix& joint, const ComparisonConfig& config, double lambda)
{
    const VarxSpec& spec = config.spec;
    const int k = static_cast<int>(endog.cols());
    if (name == "mean") return std::make_unique<SampleMeanModel>(endog, spec.h);
    if (name == "rw") return std::make_unique<RandomWalkModel>(endog, spec.h);
    if (name == "aic") return std::make_unique<IcModel>(endog, exog, spec.p, spec.s, InformationCriterion::Aic, spec.h);
    if (name == "bic") return std::make_unique<IcModel>(endog, exog, spec.p, spec.s, InformationCriterion::Bic, spec.h);
    if (name == "bgr") return std::make_unique<BgrModel>(joint, k, spec.p, lambda, config.bgr_delta, spec.h);
    return std::make_unique<FactorModel>(joint, k, spec.p, spec.h, config.factor_threshold);
}

ModelOutcome run_benchmark(const std::string& name, const Matrix& endog, const Matrix& exog, const Matrix& joint,
                           const ComparisonConfig& config, const std::vector<Index>& origins)
{
    ModelOutcome out;
    out.report.model = name;
    try {
        double lambda = 0.0;
        if (name == "bgr") {
            const auto factory = [&](double l) { return make_benchmark(name, endog, exog, joint, config, l); };
            out.cv = rolling_cv(endog, bgr_lambda_grid(config.bgr_gridpoints), config.spec.h, factory,
                                cv_origins(endog.rows(), config.spec.h));
            lambda = out.cv->lambda_hat;
        }
        const auto model = make_benchmark(name, endog, exog, joint, config, lambda);
        out.report = evaluate(endog, *model, config.spec.h, origins);
    } catch (const Error& e) {
        out.error = e.what();
    }
    return out;
}

} // namespace

ComparisonReport compare_models(const Matrix& endog, const Matrix& exog, const ComparisonConfig& config)
{
    config.validate();
    if (endog.cols() != config.spec.k || exog.cols() != config.spec.m) {
        throw ValidationError("data dimensions do not match the model specification");
    }
    if (exog.cols() > 0 && exog.rows() != endog.rows()) throw ValidationError("exogenous data length mismatch");

    ComparisonReport out;
    out.h = config.spec.h;
    out.origins = evaluation_origins(endog.rows(), config.spec.h);
    SampleMeanModel baseline(endog, config.spec.h);
    out.baseline = evaluate(endog, baseline, config.spec.h, out.origins);
    out.baseline.msfe_relative = 1.0;

    for (const auto& structure : config.structures) {
        out.models.push_back(run_structure(endog, exog, config, structure, out.origins));
    }
    const Matrix joint = joint_series(endog, exog);
    for (const auto& name : config.benchmarks) {
        out.models.push_back(run_benchmark(name, endog, exog, joint, config, out.origins));
    }
    for (auto& m : out.models) {
        if (m.error.empty()) set_relative(m.report, out.baseline);
    }
    return out;
}

LossMatrix loss_matrix(const ComparisonReport& report)
{
    LossMatrix out;
    std::vector<const EvaluationReport*> rows;
    for (const auto& m : report.models) {
        if (m.error.empty()) rows.push_back(&m.report);
    }
    if (rows.empty()) throw ValidationError("no completed models to compare");
    const Index n = static_cast<Index>(rows.front()->per_period_sse.size());
    out.losses.resize(static_cast<Index>(rows.size()), n);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.model_names.push_back(rows[i]->model);
        for (Index t = 0; t < n; ++t) out.losses(static_cast<Index>(i), t) = rows[i]->per_period_sse[static_cast<std::size_t>(t)];
    }
    return out;
}

} // namespace varxl
