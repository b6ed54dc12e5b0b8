#include "varxl/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>

#include "varxl/benchmarks.hpp"
#include "varxl/comparison.hpp"
#include "varxl/mcs.hpp"
#include "varxl/penalties.hpp"
#include "varxl/series.hpp"
#include "varxl/simulation.hpp"
#include "varxl/solvers.hpp"
#include "varxl/validation.hpp"
#include "varxl/varx.hpp"

namespace varxl::cli {

using nlohmann::json;

namespace {

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

std::vector<std::string> string_list(const json& j)
{
    if (j.is_string()) return split_list(j.get<std::string>());
    if (!j.is_array()) throw ValidationError("expected a list of names");
    std::vector<std::string> out;
    for (const auto& e : j) out.push_back(e.get<std::string>());
    return out;
}

template <typename T>
void read_key(const json& j, const char* key, T& field)
{
    if (!j.contains(key) || j.at(key).is_null()) return;
    try {
        field = j.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError(std::string("config key '") + key + "' has the wrong type");
    }
}

json matrix_json(const Matrix& m)
{
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const Vector& v)
{
    json out = json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

struct Data {
    StandardizedSeries endog;
    std::optional<StandardizedSeries> exog;
    Matrix exog_values; // standardized, T x m (m may be 0)
};

Data load_data(const RunConfig& c)
{
    if (c.endog_path.empty()) throw ValidationError("--endog is required");
    if (c.exog_path.empty() && c.s > 0) throw ValidationError("exogenous lag order requires exogenous data");
    Data d;
    d.endog = standardize(read_csv(c.endog_path));
    if (!c.exog_path.empty()) {
        d.exog = standardize(read_csv(c.exog_path));
        if (d.exog->series.length() != d.endog.series.length()) {
            throw ValidationError("endogenous and exogenous files must have the same number of rows");
        }
        d.exog_values = d.exog->series.values;
    } else {
        d.exog_values = Matrix(d.endog.series.length(), 0);
    }
    return d;
}

VarxSpec spec_for(const RunConfig& c, const Data& d)
{
    VarxSpec spec;
    spec.k = static_cast<int>(d.endog.series.width());
    spec.m = static_cast<int>(d.exog_values.cols());
    spec.p = c.p;
    spec.s = c.s;
    spec.h = c.h;
    spec.validate();
    return spec;
}

std::vector<PenaltyStructure> structures_for(const RunConfig& c, std::vector<std::string> fallback)
{
    std::vector<std::string> names = c.structures.empty() ? std::move(fallback) : c.structures;
    if (names.size() == 1 && names[0] == "none") names.clear();
    if (names.size() == 1 && names[0] == "all") {
        names.clear();
        for (PenaltyKind k : all_penalty_kinds()) names.emplace_back(to_string(k));
    }
    std::vector<PenaltyStructure> out;
    for (const auto& n : names) {
        PenaltyStructure ps;
        ps.kind = parse_penalty_kind(n);
        if (ps.is_sparse()) ps.alpha = c.alpha;
        out.push_back(ps);
    }
    return out;
}

SolverOptions solver_for(const RunConfig& c)
{
    SolverOptions o;
    o.tol = c.tol;
    o.max_iter = c.max_iter;
    o.validate();
    return o;
}

void check_common(const RunConfig& c)
{
    if (c.gridpoints < 2) throw ValidationError("--gridpoints must be at least 2");
    if (c.grid_depth && !(*c.grid_depth > 1.0)) throw ValidationError("--grid-depth must exceed 1");
    if (c.alpha && !(*c.alpha >= 0.0 && *c.alpha <= 1.0)) throw ValidationError("--alpha must lie in [0, 1]");
}

VarxlSettings settings_for(const RunConfig& c, const VarxSpec& spec, const PenaltyStructure& ps)
{
    VarxlSettings s;
    s.spec = spec;
    s.structure = ps;
    s.solver = solver_for(c);
    if (c.minnesota) s.target = MinnesotaTarget::random_walk(spec);
    return s;
}

json cv_json(const CvResult& cv)
{
    json j;
    j["lambda_hat"] = cv.lambda_hat;
    j["lambda_grid"] = cv.grid;
    json curve = json::array();
    for (double v : cv.msfe_curve) curve.push_back(number(v));
    j["msfe_curve"] = curve;
    j["cv_origins"] = cv.origins.size();
    return j;
}

json report_json(const EvaluationReport& r, const StandardizedSeries& endog)
{
    json j;
    j["model"] = r.model;
    j["msfe"] = number(r.msfe);
    j["msfe_relative"] = number(r.msfe_relative);
    j["sparsity_ratio"] = number(r.sparsity_ratio_avg);
    j["per_period_sse"] = r.per_period_sse;
    Matrix restored(r.forecasts.rows(), r.forecasts.cols());
    for (Index i = 0; i < r.forecasts.rows(); ++i) restored.row(i) = endog.restore(r.forecasts.row(i).transpose()).transpose();
    j["forecasts"] = matrix_json(restored);
    return j;
}

std::string fmt(double v, int precision = 4)
{
    if (!std::isfinite(v)) return "-";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

double json_number(const json& j, const char* key)
{
    if (!j.contains(key) || !j.at(key).is_number()) return std::nan("");
    return j.at(key).get<double>();
}

std::string pad(const std::string& s, std::size_t w)
{
    return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' ');
}

} // namespace

void RunConfig::merge_json(const json& j)
{
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    read_key(j, "endog", endog_path);
    read_key(j, "exog", exog_path);
    read_key(j, "losses", losses_path);
    if (j.contains("structure")) structures = string_list(j.at("structure"));
    read_key(j, "p", p);
    read_key(j, "s", s);
    read_key(j, "h", h);
    read_key(j, "gridpoints", gridpoints);
    if (j.contains("grid_depth") && !j.at("grid_depth").is_null()) {
        double d = 0.0;
        read_key(j, "grid_depth", d);
        grid_depth = d;
    }
    if (j.contains("alpha") && !j.at("alpha").is_null()) {
        double a = 0.0;
        read_key(j, "alpha", a);
        alpha = a;
    }
    read_key(j, "minnesota", minnesota);
    if (j.contains("benchmarks")) benchmarks = string_list(j.at("benchmarks"));
    read_key(j, "mcs", mcs);
    read_key(j, "mcs_alpha", mcs_alpha);
    read_key(j, "n_boot", n_boot);
    read_key(j, "seed", seed);
    read_key(j, "out", out_path);
    read_key(j, "tol", tol);
    read_key(j, "max_iter", max_iter);
    read_key(j, "bgr_delta", bgr_delta);
    read_key(j, "scenario", scenario);
    read_key(j, "reps", reps);
    read_key(j, "length", length);
}

json RunConfig::to_json() const
{
    json j;
    j["endog"] = endog_path;
    j["exog"] = exog_path;
    j["losses"] = losses_path;
    j["structure"] = structures;
    j["p"] = p;
    j["s"] = s;
    j["h"] = h;
    j["gridpoints"] = gridpoints;
    j["grid_depth"] = grid_depth ? json(*grid_depth) : json(nullptr);
    j["alpha"] = alpha ? json(*alpha) : json(nullptr);
    j["minnesota"] = minnesota;
    j["benchmarks"] = benchmarks;
    j["mcs"] = mcs;
    j["mcs_alpha"] = mcs_alpha;
    j["n_boot"] = n_boot;
    j["seed"] = seed;
    j["out"] = out_path;
    j["tol"] = tol;
    j["max_iter"] = max_iter;
    j["bgr_delta"] = bgr_delta;
    j["scenario"] = scenario;
    j["reps"] = reps;
    j["length"] = length;
    return j;
}

json cmd_fit(const RunConfig& c)
{
    check_common(c);
    const Data d = load_data(c);
    const VarxSpec spec = spec_for(c, d);
    const auto structures = structures_for(c, {"basic"});
    if (structures.size() != 1) throw ValidationError("fit takes exactly one structure");
    const VarxlSettings settings = settings_for(c, spec, structures.front());
    const Matrix& Y = d.endog.series.values;
    const SplitPoints sp = split_indices(Y.rows(), spec.h);

    const LambdaGrid grid = varxl_lambda_grid(Y, d.exog_values, settings, sp.T2, c.gridpoints, c.grid_depth.value_or(25.0));
    const CvResult cv = rolling_cv(Y, d.exog_values, settings, grid);

    VarxlModel model(Y, d.exog_values, settings, cv.lambda_hat);
    // Forecasting origin T2 fits on the training span 0..T2-1.
    model.forecast(sp.T2);
    const FitResult& fit = *model.last_fit();
    const Index L = spec.max_lag();
    const Matrix exog_tail = spec.m > 0 ? Matrix(d.exog_values.bottomRows(L)) : Matrix(L, 0);
    const Vector yhat = forecast_direct(fit.coeffs, Y.bottomRows(L), exog_tail, spec);

    json j;
    j["command"] = "fit";
    j["structure"] = std::string(to_string(settings.structure.kind));
    j["alpha"] = settings.structure.is_sparse() ? json(settings.structure.resolved_alpha(spec.k)) : json(nullptr);
    j["spec"] = {{"k", spec.k}, {"m", spec.m}, {"p", spec.p}, {"s", spec.s}, {"h", spec.h}};
    j["minnesota"] = c.minnesota;
    j["training_rows"] = sp.T2;
    j["cv"] = cv_json(cv);
    j["lambda_hat"] = cv.lambda_hat;
    j["coefficients"] = {{"intercept", vector_json(fit.coeffs.nu)},
                         {"endogenous", matrix_json(fit.coeffs.phi)},
                         {"exogenous", matrix_json(fit.coeffs.beta)},
                         {"stacked", matrix_json(fit.coeffs.stacked())}};
    j["sparsity_ratio"] = fit.sparsity_ratio;
    j["objective"] = fit.objective;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    j["forecast"] = {{"horizon", spec.h}, {"values", vector_json(d.endog.restore(yhat))}};
    j["series"] = d.endog.series.labels;
    return j;
}

json cmd_evaluate(const RunConfig& c)
{
    check_common(c);
    const Data d = load_data(c);
    const VarxSpec spec = spec_for(c, d);
    const auto structures = structures_for(c, {"basic"});
    if (structures.size() != 1) throw ValidationError("evaluate takes exactly one structure");
    const VarxlSettings settings = settings_for(c, spec, structures.front());
    const Matrix& Y = d.endog.series.values;
    const SplitPoints sp = split_indices(Y.rows(), spec.h);

    const LambdaGrid grid = varxl_lambda_grid(Y, d.exog_values, settings, sp.T2, c.gridpoints, c.grid_depth.value_or(25.0));
    const CvResult cv = rolling_cv(Y, d.exog_values, settings, grid);
    const auto origins = evaluation_origins(Y.rows(), spec.h);
    VarxlModel model(Y, d.exog_values, settings, cv.lambda_hat);
    EvaluationReport report = evaluate(Y, model, spec.h, origins);
    SampleMeanModel mean(Y, spec.h);
    const EvaluationReport baseline = evaluate(Y, mean, spec.h, origins);
    set_relative(report, baseline);

    json j = report_json(report, d.endog);
    j["command"] = "evaluate";
    j["cv"] = cv_json(cv);
    j["lambda_hat"] = cv.lambda_hat;
    j["origins"] = origins;
    j["baseline_msfe"] = baseline.msfe;
    return j;
}

json cmd_compare(const RunConfig& c)
{
    check_common(c);
    const Data d = load_data(c);
    ComparisonConfig cc;
    cc.spec = spec_for(c, d);
    cc.structures = structures_for(c, {"basic"});
    cc.benchmarks = c.benchmarks;
    cc.gridpoints = c.gridpoints;
    cc.grid_depth = c.grid_depth.value_or(25.0);
    cc.minnesota = c.minnesota;
    cc.solver = solver_for(c);
    cc.bgr_delta = c.bgr_delta;
    const Matrix& Y = d.endog.series.values;
    const ComparisonReport report = compare_models(Y, d.exog_values, cc);

    json models = json::array();
    for (const auto& m : report.models) {
        json e;
        if (m.error.empty()) {
            e = report_json(m.report, d.endog);
            e.erase("forecasts");
        } else {
            e["model"] = m.report.model;
            e["error"] = m.error;
        }
        if (m.cv) e["lambda_hat"] = m.cv->lambda_hat;
        models.push_back(std::move(e));
    }
    json j;
    j["command"] = "compare";
    j["origins"] = report.origins;
    j["baseline_msfe"] = report.baseline.msfe;
    j["models"] = models;
    if (c.mcs) {
        McsOptions mo;
        mo.alpha = c.mcs_alpha;
        mo.n_boot = c.n_boot;
        mo.seed = c.seed;
        const McsResult r = model_confidence_set(loss_matrix(report), mo);
        j["mcs"] = {{"alpha", mo.alpha}, {"surviving", r.surviving}, {"block_length", r.block_length}};
    }
    return j;
}

json cmd_simulate(const RunConfig& c)
{
    check_common(c);
    ScenarioConfig sc;
    sc.id = c.scenario;
    sc.n_reps = c.reps;
    sc.T = c.length;
    sc.seed = c.seed;
    sc.validate();
    StudyOptions so;
    so.structures = structures_for(c, {"all"});
    so.benchmarks = c.benchmarks.empty() ? std::vector<std::string>{"mean", "rw", "aic", "bic"} : c.benchmarks;
    so.gridpoints = c.gridpoints;
    so.grid_depth = c.grid_depth.value_or(so.grid_depth);
    so.solver = solver_for(c);
    const StudyReport r = run_study(sc, so);

    json rows = json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"model", row.model},
                        {"penalized", row.penalized},
                        {"msfe", number(row.mean_msfe)},
                        {"msfe_se", number(row.se_msfe)},
                        {"msfe_relative", number(row.mean_relative)},
                        {"msfe_relative_se", number(row.se_relative)},
                        {"sparsity_ratio", number(row.mean_sparsity)},
                        {"completed", row.completed},
                        {"failures", row.failures}});
    }
    json j;
    j["command"] = "simulate";
    j["scenario"] = r.scenario;
    j["reps"] = r.n_reps;
    j["length"] = sc.T;
    j["seed"] = sc.seed;
    j["spectral_radius"] = r.spectral_radius;
    j["models"] = rows;
    return j;
}

json cmd_mcs(const RunConfig& c)
{
    if (c.losses_path.empty()) throw ValidationError("--losses is required");
    const MultivariateSeries s = read_csv(c.losses_path);
    LossMatrix lm;
    lm.losses = s.values.transpose();
    for (Index i = 0; i < s.width(); ++i) {
        lm.model_names.push_back(s.labels.empty() ? "model" + std::to_string(i + 1) : s.labels[static_cast<std::size_t>(i)]);
    }
    McsOptions mo;
    mo.alpha = c.mcs_alpha;
    mo.n_boot = c.n_boot;
    mo.seed = c.seed;
    const McsResult r = model_confidence_set(lm, mo);
    json trace = json::array();
    for (const auto& step : r.trace) {
        trace.push_back({{"eliminated", step.eliminated}, {"statistic", step.statistic}, {"p_value", step.p_value}});
    }
    json j;
    j["command"] = "mcs";
    j["alpha"] = mo.alpha;
    j["n_boot"] = mo.n_boot;
    j["seed"] = mo.seed;
    j["block_length"] = r.block_length;
    j["surviving"] = r.surviving;
    j["final_p_value"] = r.final_p_value;
    j["trace"] = trace;
    return j;
}

std::string render_table(const std::string& command, const json& r)
{
    std::ostringstream out;
    if (command == "fit") {
        out << "structure " << r.at("structure").get<std::string>() << "  lambda " << fmt(json_number(r, "lambda_hat"), 6)
            << "  sparsity " << fmt(json_number(r, "sparsity_ratio")) << "\n";
        const auto& grid = r.at("cv").at("lambda_grid");
        const auto& curve = r.at("cv").at("msfe_curve");
        out << pad("lambda", 14) << "cv msfe\n";
        for (std::size_t i = 0; i < grid.size(); ++i) {
            out << pad(fmt(grid[i].get<double>(), 6), 14) << (curve[i].is_null() ? "-" : fmt(curve[i].get<double>())) << "\n";
        }
        out << "forecast";
        for (const auto& v : r.at("forecast").at("values")) out << " " << fmt(v.get<double>());
        out << "\n";
    } else if (command == "evaluate") {
        out << pad("model", 18) << pad("msfe", 12) << pad("relative", 12) << "sparsity\n";
        out << pad(r.at("model").get<std::string>(), 18) << pad(fmt(json_number(r, "msfe")), 12)
            << pad(fmt(json_number(r, "msfe_relative")), 12) << fmt(json_number(r, "sparsity_ratio")) << "\n";
    } else if (command == "compare" || command == "simulate") {
        if (command == "simulate") {
            out << "scenario " << r.at("scenario").get<int>() << "  replicates " << r.at("reps").get<int>()
                << "  spectral radius " << fmt(json_number(r, "spectral_radius")) << "\n";
        }
        out << pad("model", 18) << pad("msfe", 12) << pad("relative", 12) << "sparsity\n";
        for (const auto& m : r.at("models")) {
            out << pad(m.at("model").get<std::string>(), 18);
            if (m.contains("error")) {
                out << "failed: " << m.at("error").get<std::string>() << "\n";
                continue;
            }
            std::string rel = fmt(json_number(m, "msfe_relative"));
            if (m.contains("msfe_relative_se")) rel += " (" + fmt(json_number(m, "msfe_relative_se")) + ")";
            out << pad(fmt(json_number(m, "msfe")), 12) << pad(rel, 12) << fmt(json_number(m, "sparsity_ratio")) << "\n";
        }
        if (r.contains("mcs")) {
            out << "model confidence set:";
            for (const auto& n : r.at("mcs").at("surviving")) out << " " << n.get<std::string>();
            out << "\n";
        }
    } else if (command == "mcs") {
        for (const auto& step : r.at("trace")) {
            out << "eliminated";
            for (const auto& n : step.at("eliminated")) out << " " << n.get<std::string>();
            out << "  p = " << fmt(step.at("p_value").get<double>()) << "\n";
        }
        out << "surviving:";
        for (const auto& n : r.at("surviving")) out << " " << n.get<std::string>();
        out << "\n";
    }
    return out.str();
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Structured-penalty VARX estimation and forecast evaluation"};
    app.require_subcommand(1);
    // -h is left free for the horizon flag.
    app.set_help_flag("--help", "print this help and exit");
    std::string config_path;
    RunConfig flags;
    std::string structure_list;
    std::string benchmark_list;
    double alpha = 0.0;
    double grid_depth = 0.0;
    std::vector<std::pair<CLI::Option*, std::string>> given;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config; flags override its values");
        given.emplace_back(sub->add_option("--p", flags.p, "endogenous lag order"), "p");
        given.emplace_back(sub->add_option("--gridpoints", flags.gridpoints, "penalty grid size"), "gridpoints");
        given.emplace_back(sub->add_option("--grid-depth", grid_depth, "ratio of largest to smallest penalty"),
                           "grid_depth");
        given.emplace_back(sub->add_option("--structure", structure_list,
                                           "basic, lag, own_other, sparse_lag, sparse_own_other, endo_first, "
                                           "a comma list, all or none"),
                           "structure");
        given.emplace_back(sub->add_option("--alpha", alpha, "sparse-group mixing weight"), "alpha");
        given.emplace_back(sub->add_option("--benchmarks", benchmark_list, "mean, rw, aic, bic, bgr, factor"),
                           "benchmarks");
        given.emplace_back(sub->add_option("--seed", flags.seed, "random seed"), "seed");
        given.emplace_back(sub->add_option("--out", flags.out_path, "JSON report path"), "out");
        given.emplace_back(sub->add_option("--tol", flags.tol, "solver tolerance"), "tol");
        given.emplace_back(sub->add_option("--max-iter", flags.max_iter, "solver iteration limit"), "max_iter");
    };
    const auto add_data = [&](CLI::App* sub) {
        given.emplace_back(sub->add_option("--endog", flags.endog_path, "endogenous series CSV"), "endog");
        given.emplace_back(sub->add_option("--exog", flags.exog_path, "exogenous series CSV"), "exog");
        given.emplace_back(sub->add_option("--s", flags.s, "exogenous lag order"), "s");
        given.emplace_back(sub->add_option("--h", flags.h, "forecast horizon"), "h");
        given.emplace_back(sub->add_flag("--minnesota", flags.minnesota, "shrink toward a random walk"), "minnesota");
        given.emplace_back(sub->add_option("--bgr-delta", flags.bgr_delta, "BGR prior mean of own first lag"),
                           "bgr_delta");
    };
    const auto add_mcs = [&](CLI::App* sub) {
        given.emplace_back(sub->add_option("--mcs-alpha", flags.mcs_alpha, "MCS level"), "mcs_alpha");
        given.emplace_back(sub->add_option("--n-boot", flags.n_boot, "bootstrap replications"), "n_boot");
    };

    CLI::App* fit = app.add_subcommand("fit", "cross-validate the penalty and fit on the training span");
    CLI::App* evaluate = app.add_subcommand("evaluate", "cross-validate and score forecasts on the evaluation span");
    CLI::App* compare = app.add_subcommand("compare", "compare structures and benchmarks on shared origins");
    CLI::App* simulate = app.add_subcommand("simulate", "replicated simulation study for one scenario");
    CLI::App* mcs = app.add_subcommand("mcs", "model confidence set from a CSV of per-period losses");
    for (CLI::App* sub : {fit, evaluate, compare}) {
        add_common(sub);
        add_data(sub);
    }
    add_mcs(compare);
    given.emplace_back(compare->add_flag("--mcs", flags.mcs, "also compute the model confidence set"), "mcs");
    add_common(simulate);
    given.emplace_back(simulate->add_option("--scenario", flags.scenario, "scenario 1-6"), "scenario");
    given.emplace_back(simulate->add_option("--reps", flags.reps, "replicates"), "reps");
    given.emplace_back(simulate->add_option("--length", flags.length, "series length"), "length");
    given.emplace_back(mcs->add_option("--losses", flags.losses_path, "CSV, one column per model"), "losses");
    given.emplace_back(mcs->add_option("--seed", flags.seed, "random seed"), "seed");
    given.emplace_back(mcs->add_option("--out", flags.out_path, "JSON report path"), "out");
    mcs->add_option("--config", config_path, "JSON config; flags override its values");
    add_mcs(mcs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return Success;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return ValidationFailure;
    }

    std::string command;
    for (CLI::App* sub : app.get_subcommands()) command = sub->get_name();

    try {
        RunConfig config;
        config.command = command;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ValidationError("cannot open config '" + config_path + "'");
            json file;
            try {
                in >> file;
            } catch (const json::exception& e) {
                throw ValidationError("config '" + config_path + "' is not valid JSON: " + e.what());
            }
            config.merge_json(file);
        }
        flags.structures = split_list(structure_list);
        flags.benchmarks = split_list(benchmark_list);
        flags.alpha = alpha;
        flags.grid_depth = grid_depth;
        const json flag_json = flags.to_json();
        json overrides = json::object();
        for (const auto& [opt, key] : given) {
            if (opt->count() > 0) overrides[key] = flag_json.at(key);
        }
        config.merge_json(overrides);

        json report;
        if (command == "fit") report = cmd_fit(config);
        else if (command == "evaluate") report = cmd_evaluate(config);
        else if (command == "compare") report = cmd_compare(config);
        else if (command == "simulate") report = cmd_simulate(config);
        else report = cmd_mcs(config);

        const std::string text = report.dump(2) + "\n";
        if (!config.out_path.empty()) {
            std::ofstream file(config.out_path, std::ios::binary);
            if (!file) throw ValidationError("cannot write '" + config.out_path + "'");
            file << text;
            out << render_table(command, report);
        } else {
            err << render_table(command, report);
            out << text;
        }
        return Success;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return ValidationFailure;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return NumericalFailure;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return ValidationFailure;
    }
}

} // namespace varxl::cli
