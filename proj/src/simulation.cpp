#include "varxl/simulation.hpp"

#include <cmath>
#include <random>

#include "varxl/varx.hpp"

namespace varxl {

void ScenarioConfig::validate() const
{
    if (id < 1 || id > 6) throw ValidationError("scenario id must be between 1 and 6, got " + std::to_string(id));
    if (k < 1 || m < 1 || p < 1 || s < 1) throw ValidationError("scenario dimensions and lag orders must be positive");
    if (n_reps < 1) throw ValidationError("at least one replicate is required");
    if (burn_in < 0) throw ValidationError("burn-in must be non-negative");
    if (!(target_radius > 0.0 && target_radius < 1.0)) throw ValidationError("target spectral radius must lie in (0, 1)");
    if (noise_cov) {
        const Index n = k + m;
        if (noise_cov->rows() != n || noise_cov->cols() != n) {
            throw ValidationError("noise covariance must be " + std::to_string(n) + " x " + std::to_string(n));
        }
        if (!noise_cov->isApprox(noise_cov->transpose(), 1e-12)) throw ValidationError("noise covariance must be symmetric");
        if (Eigen::LLT<Matrix>(*noise_cov).info() != Eigen::Success) {
            throw ValidationError("noise covariance must be positive definite");
        }
    }
}

Matrix default_noise_covariance(int id, int dim)
{
    Matrix cov = Matrix::Identity(dim, dim);
    if (id == 6) {
        const int half = dim / 2;
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                if (i != j && (i < half) == (j < half)) cov(i, j) = 0.5;
            }
        }
    }
    return 0.01 * cov;
}

Matrix ScenarioConfig::covariance() const { return noise_cov ? *noise_cov : default_noise_covariance(id, k + m); }

Matrix ScenarioTruth::joint() const
{
    const Index k = phi.rows();
    const Index m = gamma.rows();
    const Index p = k > 0 ? phi.cols() / k : 0;
    const Index s = m > 0 ? beta.cols() / m : 0;
    const Index gp = m > 0 ? gamma.cols() / m : 0;
    const Index L = std::max({p, s, gp});
    const Index n = k + m;
    Matrix A = Matrix::Zero(n, n * L);
    for (Index l = 0; l < L; ++l) {
        if (l < p) A.block(0, l * n, k, k) = phi.middleCols(l * k, k);
        if (l < s) A.block(0, l * n + k, k, m) = beta.middleCols(l * m, m);
        if (l < gp) A.block(k, l * n + k, m, m) = gamma.middleCols(l * m, m);
    }
    return A;
}

namespace {

struct Layout {
    int k, m, p, s;
    Index phi_col(int lag, int j) const { return static_cast<Index>(lag) * k + j; }
    Index beta_col(int lag, int j) const { return static_cast<Index>(k) * p + static_cast<Index>(lag) * m + j; }
};

// Endogenous-equation mask plus the exogenous self-dynamics mask, which
// follows the endogenous lag pattern.
void draw_masks(const ScenarioConfig& c, std::mt19937_64& rng, Mask& pattern, Mask& gamma_mask)
{
    const Layout lay{c.k, c.m, c.p, c.s};
    pattern = Mask::Constant(c.k, static_cast<Index>(c.k) * c.p + static_cast<Index>(c.m) * c.s, false);
    gamma_mask = Mask::Constant(c.m, static_cast<Index>(c.m) * c.p, false);
    std::bernoulli_distribution sparse(0.1);
    std::bernoulli_distribution within_lag(0.3);
    const int first = 0;
    const int last = std::min(3, c.p - 1);
    const int last_exog = std::min(3, c.s - 1);

    switch (c.id) {
    case 1:
    case 6:
        do {
            for (Index i = 0; i < pattern.rows(); ++i)
                for (Index j = 0; j < pattern.cols(); ++j) pattern(i, j) = sparse(rng);
        } while (!pattern.leftCols(static_cast<Index>(c.k) * c.p).any());
        break;
    case 2:
        pattern.middleCols(lay.phi_col(last, 0), c.k).setConstant(true);
        pattern.middleCols(lay.beta_col(last_exog, 0), c.m).setConstant(true);
        break;
    case 3:
        do {
            pattern.setConstant(false);
            for (int lag : {first, last}) {
                for (int i = 0; i < c.k; ++i)
                    for (int j = 0; j < c.k; ++j) pattern(i, lay.phi_col(lag, j)) = within_lag(rng);
            }
            for (int lag : {first, last_exog}) {
                for (int i = 0; i < c.k; ++i)
                    for (int j = 0; j < c.m; ++j) pattern(i, lay.beta_col(lag, j)) = within_lag(rng);
            }
        } while (!pattern.leftCols(static_cast<Index>(c.k) * c.p).any());
        break;
    case 4:
        for (int lag : {first, last}) {
            for (int i = 0; i < c.k; ++i) pattern(i, lay.phi_col(lag, i)) = true;
        }
        for (int lag : {first, last_exog}) pattern.middleCols(lay.beta_col(lag, 0), c.m).setConstant(true);
        break;
    default:
        pattern.setConstant(true);
        break;
    }

    // Gamma follows the Phi pattern lag by lag; the square blocks differ in
    // size only when k != m, in which case the overlapping corner is used.
    const int common = std::min(c.k, c.m);
    for (int lag = 0; lag < c.p; ++lag) {
        for (int i = 0; i < common; ++i)
            for (int j = 0; j < common; ++j) gamma_mask(i, static_cast<Index>(lag) * c.m + j) = pattern(i, lay.phi_col(lag, j));
    }
}

Matrix signed_entries(const Mask& mask, std::mt19937_64& rng)
{
    std::bernoulli_distribution positive(0.5);
    Matrix out = Matrix::Zero(mask.rows(), mask.cols());
    for (Index i = 0; i < mask.rows(); ++i)
        for (Index j = 0; j < mask.cols(); ++j)
            if (mask(i, j)) out(i, j) = positive(rng) ? 1.0 : -1.0;
    return out;
}

} // namespace

ScenarioTruth generate_scenario(const ScenarioConfig& config)
{
    config.validate();
    std::mt19937_64 rng(config.seed);
    Mask gamma_mask;
    ScenarioTruth truth;
    draw_masks(config, rng, truth.pattern, gamma_mask);
    const Matrix base = signed_entries(truth.pattern, rng);
    const Matrix base_gamma = signed_entries(gamma_mask, rng);
    const Index kp = static_cast<Index>(config.k) * config.p;

    const auto scaled = [&](double c) {
        ScenarioTruth t;
        t.pattern = truth.pattern;
        t.phi = c * base.leftCols(kp);
        t.beta = c * base.rightCols(base.cols() - kp);
        t.gamma = c * base_gamma;
        return t;
    };
    const auto radius = [&](double c) { return companion_spectral_radius(scaled(c).joint()); };

    // Largest common magnitude whose joint system stays within the target radius.
    double lo = 0.0;
    double hi = 1.0;
    while (radius(hi) <= config.target_radius) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 100 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (radius(mid) <= config.target_radius ? lo : hi) = mid;
    }
    truth = scaled(lo);
    truth.spectral_radius = radius(lo);
    return truth;
}

std::uint64_t replicate_seed(std::uint64_t seed, int replicate)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(replicate)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

std::pair<Matrix, Matrix> simulate_varx(const ScenarioTruth& truth, const ScenarioConfig& config, std::uint64_t seed)
{
    config.validate();
    const Matrix A = truth.joint();
    const Index n = A.rows();
    const Index L = n > 0 ? A.cols() / n : 0;
    const Matrix cov = config.covariance();
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) throw ValidationError("noise covariance must be positive definite");
    const Matrix chol = llt.matrixL();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const Index total = config.burn_in + config.T + L;
    Matrix z = Matrix::Zero(total, n);
    Vector e(n);
    for (Index t = L; t < total; ++t) {
        for (Index i = 0; i < n; ++i) e(i) = normal(rng);
        Vector next = chol * e;
        for (Index l = 0; l < L; ++l) next.noalias() += A.middleCols(l * n, n) * z.row(t - 1 - l).transpose();
        z.row(t) = next.transpose();
    }
    const Matrix kept = z.bottomRows(config.T);
    return {kept.leftCols(config.k), kept.rightCols(config.m)};
}

StudyReport run_study(const ScenarioConfig& config, const StudyOptions& options)
{
    config.validate();
    const ScenarioTruth truth = generate_scenario(config);

    ComparisonConfig cc;
    cc.spec.k = config.k;
    cc.spec.m = config.m;
    cc.spec.p = config.p;
    cc.spec.s = config.s;
    cc.spec.h = 1;
    cc.structures = options.structures;
    cc.benchmarks = options.benchmarks;
    cc.gridpoints = options.gridpoints;
    cc.grid_depth = options.grid_depth;
    cc.solver = options.solver;
    cc.validate();

    StudyReport out;
    out.scenario = config.id;
    out.n_reps = config.n_reps;
    out.spectral_radius = truth.spectral_radius;
    const auto add_row = [&](std::string name, bool penalized) {
        StudyRow row;
        row.model = std::move(name);
        row.penalized = penalized;
        out.rows.push_back(std::move(row));
    };
    for (const auto& s : options.structures) add_row(std::string(to_string(s.kind)), true);
    for (const auto& b : options.benchmarks) add_row(b, false);

    std::vector<std::vector<double>> relative(out.rows.size());
    std::vector<std::vector<double>> sparsity(out.rows.size());
    for (int r = 0; r < config.n_reps; ++r) {
        const auto [endog, exog] = simulate_varx(truth, config, replicate_seed(config.seed, r));
        const ComparisonReport rep = compare_models(endog, exog, cc);
        for (std::size_t i = 0; i < rep.models.size(); ++i) {
            const ModelOutcome& m = rep.models[i];
            StudyRow& row = out.rows[i];
            if (!m.error.empty() || !std::isfinite(m.report.msfe)) {
                ++row.failures;
                continue;
            }
            ++row.completed;
            row.msfe.push_back(m.report.msfe);
            relative[i].push_back(m.report.msfe_relative);
            if (std::isfinite(m.report.sparsity_ratio_avg)) sparsity[i].push_back(m.report.sparsity_ratio_avg);
        }
    }

    const auto mean_se = [](const std::vector<double>& v) -> std::pair<double, double> {
        if (v.empty()) return {std::nan(""), std::nan("")};
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        if (v.size() < 2) return {mean, 0.0};
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
        return {mean, sd / std::sqrt(static_cast<double>(v.size()))};
    };
    for (std::size_t i = 0; i < out.rows.size(); ++i) {
        StudyRow& row = out.rows[i];
        std::tie(row.mean_msfe, row.se_msfe) = mean_se(row.msfe);
        std::tie(row.mean_relative, row.se_relative) = mean_se(relative[i]);
        row.mean_sparsity = sparsity[i].empty() ? std::nan("") : mean_se(sparsity[i]).first;
    }
    return out;
}

} // namespace varxl
