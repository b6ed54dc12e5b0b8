#include "varxl/benchmarks.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace varxl {

Vector forecast_sample_mean(const Matrix& endog, Index t, int /*h*/)
{
    if (t < 1 || t > endog.rows()) throw ValidationError("sample mean forecast needs 1 <= t <= T");
    return endog.topRows(t).colwise().mean().transpose();
}

Vector forecast_random_walk(const Matrix& endog, Index t, int /*h*/)
{
    if (t < 1 || t > endog.rows()) throw ValidationError("random walk forecast needs 1 <= t <= T");
    return endog.row(t - 1).transpose();
}

double ic_value(double sigma_det, int k, int l, int j, int m, Index T, InformationCriterion criterion)
{
    if (!(sigma_det > 0.0)) throw NumericalError("residual covariance determinant is not positive");
    if (T < 1) throw ValidationError("information criterion needs a positive sample size");
    const double params = static_cast<double>(k) * (static_cast<double>(k) * l + static_cast<double>(m) * j);
    const double c = criterion == InformationCriterion::Aic ? 2.0 : std::log(static_cast<double>(T));
    return std::log(sigma_det) + c * params / static_cast<double>(T);
}

Matrix conditioned_least_squares(const Matrix& X, const Matrix& Y, Index q)
{
    if (X.rows() != Y.rows()) throw ValidationError("least squares: row mismatch");
    const Index n = X.rows();
    const Index c = X.cols();
    const double qd = static_cast<double>(q);
    const double delta = std::sqrt((qd * qd + qd + 1.0) * std::numeric_limits<double>::epsilon());
    Matrix A(n + c, c);
    A.topRows(n) = X;
    A.bottomRows(c) = (delta * X.colwise().norm()).asDiagonal();
    Matrix rhs = Matrix::Zero(n + c, Y.cols());
    rhs.topRows(n) = Y;
    return A.colPivHouseholderQr().solve(rhs);
}

namespace {

// Rows [1, y_{t-h}', ..., y_{t-h-p+1}', x_{t-h}', ..., x_{t-h-s+1}'] for the
// targets t = L+h-1 .. T-1 (0-based).
Matrix regressor_rows(const Matrix& endog, const Matrix& exog, int p, int s, Index L, int h)
{
    const Index k = endog.cols();
    const Index m = exog.cols();
    const Index N = endog.rows() - L - h + 1;
    Matrix X(N, 1 + k * p + m * s);
    for (Index n = 0; n < N; ++n) {
        const Index newest = L + n - 1;
        X(n, 0) = 1.0;
        for (int l = 0; l < p; ++l) X.row(n).segment(1 + l * k, k) = endog.row(newest - l);
        for (int j = 0; j < s; ++j) X.row(n).segment(1 + k * p + j * m, m) = exog.row(newest - j);
    }
    return X;
}

} // namespace

IcFit fit_ls_varx_ic(const Matrix& endog, const Matrix& exog, int p_max, int s_max, InformationCriterion criterion,
                     int h)
{
    const Index k = endog.cols();
    const Index m = exog.cols();
    if (p_max < 0 || s_max < 0) throw ValidationError("lag orders must be non-negative");
    if (m == 0) s_max = 0;
    if (m > 0 && exog.rows() != endog.rows()) throw ValidationError("exogenous data length mismatch");
    const Index L = std::max(p_max, s_max);
    const Index N = endog.rows() - L - h + 1;
    if (N < 2) throw ValidationError("series too short for the information-criterion search");

    const Matrix Xfull = regressor_rows(endog, exog, p_max, s_max, L, h);
    const Matrix Y = endog.bottomRows(N);

    IcFit out;
    out.selection.criterion = criterion;
    out.selection.sample_size = N;
    out.selection.criterion_values = Matrix::Constant(p_max + 1, s_max + 1, std::numeric_limits<double>::quiet_NaN());
    double best = std::numeric_limits<double>::infinity();
    Matrix best_coef;
    for (int l = 0; l <= p_max; ++l) {
        for (int j = 0; j <= s_max; ++j) {
            const Index q = k * l + m * j;
            if (q + 1 >= N) continue;
            Matrix X(N, 1 + q);
            X.leftCols(1 + k * l) = Xfull.leftCols(1 + k * l);
            X.rightCols(m * j) = Xfull.middleCols(1 + k * p_max, m * j);
            const Matrix coef = conditioned_least_squares(X, Y, q);
            const Matrix U = Y - X * coef;
            const Matrix sigma = U.transpose() * U / static_cast<double>(N);
            const double det = sigma.determinant();
            if (!(det > 0.0) || !std::isfinite(det)) continue;
            const double value = ic_value(det, static_cast<int>(k), l, j, static_cast<int>(m), N, criterion);
            out.selection.criterion_values(l, j) = value;
            if (value < best) {
                best = value;
                out.selection.p_hat = l;
                out.selection.s_hat = j;
                best_coef = coef;
            }
        }
    }
    if (!std::isfinite(best)) throw NumericalError("every lag-order candidate was ill-conditioned");

    out.spec.k = static_cast<int>(k);
    out.spec.m = static_cast<int>(m);
    out.spec.p = std::max(p_max, 1);
    out.spec.s = m > 0 ? std::max(s_max, 1) : 0;
    out.spec.h = h;
    out.coeffs = CoefficientSet::zeros(out.spec);
    const int l = out.selection.p_hat;
    const int j = out.selection.s_hat;
    out.coeffs.nu = best_coef.row(0).transpose();
    if (l > 0) out.coeffs.phi.leftCols(k * l) = best_coef.middleRows(1, k * l).transpose();
    if (j > 0) out.coeffs.beta.leftCols(m * j) = best_coef.middleRows(1 + k * l, m * j).transpose();
    return out;
}

namespace {

double ar_residual_sd(const Vector& y, int p)
{
    const Index T = y.size();
    const Index N = T - p;
    if (p == 0 || N < p + 2) {
        const double mean = y.mean();
        return std::sqrt((y.array() - mean).square().sum() / std::max<Index>(T - 1, 1));
    }
    Matrix X(N, p + 1);
    for (Index n = 0; n < N; ++n) {
        X(n, 0) = 1.0;
        for (int l = 1; l <= p; ++l) X(n, l) = y(p + n - l);
    }
    const Vector target = y.tail(N);
    const Vector coef = X.colPivHouseholderQr().solve(target);
    const double ssr = (target - X * coef).squaredNorm();
    return std::sqrt(ssr / static_cast<double>(N - p - 1));
}

} // namespace

BgrPrior BgrPrior::from_data(const Matrix& series, int p, double lambda, double delta)
{
    if (!(lambda > 0.0)) throw ValidationError("BGR tightness lambda must be positive");
    BgrPrior prior;
    prior.lambda = lambda;
    prior.delta = delta;
    prior.tau = 10.0 * lambda;
    prior.mu = series.colwise().mean().transpose();
    prior.sigma.resize(series.cols());
    for (Index i = 0; i < series.cols(); ++i) {
        double sd = ar_residual_sd(series.col(i), p);
        if (!(sd > 0.0)) sd = 1e-8;
        prior.sigma(i) = sd;
    }
    return prior;
}

BgrSystem bgr_augmented_system(const Matrix& series, int p, const BgrPrior& prior, int h)
{
    const Index n = series.cols();
    if (p < 1) throw ValidationError("BGR needs p >= 1");
    if (prior.sigma.size() != n || prior.mu.size() != n) throw ValidationError("BGR prior has the wrong dimension");
    const Index N = series.rows() - p - h + 1;
    if (N < 1) throw ValidationError("series too short for the BGR regression");
    const Index np = n * p;
    const Index cols = 1 + np;
    const Index d1 = np + n + 1;
    const Index d2 = n;

    BgrSystem sys;
    sys.data_rows = N;
    sys.Y = Matrix::Zero(N + d1 + d2, n);
    sys.X = Matrix::Zero(N + d1 + d2, cols);
    sys.X.topRows(N) = regressor_rows(series, Matrix(series.rows(), 0), p, 0, p, h);
    sys.Y.topRows(N) = series.bottomRows(N);

    // Minnesota block: lag-decay prior, covariance prior, intercept prior.
    Index r = N;
    for (Index i = 0; i < n; ++i) sys.Y(r + i, i) = prior.delta * prior.sigma(i) / prior.lambda;
    for (int l = 1; l <= p; ++l) {
        for (Index i = 0; i < n; ++i) sys.X(r + (l - 1) * n + i, 1 + (l - 1) * n + i) = l * prior.sigma(i) / prior.lambda;
    }
    r += np;
    for (Index i = 0; i < n; ++i) sys.Y(r + i, i) = prior.sigma(i);
    r += n;
    sys.X(r, 0) = prior.epsilon;
    r += 1;

    // Sum-of-coefficients block.
    for (Index i = 0; i < n; ++i) {
        const double v = prior.delta * prior.mu(i) / prior.tau;
        sys.Y(r + i, i) = v;
        for (int l = 0; l < p; ++l) sys.X(r + i, 1 + l * n + i) = v;
    }
    return sys;
}

CoefficientSet fit_bgr(const Matrix& series, int p, const BgrPrior& prior, int h)
{
    const BgrSystem sys = bgr_augmented_system(series, p, prior, h);
    const Matrix post = sys.X.colPivHouseholderQr().solve(sys.Y); // (1 + np) x n
    if (!post.allFinite()) throw NumericalError("BGR posterior mean is not finite");
    VarxSpec spec;
    spec.k = static_cast<int>(series.cols());
    spec.p = p;
    spec.h = h;
    CoefficientSet c = CoefficientSet::zeros(spec);
    c.nu = post.row(0).transpose();
    c.phi = post.bottomRows(post.rows() - 1).transpose();
    return c;
}

FactorForecaster fit_factor_model(const Matrix& series, double variance_threshold, int max_order, int h)
{
    if (!(variance_threshold > 0.0 && variance_threshold <= 1.0)) {
        throw ValidationError("variance threshold must lie in (0, 1]");
    }
    const Index T = series.rows();
    const Index n = series.cols();
    if (T < 2) throw ValidationError("factor model needs at least two observations");

    FactorForecaster out;
    out.mean = series.colwise().mean().transpose();
    const Matrix centered = series.rowwise() - out.mean.transpose();
    const Matrix cov = centered.transpose() * centered / static_cast<double>(T - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    if (es.info() != Eigen::Success) throw NumericalError("factor model eigendecomposition failed");
    const Vector vals = es.eigenvalues().reverse().cwiseMax(0.0);
    const Matrix vecs = es.eigenvectors().rowwise().reverse();
    const double total = vals.sum();
    int r = 0;
    if (total > 0.0) {
        double cum = 0.0;
        while (r < n) {
            cum += vals(r);
            ++r;
            if (cum / total >= variance_threshold - 1e-12) break;
        }
    }
    out.factors = r;
    out.loadings = vecs.leftCols(r);
    const Matrix F = centered * out.loadings;
    out.factor_forecast = Vector::Zero(r);

    for (int f = 0; f < r; ++f) {
        const Vector x = F.col(f);
        const Index start = max_order + h - 1;
        const Index N = T - start;
        int best_q = 0;
        Vector best_coef;
        double best_bic = std::numeric_limits<double>::infinity();
        for (int q = 0; q <= max_order && N >= q + 2; ++q) {
            Matrix X(N, q + 1);
            for (Index i = 0; i < N; ++i) {
                const Index target = start + i;
                X(i, 0) = 1.0;
                for (int l = 0; l < q; ++l) X(i, 1 + l) = x(target - h - l);
            }
            const Vector y = x.tail(N);
            const Vector coef = X.colPivHouseholderQr().solve(y);
            const double s2 = std::max((y - X * coef).squaredNorm() / static_cast<double>(N), 1e-300);
            const double bic = std::log(s2) + (q + 1.0) * std::log(static_cast<double>(N)) / static_cast<double>(N);
            if (bic < best_bic) {
                best_bic = bic;
                best_q = q;
                best_coef = coef;
            }
        }
        out.ar_orders.push_back(best_q);
        if (best_q == 0) {
            out.factor_forecast(f) = x.mean();
        } else {
            double v = best_coef(0);
            for (int l = 0; l < best_q; ++l) v += best_coef(1 + l) * x(T - 1 - l);
            out.factor_forecast(f) = v;
        }
    }
    out.forecast = out.mean + out.loadings * out.factor_forecast;
    return out;
}

IcModel::IcModel(const Matrix& endog, const Matrix& exog, int p_max, int s_max, InformationCriterion criterion, int h)
    : endog_(endog), exog_(exog), p_max_(p_max), s_max_(exog.cols() > 0 ? s_max : 0), criterion_(criterion), h_(h)
{
}

std::string IcModel::name() const { return criterion_ == InformationCriterion::Aic ? "aic" : "bic"; }

Vector IcModel::forecast(Index t)
{
    const bool has_exog = exog_.cols() > 0;
    const Matrix exog_window = has_exog ? Matrix(exog_.topRows(t)) : Matrix(t, 0);
    const IcFit fit = fit_ls_varx_ic(endog_.topRows(t), exog_window, p_max_, s_max_, criterion_, h_);
    selections_.emplace_back(fit.selection.p_hat, fit.selection.s_hat);
    const Index total = fit.coeffs.phi.size() + fit.coeffs.beta.size();
    const Index used = endog_.cols() * (endog_.cols() * fit.selection.p_hat + exog_.cols() * fit.selection.s_hat);
    sparsity_ = total > 0 ? 1.0 - static_cast<double>(used) / static_cast<double>(total) : 1.0;
    const Index lag = fit.spec.max_lag();
    const Matrix exog_tail = has_exog ? Matrix(exog_.middleRows(t - lag, lag)) : Matrix(lag, 0);
    return forecast_direct(fit.coeffs, endog_.middleRows(t - lag, lag), exog_tail, fit.spec);
}

BgrModel::BgrModel(const Matrix& joint, int k, int p, double lambda, double delta, int h)
    : joint_(joint), k_(k), p_(p), lambda_(lambda), delta_(delta), h_(h)
{
}

Vector BgrModel::forecast(Index t)
{
    const Matrix window = joint_.topRows(t);
    const BgrPrior prior = BgrPrior::from_data(window, p_, lambda_, delta_);
    const CoefficientSet c = fit_bgr(window, p_, prior, h_);
    VarxSpec spec;
    spec.k = static_cast<int>(joint_.cols());
    spec.p = p_;
    const Vector yhat = forecast_direct(c, joint_.middleRows(t - p_, p_), Matrix(p_, 0), spec);
    return yhat.head(k_);
}

FactorModel::FactorModel(const Matrix& joint, int k, int max_order, int h, double variance_threshold)
    : joint_(joint), k_(k), max_order_(max_order), h_(h), threshold_(variance_threshold)
{
}

Vector FactorModel::forecast(Index t)
{
    const FactorForecaster f = fit_factor_model(joint_.topRows(t), threshold_, max_order_, h_);
    return f.forecast.head(k_);
}

std::vector<double> bgr_lambda_grid(int n_points, double lo, double hi)
{
    if (n_points < 1 || !(lo > 0.0) || !(hi >= lo)) throw ValidationError("invalid BGR grid");
    std::vector<double> out;
    for (int i = 0; i < n_points; ++i) {
        const double frac = n_points == 1 ? 0.0 : static_cast<double>(i) / (n_points - 1);
        out.push_back(lo * std::pow(hi / lo, frac));
    }
    return out;
}

Matrix joint_series(const Matrix& endog, const Matrix& exog)
{
    if (exog.cols() > 0 && exog.rows() != endog.rows()) throw ValidationError("exogenous data length mismatch");
    Matrix out(endog.rows(), endog.cols() + exog.cols());
    out.leftCols(endog.cols()) = endog;
    if (exog.cols() > 0) out.rightCols(exog.cols()) = exog;
    return out;
}

} // namespace varxl
