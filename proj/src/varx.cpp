#include "varxl/varx.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "varxl/kernels.hpp"

namespace varxl {

void VarxSpec::validate() const
{
    if (k < 1) throw ValidationError("need at least one endogenous series (k >= 1)");
    if (m < 0) throw ValidationError("exogenous series count must be non-negative");
    if (p < 1) throw ValidationError("endogenous lag order p must be at least 1");
    if (s < 0) throw ValidationError("exogenous lag order s must be non-negative");
    if (h < 1) throw ValidationError("forecast horizon must be at least 1");
    if (m == 0 && s > 0) throw ValidationError("exogenous lag order requires exogenous data");
    if (m > 0 && s == 0) throw ValidationError("exogenous series given but exogenous lag order s = 0");
}

CoefficientSet CoefficientSet::zeros(const VarxSpec& spec)
{
    CoefficientSet c;
    c.nu = Vector::Zero(spec.k);
    c.phi = Matrix::Zero(spec.k, spec.endogenous_regressors());
    c.beta = Matrix::Zero(spec.k, spec.exogenous_regressors());
    return c;
}

CoefficientSet CoefficientSet::from_stacked(const Vector& nu, const Matrix& B, const VarxSpec& spec)
{
    if (B.rows() != spec.k || B.cols() != spec.regressors() || nu.size() != spec.k) {
        throw ValidationError("coefficient matrix does not match the model dimensions");
    }
    CoefficientSet c;
    c.nu = nu;
    c.phi = B.leftCols(spec.endogenous_regressors());
    c.beta = B.rightCols(spec.exogenous_regressors());
    return c;
}

Matrix CoefficientSet::stacked() const
{
    Matrix B(phi.rows(), phi.cols() + beta.cols());
    B << phi, beta;
    return B;
}

LaggedDesign build_lagged_design(const Matrix& endog, const Matrix& exog, const VarxSpec& spec,
                                 int horizon, bool center)
{
    spec.validate();
    if (horizon < 1) throw ValidationError("forecast horizon must be at least 1");
    if (endog.cols() != spec.k) throw ValidationError("endogenous data has the wrong number of columns");
    if (spec.m > 0 && (exog.cols() != spec.m || exog.rows() != endog.rows())) {
        throw ValidationError("exogenous data must have m columns and the same length as the endogenous data");
    }
    const Index T = endog.rows();
    const Index L = spec.max_lag();
    const Index needed = L + horizon;
    if (T < needed) {
        throw ValidationError("series too short: need at least " + std::to_string(needed) +
                              " observations for lags (" + std::to_string(spec.p) + "," +
                              std::to_string(spec.s) + ") and horizon " + std::to_string(horizon) +
                              ", got " + std::to_string(T));
    }
    const Index N = T - L - horizon + 1;
    const Index k = spec.k;
    const Index m = spec.m;

    LaggedDesign d;
    d.spec = spec;
    d.spec.h = horizon;
    d.horizon = horizon;
    d.Z.resize(spec.regressors(), N);
    d.Y.resize(k, N);
    for (Index n = 0; n < N; ++n) {
        const Index target = L + horizon - 1 + n;
        d.Y.col(n) = endog.row(target).transpose();
        const Index newest = target - horizon; // row of y_{t-h}
        for (Index lag = 0; lag < spec.p; ++lag) {
            d.Z.block(lag * k, n, k, 1) = endog.row(newest - lag).transpose();
        }
        for (Index lag = 0; lag < spec.s; ++lag) {
            d.Z.block(spec.endogenous_regressors() + lag * m, n, m, 1) = exog.row(newest - lag).transpose();
        }
    }
    d.y_bar = Vector::Zero(k);
    d.z_bar = Vector::Zero(spec.regressors());
    if (center) center_design(d);
    return d;
}

void center_design(LaggedDesign& design)
{
    if (design.centered) return;
    const double N = static_cast<double>(design.samples());
    design.y_bar = design.Y.rowwise().sum() / N;
    design.z_bar = design.Z.rowwise().sum() / N;
    design.Y.colwise() -= design.y_bar;
    design.Z.colwise() -= design.z_bar;
    design.centered = true;
}

Vector recover_intercept(const Matrix& B, const Vector& y_bar, const Vector& z_bar)
{
    if (B.rows() != y_bar.size() || B.cols() != z_bar.size()) {
        throw ValidationError("recover_intercept: dimension mismatch");
    }
    return y_bar - B * z_bar;
}

Vector lagged_regressors(const Matrix& endog_tail, const Matrix& exog_tail, const VarxSpec& spec)
{
    if (endog_tail.cols() != spec.k || endog_tail.rows() < spec.p) {
        throw ValidationError("forecast needs the last " + std::to_string(spec.p) +
                              " endogenous observations");
    }
    if (spec.s > 0 && (exog_tail.cols() != spec.m || exog_tail.rows() < spec.s)) {
        throw ValidationError("forecast needs the last " + std::to_string(spec.s) +
                              " exogenous observations");
    }
    Vector z(spec.regressors());
    const Index last_y = endog_tail.rows() - 1;
    for (Index lag = 0; lag < spec.p; ++lag) {
        z.segment(lag * spec.k, spec.k) = endog_tail.row(last_y - lag).transpose();
    }
    const Index last_x = exog_tail.rows() - 1;
    for (Index lag = 0; lag < spec.s; ++lag) {
        z.segment(spec.endogenous_regressors() + lag * spec.m, spec.m) = exog_tail.row(last_x - lag).transpose();
    }
    return z;
}

Vector forecast_direct(const CoefficientSet& coeffs, const Matrix& endog_tail, const Matrix& exog_tail,
                       const VarxSpec& spec)
{
    const Vector z = lagged_regressors(endog_tail, exog_tail, spec);
    Vector yhat = coeffs.nu;
    yhat.noalias() += coeffs.phi * z.head(spec.endogenous_regressors());
    if (spec.s > 0) yhat.noalias() += coeffs.beta * z.tail(spec.exogenous_regressors());
    return yhat;
}

double least_squares_objective(const LaggedDesign& design, const Matrix& B)
{
    if (B.rows() != design.Y.rows() || B.cols() != design.Z.rows()) {
        throw ValidationError("least_squares_objective: dimension mismatch");
    }
    RowMatrix resid = design.Y;
    resid.noalias() -= B * design.Z;
    return 0.5 * kernels::sum_squares({resid.data(), static_cast<std::size_t>(resid.size())});
}

Matrix companion_matrix(const Matrix& phi)
{
    const Index k = phi.rows();
    if (k == 0 || phi.cols() % k != 0) throw ValidationError("phi must be k x kp");
    const Index kp = phi.cols();
    Matrix A = Matrix::Zero(kp, kp);
    A.topRows(k) = phi;
    if (kp > k) A.bottomLeftCorner(kp - k, kp - k).setIdentity();
    return A;
}

double companion_spectral_radius(const Matrix& phi)
{
    const Matrix A = companion_matrix(phi);
    Eigen::EigenSolver<Matrix> solver(A, false);
    if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue computation failed");
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

} // namespace varxl
