#pragma once

#include <optional>

#include "varxl/types.hpp"

namespace varxl {

// Dimensions of a VARX_{k,m}(p,s) and the direct forecast horizon.
struct VarxSpec {
    int k = 1; // endogenous series
    int m = 0; // exogenous series
    int p = 1; // endogenous lag order
    int s = 0; // exogenous lag order
    int h = 1; // forecast horizon

    Index endogenous_regressors() const { return Index{k} * p; }
    Index exogenous_regressors() const { return Index{m} * s; }
    Index regressors() const { return endogenous_regressors() + exogenous_regressors(); }
    Index parameter_count() const { return Index{k} * (1 + regressors()); }
    int max_lag() const { return p > s ? p : s; }

    // Throws ValidationError on inconsistent dimensions.
    void validate() const;
};

// nu: intercept, phi = [Phi(1) ... Phi(p)], beta = [beta(1) ... beta(s)].
struct CoefficientSet {
    Vector nu;
    Matrix phi;
    Matrix beta;

    static CoefficientSet zeros(const VarxSpec& spec);
    static CoefficientSet from_stacked(const Vector& nu, const Matrix& B, const VarxSpec& spec);

    // B = [phi, beta], k x (kp + ms)
    Matrix stacked() const;
};

// Regression form of the VARX: column n of Z stacks the lagged regressors
// that predict column n of Y. For horizon h the regressors of the target at
// time t are y_{t-h}, ..., y_{t-h-p+1}, x_{t-h}, ..., x_{t-h-s+1}.
struct LaggedDesign {
    VarxSpec spec;
    int horizon = 1;
    RowMatrix Z; // (kp + ms) x N
    RowMatrix Y; // k x N
    Vector y_bar;
    Vector z_bar;
    bool centered = false;
    // Contribution C * Z already removed from Y when shrinking toward a target.
    std::optional<RowMatrix> offset;

    Index samples() const { return Y.cols(); }
};

// endog: T x k, exog: T x m (or empty when m = 0). Uses the first max(p, s)
// observations as conditioning values, so N = T - max(p, s) - horizon + 1.
LaggedDesign build_lagged_design(const Matrix& endog, const Matrix& exog, const VarxSpec& spec,
                                 int horizon, bool center);

// Removes row means from Y and Z in place, storing them in y_bar / z_bar.
void center_design(LaggedDesign& design);

Vector recover_intercept(const Matrix& B, const Vector& y_bar, const Vector& z_bar);

// Regressor vector [y_t', ..., y_{t-p+1}', x_t', ..., x_{t-s+1}']' taken from
// the last rows of the tails (last row = most recent observation).
Vector lagged_regressors(const Matrix& endog_tail, const Matrix& exog_tail, const VarxSpec& spec);

Vector forecast_direct(const CoefficientSet& coeffs, const Matrix& endog_tail, const Matrix& exog_tail,
                       const VarxSpec& spec);

// 0.5 * ||Y - B Z||_F^2
double least_squares_objective(const LaggedDesign& design, const Matrix& B);

// kp x kp companion matrix of phi = [Phi(1) ... Phi(p)].
Matrix companion_matrix(const Matrix& phi);
double companion_spectral_radius(const Matrix& phi);

} // namespace varxl
