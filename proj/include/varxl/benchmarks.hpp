#pragma once

#include <string>
#include <vector>

#include "varxl/types.hpp"
#include "varxl/validation.hpp"
#include "varxl/varx.hpp"

namespace varxl {

// Mean of rows 0..t-1.
Vector forecast_sample_mean(const Matrix& endog, Index t, int h);
// Row t-1.
Vector forecast_random_walk(const Matrix& endog, Index t, int h);

enum class InformationCriterion { Aic, Bic };

// log|Sigma| + c * k (k l + m j) / T with c = 2 (AIC) or log T (BIC).
double ic_value(double sigma_det, int k, int l, int j, int m, Index T, InformationCriterion criterion);

struct IcSelection {
    int p_hat = 0;
    int s_hat = 0;
    Matrix criterion_values; // (p_max + 1) x (s_max + 1); NaN for skipped candidates
    InformationCriterion criterion = InformationCriterion::Bic;
    Index sample_size = 0;
};

struct IcFit {
    IcSelection selection;
    VarxSpec spec;           // (p_max, s_max) layout, unused lags zero
    CoefficientSet coeffs;
};

// Least squares with ridge-conditioned QR: the regressor columns get a
// diagonal augmentation delta * ||column|| with
// delta^2 = (q^2 + q + 1) * machine epsilon, q the lagged regressor count.
Matrix conditioned_least_squares(const Matrix& X, const Matrix& Y, Index q);

// Every (l, j) in [0, p_max] x [0, s_max] fit by least squares on the common
// sample that starts after max(p_max, s_max) observations.
IcFit fit_ls_varx_ic(const Matrix& endog, const Matrix& exog, int p_max, int s_max, InformationCriterion criterion,
                     int h = 1);

struct BgrPrior {
    double lambda = 0.1;
    double delta = 0.0;
    Vector sigma;
    Vector mu;
    double tau = 1.0;
    double epsilon = 1e-5;

    // sigma from univariate AR(p) residual standard deviations, mu from sample
    // means, tau = 10 lambda.
    static BgrPrior from_data(const Matrix& series, int p, double lambda, double delta);
};

struct BgrSystem {
    Matrix Y; // data rows followed by dummy rows
    Matrix X; // [1, y_{t-h}', ..., y_{t-h-p+1}']
    Index data_rows = 0;
};

// Augmented regression for a VAR(p) of all columns of `series`.
BgrSystem bgr_augmented_system(const Matrix& series, int p, const BgrPrior& prior, int h = 1);

// Posterior mean; returns the joint coefficient set (nu, phi) of the VAR.
CoefficientSet fit_bgr(const Matrix& series, int p, const BgrPrior& prior, int h = 1);

struct FactorForecaster {
    Vector mean;
    Matrix loadings;          // n x r
    std::vector<int> ar_orders;
    Vector factor_forecast;   // r
    Vector forecast;          // n, original units
    int factors = 0;
};

// Principal components of the centered window, smallest count reaching the
// variance threshold, direct h-step AR per factor with order chosen by BIC.
FactorForecaster fit_factor_model(const Matrix& series, double variance_threshold, int max_order, int h);

// Forecast models over a fixed dataset.
class SampleMeanModel : public ForecastModel {
public:
    SampleMeanModel(const Matrix& endog, int h) : endog_(endog), h_(h) {}
    std::string name() const override { return "mean"; }
    Vector forecast(Index t) override { return forecast_sample_mean(endog_, t, h_); }

private:
    const Matrix& endog_;
    int h_;
};

class RandomWalkModel : public ForecastModel {
public:
    RandomWalkModel(const Matrix& endog, int h) : endog_(endog), h_(h) {}
    std::string name() const override { return "rw"; }
    Vector forecast(Index t) override { return forecast_random_walk(endog_, t, h_); }

private:
    const Matrix& endog_;
    int h_;
};

class IcModel : public ForecastModel {
public:
    IcModel(const Matrix& endog, const Matrix& exog, int p_max, int s_max, InformationCriterion criterion, int h);
    std::string name() const override;
    Vector forecast(Index t) override;
    double sparsity() const override { return sparsity_; }
    const std::vector<std::pair<int, int>>& selections() const { return selections_; }

private:
    const Matrix& endog_;
    const Matrix& exog_;
    int p_max_;
    int s_max_;
    InformationCriterion criterion_;
    int h_;
    double sparsity_ = 0.0;
    std::vector<std::pair<int, int>> selections_;
};

// BGR Bayesian VAR on the joint endogenous + exogenous series at a fixed
// lambda; forecasts the first k columns.
class BgrModel : public ForecastModel {
public:
    BgrModel(const Matrix& joint, int k, int p, double lambda, double delta, int h);
    std::string name() const override { return "bgr"; }
    Vector forecast(Index t) override;
    double sparsity() const override { return 0.0; }

private:
    const Matrix& joint_;
    int k_;
    int p_;
    double lambda_;
    double delta_;
    int h_;
};

class FactorModel : public ForecastModel {
public:
    FactorModel(const Matrix& joint, int k, int max_order, int h, double variance_threshold = 0.95);
    std::string name() const override { return "factor"; }
    Vector forecast(Index t) override;

private:
    const Matrix& joint_;
    int k_;
    int max_order_;
    int h_;
    double threshold_;
};

// Default tightness grid for the BGR benchmark.
std::vector<double> bgr_lambda_grid(int n_points = 10, double lo = 0.01, double hi = 5.0);

// [endog, exog] side by side.
Matrix joint_series(const Matrix& endog, const Matrix& exog);

} // namespace varxl
