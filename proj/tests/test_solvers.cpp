#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "varxl/solvers.hpp"

using namespace varxl;

namespace {

PenaltyStructure make(PenaltyKind kind, std::optional<double> alpha = std::nullopt) { return {kind, alpha}; }

double alpha_for(const PenaltyStructure& ps, int k) { return ps.is_sparse() ? ps.resolved_alpha(k) : 0.0; }

SolverOptions tight()
{
    SolverOptions o;
    o.tol = 1e-10;
    o.max_iter = 100000;
    return o;
}

Matrix random_psd(Index n, std::uint64_t seed)
{
    const Matrix A = oracle::gaussian_matrix(n, n + 3, seed);
    return A * A.transpose();
}

} // namespace

TEST_CASE("solvers reach the proximal-gradient optimum")
{
    for (int rep = 0; rep < 3; ++rep) {
        const auto inst = oracle::make_instance(2, 1, 2, 1, 40, 500 + rep);
        for (PenaltyKind kind : all_penalty_kinds()) {
            const PenaltyStructure ps = make(kind);
            const double lmax = lambda_max(inst.design, ps, inst.spec);
            for (double frac : {0.5, 0.1, 0.02}) {
                CAPTURE(rep);
                CAPTURE(to_string(kind));
                CAPTURE(frac);
                const double lambda = frac * lmax;
                const double alpha = alpha_for(ps, inst.spec.k);
                const FitResult fit = fit_design(inst.design, ps, lambda, tight());
                const Matrix ref = oracle::proximal_gradient(inst.design, kind, alpha, lambda);
                const double f_ref = oracle::objective(inst.design, ref, kind, alpha, lambda);
                const double f_fit = oracle::objective(inst.design, fit.B, kind, alpha, lambda);
                CHECK(fit.converged);
                CHECK(std::abs(f_fit - f_ref) < 1e-6);
                CHECK(fit.objective == doctest::Approx(f_fit).epsilon(1e-10));
                CHECK(kkt_violation(inst.design, fit.B, ps, lambda) < 1e-3);
            }
        }
    }
}

TEST_CASE("cross-structure identities")
{
    for (int rep = 0; rep < 3; ++rep) {
        const auto inst = oracle::make_instance(3, 2, 2, 1, 60, 700 + rep);
        const double lambda = 0.2 * lambda_max(inst.design, make(PenaltyKind::Basic), inst.spec);
        const auto f = [&](PenaltyStructure ps) { return fit_design(inst.design, ps, lambda, tight()); };

        const FitResult basic = f(make(PenaltyKind::Basic));
        const FitResult sparse1 = f(make(PenaltyKind::SparseLag, 1.0));
        CHECK(std::abs(basic.objective - sparse1.objective) < 1e-6);
        CHECK((basic.B - sparse1.B).cwiseAbs().maxCoeff() < 1e-5);

        const FitResult lag = f(make(PenaltyKind::LagGroup));
        const FitResult sparse0 = f(make(PenaltyKind::SparseLag, 0.0));
        CHECK(std::abs(lag.objective - sparse0.objective) < 1e-6);

        const FitResult oo = f(make(PenaltyKind::OwnOther));
        const FitResult soo = f(make(PenaltyKind::SparseOwnOther, 0.0));
        CHECK(std::abs(oo.objective - soo.objective) < 1e-6);
    }
    // With one series the own/other split leaves only the diagonal group,
    // whose weight sqrt(1) equals the lag weight 1.
    const auto inst = oracle::make_instance(1, 1, 3, 2, 60, 800);
    const double lambda = 0.3 * lambda_max(inst.design, make(PenaltyKind::LagGroup), inst.spec);
    const FitResult lag = fit_design(inst.design, make(PenaltyKind::LagGroup), lambda, tight());
    const FitResult oo = fit_design(inst.design, make(PenaltyKind::OwnOther), lambda, tight());
    CHECK(std::abs(lag.objective - oo.objective) < 1e-6);
}

TEST_CASE("lambda at or above lambda_max gives the zero solution")
{
    const auto inst = oracle::make_instance(3, 2, 2, 1, 50, 17);
    for (PenaltyKind kind : all_penalty_kinds()) {
        CAPTURE(to_string(kind));
        const double lmax = lambda_max(inst.design, make(kind), inst.spec);
        const FitResult above = fit_design(inst.design, make(kind), lmax * (1 + 1e-6));
        CHECK(above.B.isZero(0.0));
        CHECK(above.sparsity_ratio == 1.0);
        CHECK(above.active_groups.empty());
        const FitResult below = fit_design(inst.design, make(kind), lmax * 0.5);
        CHECK(below.B.cwiseAbs().maxCoeff() > 0.0);
        CHECK(below.sparsity_ratio < 1.0);
    }
}

TEST_CASE("unpenalized fits equal least squares")
{
    for (int rep = 0; rep < 3; ++rep) {
        const auto inst = oracle::make_instance(2, 1, 2, 2, 80, 900 + rep);
        const Matrix ls = oracle::least_squares(inst.design);
        for (PenaltyKind kind : all_penalty_kinds()) {
            CAPTURE(to_string(kind));
            const FitResult fit = fit_design(inst.design, make(kind), 0.0, tight());
            CHECK((fit.B - ls).norm() / ls.norm() < 1e-6);
        }
    }
}

TEST_CASE("kkt violation detects non-optimal points")
{
    const auto inst = oracle::make_instance(2, 1, 2, 1, 40, 31);
    for (PenaltyKind kind : all_penalty_kinds()) {
        CAPTURE(to_string(kind));
        const PenaltyStructure ps = make(kind);
        const double lambda = 0.3 * lambda_max(inst.design, ps, inst.spec);
        const Matrix ref = oracle::proximal_gradient(inst.design, kind, alpha_for(ps, 2), lambda);
        CHECK(kkt_violation(inst.design, ref, ps, lambda) < 1e-6);
        const Matrix off = ref + 0.05 * oracle::gaussian_matrix(ref.rows(), ref.cols(), 3);
        CHECK(kkt_violation(inst.design, off, ps, lambda) > 1e-3);
    }
}

TEST_CASE("endogenous-first keeps exogenous rows out unless the endogenous row is active")
{
    const auto inst = oracle::make_instance(3, 2, 2, 2, 60, 41);
    const double lmax = lambda_max(inst.design, make(PenaltyKind::EndogenousFirst), inst.spec);
    for (double frac : {0.9, 0.6, 0.3, 0.1}) {
        const FitResult fit = fit_design(inst.design, make(PenaltyKind::EndogenousFirst), frac * lmax, tight());
        for (Index i = 0; i < 3; ++i) {
            for (Index l = 0; l < 2; ++l) {
                const bool endo_zero = fit.B.row(i).segment(l * 3, 3).isZero(0.0);
                const bool exo_zero = fit.B.row(i).segment(6 + l * 2, 2).isZero(0.0);
                CHECK((!endo_zero || exo_zero));
            }
        }
    }
}

TEST_CASE("hierarchical prox matches the two-dimensional oracle")
{
    for (int rep = 0; rep < 30; ++rep) {
        const Vector v = oracle::gaussian_matrix(5, 1, 1000 + rep).col(0) * (0.3 + rep * 0.1);
        for (double step : {0.0, 0.1, 0.5, 1.0, 2.5}) {
            CAPTURE(rep);
            CAPTURE(step);
            const Vector got = hierarchical_prox(v, step, 3, 2);
            const Vector want = oracle::nested_prox(v, 3, step);
            CHECK((got - want).cwiseAbs().maxCoeff() < 1e-7);
        }
    }
    // Exogenous part vanishes first, then everything.
    Vector v(3);
    v << 1.0, 0.0, 0.4;
    CHECK(hierarchical_prox(v, 0.25, 2, 1)(2) > 0.0);
    CHECK(hierarchical_prox(v, 0.45, 2, 1)(2) == 0.0);
    CHECK(hierarchical_prox(v, 0.45, 2, 1)(0) > 0.0);
    CHECK(hierarchical_prox(v, 5.0, 2, 1).isZero(0.0));
}

TEST_CASE("trust-region group update solves the group subproblem")
{
    for (int rep = 0; rep < 20; ++rep) {
        const Index n = 1 + rep % 5;
        Matrix G = random_psd(n, 50 + rep);
        Vector r = oracle::gaussian_matrix(n, 1, 90 + rep).col(0) * 3.0;
        if (rep % 4 == 3 && n > 1) {
            // A zero regressor column: singular block, no correlation there.
            G.row(0).setZero();
            G.col(0).setZero();
            r(0) = 0.0;
        }
        const double lambda = 0.3 * r.norm();
        Eigen::SelfAdjointEigenSolver<Matrix> es(G);
        const Vector b = trust_region_group_update(es.eigenvalues(), es.eigenvectors(), r, lambda);
        CAPTURE(rep);
        REQUIRE(b.norm() > 0.0);
        const Vector residual = G * b - r + lambda * b / b.norm();
        CHECK(residual.norm() < 1e-8 * (1.0 + r.norm()));
    }
}

TEST_CASE("power method matches the dense eigendecomposition")
{
    for (int rep = 0; rep < 20; ++rep) {
        const Matrix S = random_psd(2 + rep % 9, 200 + rep);
        Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
        const PowerResult pr = power_method_max_eig(S);
        CHECK(std::abs(pr.value - es.eigenvalues().maxCoeff()) < 1e-8 * std::max(1.0, es.eigenvalues().maxCoeff()));
        CHECK((S * pr.vector - pr.value * pr.vector).norm() < 1e-4 * pr.value);
        const PowerResult warm = power_method_max_eig(S, &pr.vector);
        CHECK(warm.iterations <= pr.iterations);
    }
    CHECK(power_method_max_eig(Matrix::Zero(3, 3)).value == 0.0);
}

TEST_CASE("warm starts, shared workspaces and full sweeps do not change the solution")
{
    const auto inst = oracle::make_instance(3, 2, 2, 1, 60, 61);
    SolverWorkspace ws(inst.design);
    for (PenaltyKind kind : all_penalty_kinds()) {
        CAPTURE(to_string(kind));
        const PenaltyStructure ps = make(kind);
        const double lmax = lambda_max(inst.design, ps, inst.spec);
        const FitResult cold = fit_design(inst.design, ps, 0.2 * lmax, tight());

        SolverOptions warm = tight();
        warm.workspace = &ws;
        warm.warm_start = fit_design(inst.design, ps, 0.4 * lmax, tight()).B;
        const FitResult w = fit_design(inst.design, ps, 0.2 * lmax, warm);
        CHECK(std::abs(w.objective - cold.objective) < 1e-8);

        SolverOptions full = tight();
        full.active_set = false;
        CHECK(std::abs(fit_design(inst.design, ps, 0.2 * lmax, full).objective - cold.objective) < 1e-8);
    }
}

TEST_CASE("solver options and inputs are validated")
{
    const auto inst = oracle::make_instance(2, 0, 1, 0, 30, 3);
    SolverOptions bad;
    bad.tol = 0.0;
    CHECK_THROWS_AS(fit_design(inst.design, make(PenaltyKind::Basic), 0.1, bad), ValidationError);
    bad = {};
    bad.max_iter = 0;
    CHECK_THROWS_AS(fit_design(inst.design, make(PenaltyKind::Basic), 0.1, bad), ValidationError);
    bad = {};
    bad.warm_start = Matrix::Zero(3, 3);
    CHECK_THROWS_AS(fit_design(inst.design, make(PenaltyKind::Basic), 0.1, bad), ValidationError);
    CHECK_THROWS_AS(fit_design(inst.design, make(PenaltyKind::Basic), -1.0), ValidationError);

    const auto other = oracle::make_instance(2, 0, 1, 0, 30, 4);
    SolverWorkspace ws(other.design);
    SolverOptions foreign;
    foreign.workspace = &ws;
    // A workspace from another design is ignored rather than trusted.
    const double a = fit_design(inst.design, make(PenaltyKind::LagGroup), 1.0, foreign).objective;
    const double b = fit_design(inst.design, make(PenaltyKind::LagGroup), 1.0).objective;
    CHECK(a == doctest::Approx(b).epsilon(1e-10));
}

TEST_CASE("shrinking toward a target equals a zero-target fit on the transformed data")
{
    for (PenaltyKind kind : all_penalty_kinds()) {
        CAPTURE(to_string(kind));
        const auto inst = oracle::make_instance(2, 1, 2, 1, 60, 71);
        const MinnesotaTarget target = MinnesotaTarget::random_walk(inst.spec);
        const Matrix C = target.stacked();
        CHECK(C.leftCols(2).isIdentity());
        CHECK(C.rightCols(3).isZero());

        LaggedDesign raw = build_lagged_design(inst.endog, inst.exog, inst.spec, 1, false);
        LaggedDesign shifted = raw;
        shifted.Y = RowMatrix(Matrix(raw.Y) - C * Matrix(raw.Z));
        center_design(shifted);
        const PenaltyStructure ps = make(kind);
        const double lambda = 0.3 * lambda_max(shifted, ps, inst.spec);
        const FitResult plain = fit_design(shifted, ps, lambda, tight());
        const FitResult with = fit(inst.endog, inst.exog, inst.spec, ps, lambda, &target, tight());
        CHECK((with.coeffs.stacked() - (plain.B + C)).cwiseAbs().maxCoeff() < 1e-10);
        const Vector nu = shifted.y_bar - plain.B * shifted.z_bar;
        CHECK((with.coeffs.nu - nu).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("fit recovers the intercept of the uncentered model")
{
    const auto inst = oracle::make_instance(2, 1, 1, 1, 80, 81);
    Matrix endog = inst.endog;
    endog.col(0).array() += 5.0;
    const FitResult f = fit(endog, inst.exog, inst.spec, make(PenaltyKind::Basic), 0.0, nullptr, tight());
    const LaggedDesign raw = build_lagged_design(endog, inst.exog, inst.spec, 1, false);
    Matrix Z1(raw.Z.rows() + 1, raw.samples());
    Z1.row(0).setOnes();
    Z1.bottomRows(raw.Z.rows()) = raw.Z;
    const Matrix full = Z1.transpose().colPivHouseholderQr().solve(Matrix(raw.Y).transpose()).transpose();
    CHECK((f.coeffs.nu - full.col(0)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("own/other zeroes cross-series groups first on diagonal data")
{
    // Data from a diagonal VAR(1): the off-diagonal group should leave the
    // model before the diagonal group along a decreasing penalty path.
    const Index T = 200;
    Matrix y = Matrix::Zero(T, 3);
    const Matrix e = oracle::gaussian_matrix(T, 3, 99);
    for (Index t = 1; t < T; ++t) y.row(t) = 0.7 * y.row(t - 1) + e.row(t);
    const VarxSpec spec{3, 0, 1, 0, 1};
    const LaggedDesign d = build_lagged_design(y, Matrix(T, 0), spec, 1, true);
    const PenaltyStructure ps = make(PenaltyKind::OwnOther);
    const auto grid = lambda_grid(lambda_max(d, ps, spec), 20, 100.0);
    bool diag_seen_alone = false;
    for (double lambda : grid.values) {
        const FitResult f = fit_design(d, ps, lambda, tight());
        const bool diag = f.B.diagonal().cwiseAbs().maxCoeff() > 0.0;
        const Matrix offdiag = f.B - Matrix(f.B.diagonal().asDiagonal());
        const bool off = offdiag.cwiseAbs().maxCoeff() > 0.0;
        CHECK((!off || diag));
        diag_seen_alone = diag_seen_alone || (diag && !off);
    }
    CHECK(diag_seen_alone);
}
