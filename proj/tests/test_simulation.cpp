#include <doctest.h>

#include <cmath>
#include <set>

#include "varxl/simulation.hpp"
#include "varxl/varx.hpp"

using namespace varxl;

namespace {

ScenarioConfig scenario(int id, std::uint64_t seed = 1)
{
    ScenarioConfig c;
    c.id = id;
    c.seed = seed;
    return c;
}

// Column range of lag `lag` (0-based) of the endogenous or exogenous block.
Index phi_col(int lag, int j) { return lag * 5 + j; }
Index beta_col(int lag, int j) { return 20 + lag * 5 + j; }

} // namespace

TEST_CASE("noise covariance defaults")
{
    CHECK(default_noise_covariance(1, 10).isApprox(0.01 * Matrix::Identity(10, 10)));
    const Matrix c6 = default_noise_covariance(6, 10);
    CHECK(c6(0, 0) == doctest::Approx(0.01));
    CHECK(c6(0, 4) == doctest::Approx(0.005));
    CHECK(c6(5, 9) == doctest::Approx(0.005));
    CHECK(c6(4, 5) == 0.0);
    CHECK(Eigen::LLT<Matrix>(c6).info() == Eigen::Success);
}

TEST_CASE("scenario validation")
{
    CHECK_THROWS_AS(generate_scenario(scenario(7)), ValidationError);
    CHECK_THROWS_AS(generate_scenario(scenario(0)), ValidationError);
    ScenarioConfig c = scenario(1);
    c.noise_cov = Matrix::Identity(3, 3);
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c.noise_cov = -Matrix::Identity(10, 10);
    CHECK_THROWS_AS(c.validate(), ValidationError);
    c = scenario(1);
    c.target_radius = 1.0;
    CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("sparsity patterns")
{
    SUBCASE("lag-4 dependence only")
    {
        const ScenarioTruth t = generate_scenario(scenario(2));
        for (Index j = 0; j < t.pattern.cols(); ++j) {
            const bool lag4 = (j >= phi_col(3, 0) && j < phi_col(4, 0)) || j >= beta_col(3, 0);
            CHECK(t.pattern.col(j).all() == lag4);
            CHECK(t.pattern.col(j).any() == lag4);
        }
    }
    SUBCASE("own lags and exogenous blocks at lags 1 and 4")
    {
        const ScenarioTruth t = generate_scenario(scenario(4));
        for (int lag = 0; lag < 4; ++lag) {
            const bool active = lag == 0 || lag == 3;
            for (int i = 0; i < 5; ++i) {
                for (int j = 0; j < 5; ++j) {
                    CHECK(t.pattern(i, phi_col(lag, j)) == (active && i == j));
                    CHECK(t.pattern(i, beta_col(lag, j)) == active);
                }
            }
        }
    }
    SUBCASE("lags 1 and 4 only")
    {
        const ScenarioTruth t = generate_scenario(scenario(3));
        for (int lag : {1, 2}) {
            CHECK(!t.pattern.middleCols(phi_col(lag, 0), 5).any());
            CHECK(!t.pattern.middleCols(beta_col(lag, 0), 5).any());
        }
    }
    SUBCASE("fully dense")
    {
        CHECK(generate_scenario(scenario(5)).pattern.all());
    }
    SUBCASE("random sparse pattern has about 10% density")
    {
        double density = 0.0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const ScenarioTruth t = generate_scenario(scenario(1, seed));
            density += static_cast<double>(t.pattern.count()) / static_cast<double>(t.pattern.size());
            CHECK(t.pattern.leftCols(20).any());
        }
        density /= 20.0;
        CHECK(density > 0.04);
        CHECK(density < 0.16);
    }
}

TEST_CASE("generated truths are stationary at the target radius")
{
    for (int id = 1; id <= 6; ++id) {
        CAPTURE(id);
        const ScenarioTruth t = generate_scenario(scenario(id, 3));
        const Matrix A = t.joint();
        CHECK(t.spectral_radius <= 0.9 + 1e-12);
        CHECK(t.spectral_radius > 0.9 - 1e-6);
        CHECK(companion_spectral_radius(A) == doctest::Approx(t.spectral_radius));
        // Exogenous series do not depend on the endogenous ones.
        for (int lag = 0; lag < 4; ++lag) CHECK(A.block(5, lag * 10, 5, 5).isZero(0.0));
        // Coefficients live on the pattern and share one magnitude.
        Matrix eq(5, 40);
        eq << t.phi, t.beta;
        std::set<double> mags;
        for (Index i = 0; i < eq.rows(); ++i) {
            for (Index j = 0; j < eq.cols(); ++j) {
                CHECK((eq(i, j) != 0.0) == t.pattern(i, j));
                if (eq(i, j) != 0.0) mags.insert(std::abs(eq(i, j)));
            }
        }
        CHECK(mags.size() == 1);
        // Gamma follows the endogenous lag pattern.
        for (int lag = 0; lag < 4; ++lag)
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j) CHECK((t.gamma(i, lag * 5 + j) != 0.0) == t.pattern(i, phi_col(lag, j)));
    }
}

TEST_CASE("replicate seeds and simulation determinism")
{
    std::set<std::uint64_t> seeds;
    for (int r = 0; r < 100; ++r) seeds.insert(replicate_seed(42, r));
    CHECK(seeds.size() == 100);
    CHECK(replicate_seed(42, 3) == replicate_seed(42, 3));
    CHECK(replicate_seed(42, 3) != replicate_seed(43, 3));

    const ScenarioConfig c = scenario(2);
    const ScenarioTruth t = generate_scenario(c);
    const auto a = simulate_varx(t, c, 11);
    const auto b = simulate_varx(t, c, 11);
    const auto d = simulate_varx(t, c, 12);
    CHECK(a.first.rows() == 100);
    CHECK(a.first.cols() == 5);
    CHECK(a.second.cols() == 5);
    CHECK(a.first == b.first);
    CHECK(a.second == b.second);
    CHECK(a.first != d.first);
    CHECK(a.first.allFinite());
}

TEST_CASE("with zero coefficients the series are the noise")
{
    ScenarioConfig c = scenario(6);
    c.T = 20000;
    c.burn_in = 0;
    ScenarioTruth zero;
    zero.phi = Matrix::Zero(5, 20);
    zero.beta = Matrix::Zero(5, 20);
    zero.gamma = Matrix::Zero(5, 20);
    const auto [y, x] = simulate_varx(zero, c, 5);
    Matrix joint(y.rows(), 10);
    joint << y, x;
    const Matrix centered = joint.rowwise() - joint.colwise().mean();
    const Matrix cov = centered.transpose() * centered / static_cast<double>(joint.rows() - 1);
    const Matrix want = c.covariance();
    for (Index i = 0; i < 10; ++i) {
        for (Index j = 0; j < 10; ++j) {
            if (want(i, j) != 0.0) CHECK(std::abs(cov(i, j) / want(i, j) - 1.0) < 0.3);
            else CHECK(std::abs(cov(i, j)) < 0.3 * 0.005);
        }
    }
}

TEST_CASE("small study bookkeeping")
{
    ScenarioConfig c = scenario(4);
    c.k = 2;
    c.m = 1;
    c.p = 1;
    c.s = 1;
    c.T = 60;
    c.n_reps = 1;
    StudyOptions o;
    o.structures = {{PenaltyKind::LagGroup, std::nullopt}, {PenaltyKind::Basic, std::nullopt}};
    o.benchmarks = {"mean", "rw", "aic"};
    o.gridpoints = 5;
    o.grid_depth = 100.0;
    const StudyReport one = run_study(c, o);
    CHECK(one.n_reps == 1);
    REQUIRE(one.rows.size() == 5);
    CHECK(one.rows[0].model == "lag");
    CHECK(one.rows[0].penalized);
    CHECK(one.rows[2].model == "mean");
    CHECK(!one.rows[2].penalized);
    CHECK(one.rows[2].mean_relative == doctest::Approx(1.0));
    for (const auto& row : one.rows) {
        CAPTURE(row.model);
        CHECK(row.completed + row.failures == 1);
        CHECK(row.se_msfe == 0.0);
        CHECK(row.se_relative == 0.0);
    }

    c.n_reps = 3;
    const StudyReport three = run_study(c, o);
    for (const auto& row : three.rows) {
        CAPTURE(row.model);
        REQUIRE(row.msfe.size() == static_cast<std::size_t>(row.completed));
        double mean = 0.0;
        for (double v : row.msfe) mean += v;
        mean /= static_cast<double>(row.msfe.size());
        CHECK(row.mean_msfe == doctest::Approx(mean));
        double var = 0.0;
        for (double v : row.msfe) var += (v - mean) * (v - mean);
        var /= static_cast<double>(row.msfe.size() - 1);
        CHECK(row.se_msfe == doctest::Approx(std::sqrt(var / static_cast<double>(row.msfe.size()))));
    }
    // Deterministic given the seed.
    const StudyReport again = run_study(c, o);
    for (std::size_t i = 0; i < again.rows.size(); ++i) CHECK(again.rows[i].msfe == three.rows[i].msfe);
}
