#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "varxl/penalties.hpp"

using namespace varxl;

namespace {

PenaltyStructure make(PenaltyKind kind, std::optional<double> alpha = std::nullopt) { return {kind, alpha}; }

double alpha_for(PenaltyKind kind, int k)
{
    const PenaltyStructure ps{kind, std::nullopt};
    return ps.is_sparse() ? ps.resolved_alpha(k) : 0.0;
}

} // namespace

TEST_CASE("structure names round trip")
{
    for (PenaltyKind k : all_penalty_kinds()) CHECK(parse_penalty_kind(to_string(k)) == k);
    CHECK(all_penalty_kinds().size() == 6);
    CHECK(to_string(PenaltyKind::EndogenousFirst) == "endo_first");
    CHECK_THROWS_AS(parse_penalty_kind("ridge"), ValidationError);
}

TEST_CASE("default mixing weight is 1/(k+1)")
{
    CHECK(default_alpha(3) == doctest::Approx(0.25));
    CHECK(make(PenaltyKind::SparseLag).resolved_alpha(4) == doctest::Approx(0.2));
    CHECK(make(PenaltyKind::SparseLag, 0.7).resolved_alpha(4) == 0.7);
}

TEST_CASE("group partitions")
{
    const VarxSpec spec{3, 2, 2, 1, 1};
    const Index cells = 3 * (3 * 2 + 2 * 1);

    const auto covered = [&](const GroupPartition& gp) {
        Matrix count = Matrix::Zero(3, 8);
        for (const auto& g : gp.groups)
            for (auto [i, j] : g.entries) count(i, j) += 1.0;
        return count;
    };

    SUBCASE("basic: one group per coefficient")
    {
        const auto gp = group_partition(spec, make(PenaltyKind::Basic));
        CHECK(static_cast<Index>(gp.groups.size()) == cells);
        CHECK(covered(gp).isOnes());
    }
    SUBCASE("lag: one block per lag plus one per exogenous column")
    {
        const auto gp = group_partition(spec, make(PenaltyKind::LagGroup));
        CHECK(gp.groups.size() == 2 + 2);
        CHECK(gp.groups[0].entries.size() == 9);
        CHECK(gp.groups[0].weight == doctest::Approx(3.0));
        CHECK(gp.groups[2].entries.size() == 3);
        CHECK(gp.groups[2].weight == doctest::Approx(std::sqrt(3.0)));
        CHECK(covered(gp).isOnes());
    }
    SUBCASE("own/other: diagonal and off-diagonal per lag")
    {
        const auto gp = group_partition(spec, make(PenaltyKind::OwnOther));
        CHECK(gp.groups.size() == 4 + 2);
        int own = 0, other = 0;
        for (const auto& g : gp.groups) {
            if (g.kind == GroupKind::OwnDiagonal) {
                ++own;
                CHECK(g.entries.size() == 3);
                CHECK(g.weight == doctest::Approx(std::sqrt(3.0)));
            }
            if (g.kind == GroupKind::OtherOffDiagonal) {
                ++other;
                CHECK(g.entries.size() == 6);
                CHECK(g.weight == doctest::Approx(std::sqrt(6.0)));
            }
        }
        CHECK(own == 2);
        CHECK(other == 2);
        CHECK(covered(gp).isOnes());
    }
    SUBCASE("own/other with a single series has no off-diagonal group")
    {
        const auto gp = group_partition(VarxSpec{1, 0, 3, 0, 1}, make(PenaltyKind::OwnOther));
        CHECK(gp.groups.size() == 3);
        for (const auto& g : gp.groups) CHECK(g.kind == GroupKind::OwnDiagonal);
    }
    SUBCASE("endogenous-first: nested row groups")
    {
        const auto gp = group_partition(spec, make(PenaltyKind::EndogenousFirst));
        int outer = 0, inner = 0;
        for (const auto& g : gp.groups) {
            CHECK(g.weight == 1.0);
            if (g.kind == GroupKind::NestedOuter) ++outer;
            if (g.kind == GroupKind::NestedInner) {
                ++inner;
                CHECK(g.entries.size() == 2);
            }
        }
        CHECK(outer == 3 * 2);
        CHECK(inner == 3 * 1);
        CHECK_THROWS_AS(group_partition(VarxSpec{2, 1, 1, 2, 1}, make(PenaltyKind::EndogenousFirst)),
                        ValidationError);
    }
}

TEST_CASE("penalty values match the written-out definitions")
{
    const VarxSpec spec{3, 2, 2, 2, 1};
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix B = oracle::gaussian_matrix(3, spec.regressors(), 40 + rep);
        for (PenaltyKind kind : all_penalty_kinds()) {
            CAPTURE(to_string(kind));
            const double alpha = alpha_for(kind, spec.k);
            CHECK(penalty_value(B, make(kind), spec) ==
                  doctest::Approx(oracle::penalty(B, kind, spec, alpha)).epsilon(1e-12));
        }
    }
    // Sparse kinds at the ends of the mixing range.
    const Matrix B = oracle::gaussian_matrix(3, spec.regressors(), 7);
    CHECK(penalty_value(B, make(PenaltyKind::SparseLag, 1.0), spec) ==
          doctest::Approx(penalty_value(B, make(PenaltyKind::Basic), spec)));
    CHECK(penalty_value(B, make(PenaltyKind::SparseOwnOther, 0.0), spec) ==
          doctest::Approx(penalty_value(B, make(PenaltyKind::OwnOther), spec)));
}

TEST_CASE("penalties are norms: zero at zero, homogeneous, triangle inequality")
{
    const VarxSpec spec{2, 1, 3, 2, 1};
    const Matrix A = oracle::gaussian_matrix(2, spec.regressors(), 1);
    const Matrix B = oracle::gaussian_matrix(2, spec.regressors(), 2);
    for (PenaltyKind kind : all_penalty_kinds()) {
        CAPTURE(to_string(kind));
        const auto P = [&](const Matrix& M) { return penalty_value(M, make(kind), spec); };
        CHECK(P(Matrix::Zero(2, spec.regressors())) == 0.0);
        CHECK(P(-2.5 * A) == doctest::Approx(2.5 * P(A)));
        CHECK(P(A + B) <= P(A) + P(B) + 1e-12);
    }
}

TEST_CASE("lambda_max is the exact zero threshold of the proximal map")
{
    // B = 0 is optimal iff prox_{lambda P}(Y Z') = 0, since the loss gradient
    // at zero is -Y Z' and the penalty is positively homogeneous.
    for (int rep = 0; rep < 6; ++rep) {
        const int k = 2 + rep % 2;
        const int m = rep % 3 == 0 ? 0 : 2;
        const int p = 1 + rep % 2;
        const auto inst = oracle::make_instance(k, m, p, m > 0 ? 1 : 0, 50, 300 + rep);
        const Matrix C = Matrix(inst.design.Y) * Matrix(inst.design.Z).transpose();
        for (PenaltyKind kind : all_penalty_kinds()) {
            CAPTURE(rep);
            CAPTURE(to_string(kind));
            const double alpha = alpha_for(kind, k);
            const double lmax = lambda_max(inst.design, make(kind), inst.spec);
            REQUIRE(lmax > 0.0);
            CHECK(oracle::prox(C, kind, inst.spec, alpha, lmax * (1 + 1e-6)).cwiseAbs().maxCoeff() == 0.0);
            CHECK(oracle::prox(C, kind, inst.spec, alpha, lmax * (1 - 1e-4)).cwiseAbs().maxCoeff() > 0.0);
        }
    }
}

TEST_CASE("lambda_max special cases")
{
    const auto inst = oracle::make_instance(2, 1, 2, 1, 40, 5);
    const Matrix C = Matrix(inst.design.Y) * Matrix(inst.design.Z).transpose();
    CHECK(lambda_max(inst.design, make(PenaltyKind::Basic), inst.spec) == doctest::Approx(C.cwiseAbs().maxCoeff()));
    CHECK(lambda_max(inst.design, make(PenaltyKind::SparseLag, 1.0), inst.spec) ==
          doctest::Approx(C.cwiseAbs().maxCoeff()));
    CHECK(lambda_max(inst.design, make(PenaltyKind::SparseLag, 0.0), inst.spec) ==
          doctest::Approx(lambda_max(inst.design, make(PenaltyKind::LagGroup), inst.spec)));

    auto zero = inst.design;
    zero.Y.setZero();
    CHECK(lambda_max(zero, make(PenaltyKind::LagGroup), inst.spec) == 0.0);
    CHECK_THROWS_AS(lambda_max(inst.design, make(PenaltyKind::Basic), VarxSpec{3, 1, 2, 1, 1}), ValidationError);
}

TEST_CASE("sparse group threshold")
{
    Vector c(4);
    c << 3.0, -1.0, 0.5, 2.0;
    for (double alpha : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        CAPTURE(alpha);
        const double w = 2.0;
        const double t = sparse_group_threshold(c, alpha, w);
        const auto excess = [&](double tt) {
            const Vector st = c.unaryExpr([&](double x) { return std::copysign(std::max(std::abs(x) - alpha * tt, 0.0), x); });
            return st.norm() - (1 - alpha) * w * tt;
        };
        CHECK(excess(t * (1 + 1e-9)) <= 1e-9);
        CHECK(excess(t * (1 - 1e-6)) > 0.0);
    }
    CHECK(sparse_group_threshold(c, 1.0, 2.0) == doctest::Approx(3.0));
    CHECK(sparse_group_threshold(c, 0.0, 2.0) == doctest::Approx(c.norm() / 2.0));
    CHECK(sparse_group_threshold(Vector::Zero(3), 0.3, 1.0) == 0.0);
}

TEST_CASE("lambda grid")
{
    const LambdaGrid g = lambda_grid(10.0, 10, 25.0);
    REQUIRE(g.values.size() == 10);
    CHECK(g.values.front() == 10.0);
    CHECK(g.values.back() == doctest::Approx(0.4));
    for (std::size_t i = 1; i < g.values.size(); ++i) {
        CHECK(g.values[i] < g.values[i - 1]);
        CHECK(g.values[i - 1] / g.values[i] == doctest::Approx(std::pow(25.0, 1.0 / 9.0)));
    }
    CHECK_THROWS_AS(lambda_grid(0.0), ValidationError);
    CHECK_THROWS_AS(lambda_grid(1.0, 1), ValidationError);
    CHECK_THROWS_AS(lambda_grid(1.0, 5, 1.0), ValidationError);
}
