#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "varxl/mcs.hpp"

using namespace varxl;

namespace {

LossMatrix losses_from(const Matrix& m)
{
    LossMatrix lm;
    lm.losses = m;
    for (Index i = 0; i < m.rows(); ++i) lm.model_names.push_back("m" + std::to_string(i));
    return lm;
}

Matrix positive_losses(Index models, Index periods, std::uint64_t seed)
{
    return oracle::gaussian_matrix(models, periods, seed).array().square();
}

std::vector<std::string> sorted(std::vector<std::string> v)
{
    std::sort(v.begin(), v.end());
    return v;
}

} // namespace

TEST_CASE("loss differentials")
{
    const LossMatrix lm = losses_from(positive_losses(3, 20, 1));
    const auto d = loss_differentials(lm);
    for (int i = 0; i < 3; ++i) {
        CHECK(d[i][i].isZero(0.0));
        for (int j = 0; j < 3; ++j) CHECK((d[i][j] + d[j][i]).isZero(0.0));
    }
    Matrix shifted(2, 10);
    shifted.row(1) = positive_losses(1, 10, 2).row(0);
    shifted.row(0) = shifted.row(1).array() + 1.0;
    const auto ds = loss_differentials(losses_from(shifted));
    CHECK((ds[0][1].array() - 1.0).abs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(loss_differentials(losses_from(positive_losses(1, 10, 3))), ValidationError);
}

TEST_CASE("loss matrix validation")
{
    LossMatrix lm = losses_from(positive_losses(2, 10, 1));
    lm.losses(0, 0) = -1.0;
    CHECK_THROWS_AS(lm.validate(), ValidationError);
    lm = losses_from(positive_losses(2, 10, 1));
    lm.model_names.pop_back();
    CHECK_THROWS_AS(lm.validate(), ValidationError);
    McsOptions o;
    o.block_length = 6;
    CHECK_THROWS_AS(model_confidence_set(losses_from(positive_losses(2, 10, 1)), o), ValidationError);
    o = {};
    o.alpha = 1.5;
    CHECK_THROWS_AS(model_confidence_set(losses_from(positive_losses(2, 10, 1)), o), ValidationError);
}

TEST_CASE("identical models are all retained")
{
    Matrix m(4, 30);
    const Matrix row = positive_losses(1, 30, 4);
    for (Index i = 0; i < 4; ++i) m.row(i) = row;
    McsOptions o;
    o.n_boot = 500;
    const McsResult r = model_confidence_set(losses_from(m), o);
    CHECK(r.surviving.size() == 4);
    CHECK(r.trace.empty());
}

TEST_CASE("a dominated model is eliminated")
{
    int eliminated = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Matrix m(2, 60);
        m.row(0) = positive_losses(1, 60, 100 + seed).row(0);
        m.row(1) = m.row(0).array() + 1000.0;
        McsOptions o;
        o.n_boot = 1000;
        o.seed = seed;
        const McsResult r = model_confidence_set(losses_from(m), o);
        eliminated += (r.surviving == std::vector<std::string>{"m0"}) ? 1 : 0;
    }
    CHECK(eliminated == 10);
}

TEST_CASE("two models with independent noise usually both survive")
{
    int both = 0;
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        McsOptions o;
        o.n_boot = 500;
        o.seed = seed;
        const McsResult r = model_confidence_set(losses_from(positive_losses(2, 80, 500 + seed)), o);
        both += r.surviving.size() == 2 ? 1 : 0;
    }
    CHECK(both >= 24);
}

TEST_CASE("set properties: nonempty subset, permutation invariance, duplicates kept together")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Matrix m = positive_losses(4, 50, 900 + seed);
        m.row(2).array() += 0.8; // a clearly worse model
        LossMatrix lm = losses_from(m);
        McsOptions o;
        o.n_boot = 800;
        o.seed = seed;
        const McsResult r = model_confidence_set(lm, o);
        CHECK(!r.surviving.empty());
        for (const auto& name : r.surviving) {
            CHECK(std::find(lm.model_names.begin(), lm.model_names.end(), name) != lm.model_names.end());
        }

        // Reversed order, same seed: the bootstrap indices do not depend on
        // model order, so the set is the same.
        LossMatrix rev;
        rev.losses = m.colwise().reverse();
        rev.model_names = std::vector<std::string>(lm.model_names.rbegin(), lm.model_names.rend());
        CHECK(sorted(model_confidence_set(rev, o).surviving) == sorted(r.surviving));

        // Duplicate a surviving model.
        const auto it = std::find(lm.model_names.begin(), lm.model_names.end(), r.surviving.front());
        const Index idx = it - lm.model_names.begin();
        LossMatrix dup = lm;
        dup.losses.conservativeResize(5, Eigen::NoChange);
        dup.losses.row(4) = m.row(idx);
        dup.model_names.push_back("copy");
        const McsResult rd = model_confidence_set(dup, o);
        const bool orig = std::find(rd.surviving.begin(), rd.surviving.end(), r.surviving.front()) != rd.surviving.end();
        const bool copy = std::find(rd.surviving.begin(), rd.surviving.end(), "copy") != rd.surviving.end();
        CHECK(orig == copy);
    }
}

TEST_CASE("determinism and trace")
{
    Matrix m = positive_losses(3, 40, 77);
    m.row(1).array() += 2.0;
    McsOptions o;
    o.n_boot = 400;
    o.seed = 9;
    const McsResult a = model_confidence_set(losses_from(m), o);
    const McsResult b = model_confidence_set(losses_from(m), o);
    CHECK(a.surviving == b.surviving);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].p_value == b.trace[i].p_value);
        CHECK(a.trace[i].p_value < o.alpha);
        if (i > 0) CHECK(a.trace[i].p_value >= a.trace[i - 1].p_value);
    }
    CHECK(a.block_length == 3);
}

TEST_CASE("circular block bootstrap indices")
{
    const auto idx = circular_block_indices(10, 3, 50, 4);
    REQUIRE(idx.size() == 50);
    for (const auto& row : idx) {
        REQUIRE(row.size() == 10);
        for (std::size_t i = 0; i < row.size(); ++i) {
            CHECK(row[i] >= 0);
            CHECK(row[i] < 10);
            // Within a block consecutive indices wrap around the sample.
            if (i % 3 != 0) CHECK(row[i] == (row[i - 1] + 1) % 10);
        }
    }
    CHECK(circular_block_indices(10, 3, 50, 4) == idx);
    CHECK(circular_block_indices(10, 3, 50, 5) != idx);
}
