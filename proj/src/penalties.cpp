#include "varxl/penalties.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace varxl {

namespace {

struct KindName {
    PenaltyKind kind;
    std::string_view name;
};

constexpr KindName kind_names[] = {
    {PenaltyKind::Basic, "basic"},
    {PenaltyKind::LagGroup, "lag"},
    {PenaltyKind::OwnOther, "own_other"},
    {PenaltyKind::SparseLag, "sparse_lag"},
    {PenaltyKind::SparseOwnOther, "sparse_own_other"},
    {PenaltyKind::EndogenousFirst, "endo_first"},
};

void add_endogenous_lag_groups(const VarxSpec& spec, bool own_other, GroupPartition& out)
{
    const Index k = spec.k;
    for (int lag = 1; lag <= spec.p; ++lag) {
        const Index first = (lag - 1) * k;
        if (!own_other) {
            CoefficientGroup g;
            g.kind = GroupKind::EndogenousLag;
            g.weight = static_cast<double>(k);
            g.lag = lag;
            for (Index i = 0; i < k; ++i) {
                for (Index j = 0; j < k; ++j) g.entries.emplace_back(i, first + j);
            }
            out.groups.push_back(std::move(g));
            continue;
        }
        CoefficientGroup own;
        own.kind = GroupKind::OwnDiagonal;
        own.weight = std::sqrt(static_cast<double>(k));
        own.lag = lag;
        for (Index i = 0; i < k; ++i) own.entries.emplace_back(i, first + i);
        out.groups.push_back(std::move(own));
        if (k > 1) {
            CoefficientGroup other;
            other.kind = GroupKind::OtherOffDiagonal;
            other.weight = std::sqrt(static_cast<double>(k * (k - 1)));
            other.lag = lag;
            for (Index i = 0; i < k; ++i) {
                for (Index j = 0; j < k; ++j) {
                    if (i != j) other.entries.emplace_back(i, first + j);
                }
            }
            out.groups.push_back(std::move(other));
        }
    }
}

void add_exogenous_column_groups(const VarxSpec& spec, GroupPartition& out)
{
    const Index base = spec.endogenous_regressors();
    for (int lag = 1; lag <= spec.s; ++lag) {
        for (Index c = 0; c < spec.m; ++c) {
            CoefficientGroup g;
            g.kind = GroupKind::ExogenousColumn;
            g.weight = std::sqrt(static_cast<double>(spec.k));
            g.lag = lag;
            const Index col = base + (lag - 1) * spec.m + c;
            for (Index i = 0; i < spec.k; ++i) g.entries.emplace_back(i, col);
            out.groups.push_back(std::move(g));
        }
    }
}

double group_norm(const Matrix& B, const CoefficientGroup& g)
{
    double ss = 0.0;
    for (const auto& [r, c] : g.entries) ss += B(r, c) * B(r, c);
    return std::sqrt(ss);
}

double endogenous_first_block_threshold(double endo_norm, double exo_norm)
{
    if (exo_norm > endo_norm) return (endo_norm * endo_norm + exo_norm * exo_norm) / (2.0 * exo_norm);
    return endo_norm;
}

} // namespace

std::string_view to_string(PenaltyKind kind)
{
    for (const auto& kn : kind_names) {
        if (kn.kind == kind) return kn.name;
    }
    return "unknown";
}

PenaltyKind parse_penalty_kind(std::string_view name)
{
    for (const auto& kn : kind_names) {
        if (kn.name == name) return kn.kind;
    }
    throw ValidationError("unknown penalty structure '" + std::string(name) +
                          "' (expected basic, lag, own_other, sparse_lag, sparse_own_other or endo_first)");
}

const std::vector<PenaltyKind>& all_penalty_kinds()
{
    static const std::vector<PenaltyKind> kinds{PenaltyKind::Basic,     PenaltyKind::LagGroup,
                                                PenaltyKind::OwnOther,  PenaltyKind::SparseLag,
                                                PenaltyKind::SparseOwnOther, PenaltyKind::EndogenousFirst};
    return kinds;
}

double default_alpha(int k)
{
    if (k < 1) throw ValidationError("default_alpha needs k >= 1");
    return 1.0 / (k + 1.0);
}

double PenaltyStructure::resolved_alpha(int k) const
{
    const double a = alpha ? *alpha : default_alpha(k);
    if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
    return a;
}

GroupPartition group_partition(const VarxSpec& spec, const PenaltyStructure& structure)
{
    spec.validate();
    GroupPartition out;
    out.kind = structure.kind;
    out.rows = spec.k;
    out.cols = spec.regressors();
    switch (structure.kind) {
    case PenaltyKind::Basic:
        for (Index i = 0; i < out.rows; ++i) {
            for (Index c = 0; c < out.cols; ++c) {
                CoefficientGroup g;
                g.kind = GroupKind::Single;
                g.entries.emplace_back(i, c);
                g.row = static_cast<int>(i);
                g.lag = static_cast<int>(c < spec.endogenous_regressors()
                                             ? c / spec.k + 1
                                             : (c - spec.endogenous_regressors()) / spec.m + 1);
                out.groups.push_back(std::move(g));
            }
        }
        break;
    case PenaltyKind::LagGroup:
    case PenaltyKind::SparseLag:
        add_endogenous_lag_groups(spec, false, out);
        add_exogenous_column_groups(spec, out);
        break;
    case PenaltyKind::OwnOther:
    case PenaltyKind::SparseOwnOther:
        add_endogenous_lag_groups(spec, true, out);
        add_exogenous_column_groups(spec, out);
        break;
    case PenaltyKind::EndogenousFirst: {
        if (spec.s > spec.p) {
            throw ValidationError("the endo_first structure requires s <= p (got p = " + std::to_string(spec.p) +
                                  ", s = " + std::to_string(spec.s) + ")");
        }
        const Index base = spec.endogenous_regressors();
        for (Index i = 0; i < spec.k; ++i) {
            for (int lag = 1; lag <= spec.p; ++lag) {
                CoefficientGroup outer;
                outer.kind = GroupKind::NestedOuter;
                outer.lag = lag;
                outer.row = static_cast<int>(i);
                for (Index j = 0; j < spec.k; ++j) outer.entries.emplace_back(i, (lag - 1) * spec.k + j);
                if (lag <= spec.s) {
                    CoefficientGroup inner;
                    inner.kind = GroupKind::NestedInner;
                    inner.lag = lag;
                    inner.row = static_cast<int>(i);
                    for (Index j = 0; j < spec.m; ++j) {
                        outer.entries.emplace_back(i, base + (lag - 1) * spec.m + j);
                        inner.entries.emplace_back(i, base + (lag - 1) * spec.m + j);
                    }
                    out.groups.push_back(std::move(outer));
                    out.groups.push_back(std::move(inner));
                } else {
                    out.groups.push_back(std::move(outer));
                }
            }
        }
        break;
    }
    }
    return out;
}

double penalty_value(const Matrix& B, const GroupPartition& partition, double alpha)
{
    if (B.rows() != partition.rows || B.cols() != partition.cols) {
        throw ValidationError("penalty_value: coefficient matrix has the wrong shape");
    }
    double group_part = 0.0;
    for (const auto& g : partition.groups) group_part += g.weight * group_norm(B, g);
    if (alpha == 0.0) return group_part;
    return (1.0 - alpha) * group_part + alpha * B.cwiseAbs().sum();
}

double penalty_value(const Matrix& B, const PenaltyStructure& structure, const VarxSpec& spec)
{
    const double alpha = structure.is_sparse() ? structure.resolved_alpha(spec.k) : 0.0;
    return penalty_value(B, group_partition(spec, structure), alpha);
}

double sparse_group_threshold(const Vector& c, double alpha, double weight)
{
    const double cmax = c.cwiseAbs().maxCoeff();
    const double cnorm = c.norm();
    if (cnorm == 0.0) return 0.0;
    if (alpha >= 1.0) return cmax;
    if (alpha <= 0.0) return cnorm / weight;

    const auto holds = [&](double t) {
        double ss = 0.0;
        for (Index i = 0; i < c.size(); ++i) {
            const double v = std::abs(c(i)) - alpha * t;
            if (v > 0.0) ss += v * v;
        }
        return std::sqrt(ss) <= (1.0 - alpha) * weight * t;
    };
    double hi = std::min(cmax / alpha, cnorm / ((1.0 - alpha) * weight));
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (holds(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

double lambda_max(const LaggedDesign& design, const PenaltyStructure& structure, const VarxSpec& spec)
{
    if (design.Y.rows() != spec.k || design.Z.rows() != spec.regressors()) {
        throw ValidationError("lambda_max: design does not match the model dimensions");
    }
    // Correlation of every regressor with every response at B = 0.
    const Matrix C = design.Y * design.Z.transpose();
    const GroupPartition partition = group_partition(spec, structure);

    double best = 0.0;
    switch (structure.kind) {
    case PenaltyKind::Basic:
        return C.size() == 0 ? 0.0 : C.cwiseAbs().maxCoeff();
    case PenaltyKind::LagGroup:
    case PenaltyKind::OwnOther:
        for (const auto& g : partition.groups) best = std::max(best, group_norm(C, g) / g.weight);
        return best;
    case PenaltyKind::SparseLag:
    case PenaltyKind::SparseOwnOther: {
        const double alpha = structure.resolved_alpha(spec.k);
        for (const auto& g : partition.groups) {
            Vector c(static_cast<Index>(g.entries.size()));
            for (std::size_t e = 0; e < g.entries.size(); ++e) c(static_cast<Index>(e)) = C(g.entries[e].first, g.entries[e].second);
            best = std::max(best, sparse_group_threshold(c, alpha, g.weight));
        }
        return best;
    }
    case PenaltyKind::EndogenousFirst: {
        const Index base = spec.endogenous_regressors();
        for (Index i = 0; i < spec.k; ++i) {
            for (int lag = 1; lag <= spec.p; ++lag) {
                const double endo = C.row(i).segment((lag - 1) * spec.k, spec.k).norm();
                const double exo = lag <= spec.s ? C.row(i).segment(base + (lag - 1) * spec.m, spec.m).norm() : 0.0;
                best = std::max(best, endogenous_first_block_threshold(endo, exo));
            }
        }
        return best;
    }
    }
    return best;
}

LambdaGrid lambda_grid(double lambda_max, int n_points, double depth)
{
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
        throw ValidationError("lambda_max is zero: the response carries no signal (constant or degenerate data)");
    }
    if (n_points < 2) throw ValidationError("the penalty grid needs at least 2 points");
    if (!(depth > 1.0)) throw ValidationError("grid depth must exceed 1");
    LambdaGrid grid;
    grid.depth = depth;
    grid.values.resize(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        grid.values[static_cast<std::size_t>(i)] = lambda_max * std::pow(depth, -static_cast<double>(i) / (n_points - 1));
    }
    grid.values.front() = lambda_max;
    grid.values.back() = lambda_max / depth;
    return grid;
}

} // namespace varxl
