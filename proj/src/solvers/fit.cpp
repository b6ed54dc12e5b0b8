#include "internal.hpp"

namespace varxl {

FitResult fit_design(const LaggedDesign& design, const PenaltyStructure& structure, double lambda,
                     const SolverOptions& opts)
{
    const VarxSpec& spec = design.spec;
    switch (structure.kind) {
    case PenaltyKind::Basic:
        return fit_basic(design, lambda, opts);
    case PenaltyKind::LagGroup:
        return fit_lag_group(design, lambda, group_partition(spec, structure), opts);
    case PenaltyKind::OwnOther:
        return fit_own_other(design, lambda, group_partition(spec, structure), opts);
    case PenaltyKind::SparseLag:
    case PenaltyKind::SparseOwnOther:
        return fit_sparse_group(design, lambda, structure.resolved_alpha(spec.k), group_partition(spec, structure),
                                opts);
    case PenaltyKind::EndogenousFirst:
        return fit_endogenous_first(design, lambda, opts);
    }
    throw ValidationError("unknown penalty structure");
}

FitResult fit(const Matrix& endog, const Matrix& exog, const VarxSpec& spec, const PenaltyStructure& structure,
              double lambda, const MinnesotaTarget* target, const SolverOptions& opts)
{
    LaggedDesign design = build_lagged_design(endog, exog, spec, spec.h, false);
    Matrix C;
    if (target != nullptr) {
        C = target->stacked();
        apply_target(design, C);
    }
    center_design(design);
    FitResult result = fit_design(design, structure, lambda, opts);
    if (target != nullptr) {
        // The intercept recovered on the shifted responses already accounts
        // for the target; only the slopes need it added back.
        result.coeffs = CoefficientSet::from_stacked(result.coeffs.nu, result.B + C, spec);
        result.sparsity_ratio = sparsity_ratio(result.coeffs);
    }
    return result;
}

} // namespace varxl
