#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "varxl/kernels.hpp"

namespace varxl {

namespace {

struct GroupProblem {
    const detail::PreparedGroup* group;
    SolverWorkspace* ws;
    const Vector* c;
    double l1;    // alpha * lambda
    double shrink; // (1 - alpha) * lambda * weight

    void hessian_times(const Vector& x, Vector& out) const
    {
        out.resize(x.size());
        Index off = 0;
        for (const auto& s : group->slices) {
            const Index n = static_cast<Index>(s.cols.size());
            out.segment(off, n).noalias() = ws->block(s.block).gram * x.segment(off, n);
            off += n;
        }
    }

    double objective(const Vector& x, Vector& scratch) const
    {
        hessian_times(x, scratch);
        return 0.5 * x.dot(scratch) - c->dot(x) + shrink * x.norm() + l1 * x.lpNorm<1>();
    }

    // ST by step*l1, then shrink the whole group by step*shrink.
    void prox(const Vector& u, double step, Vector& out) const
    {
        out.resize(u.size());
        kernels::soft_threshold({u.data(), static_cast<std::size_t>(u.size())}, step * l1,
                                {out.data(), static_cast<std::size_t>(out.size())});
        const double norm = out.norm();
        const double keep = norm > 0.0 ? std::max(0.0, 1.0 - step * shrink / norm) : 0.0;
        if (keep == 0.0) out.setZero();
        else out *= keep;
    }
};

} // namespace

FitResult fit_sparse_group(const LaggedDesign& design, double lambda, double alpha, const GroupPartition& partition,
                           const SolverOptions& opts)
{
    detail::check_design(design, lambda, opts);
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
    if (partition.rows != design.Y.rows() || partition.cols != design.Z.rows()) {
        throw ValidationError("group partition does not match the design");
    }
    PenaltyKind kind = partition.kind;
    if (kind == PenaltyKind::LagGroup) kind = PenaltyKind::SparseLag;
    if (kind == PenaltyKind::OwnOther) kind = PenaltyKind::SparseOwnOther;
    if (kind != PenaltyKind::SparseLag && kind != PenaltyKind::SparseOwnOther) {
        throw ValidationError("sparse group solver needs a lag or own/other partition");
    }

    detail::WorkspaceRef ws(design, opts);
    const auto groups = detail::prepare_groups(partition, *ws);
    Matrix B = detail::initial_coefficients(design, opts);
    RowMatrix R = detail::residual(design, B);

    const double inner_tol = 0.1 * opts.tol;
    const int inner_max = std::max(1000, 10 * opts.max_iter);
    Vector x, x_prev, y, grad, u, candidate, scratch;

    const auto update = [&](std::size_t gi, const Vector& c, const Vector& current, Vector& next) {
        const detail::PreparedGroup& g = groups[gi];
        GroupProblem prob{&g, &*ws, &c, alpha * lambda, (1.0 - alpha) * lambda * g.weight};

        // Zero is optimal for the group exactly when the soft-thresholded
        // correlation fits inside the group ball.
        Vector st(c.size());
        kernels::soft_threshold({c.data(), static_cast<std::size_t>(c.size())}, prob.l1,
                                {st.data(), static_cast<std::size_t>(st.size())});
        if (st.norm() <= prob.shrink) {
            next.setZero();
            return;
        }
        double lipschitz = 0.0;
        for (const auto& s : g.slices) lipschitz = std::max(lipschitz, ws->block(s.block).max_eigenvalue);
        if (!(lipschitz > 0.0)) {
            next.setZero();
            return;
        }
        const double step = 1.0 / lipschitz;

        x = current;
        y = x;
        double f = prob.objective(x, scratch);
        int momentum = 0;
        for (int it = 0; it < inner_max; ++it) {
            prob.hessian_times(y, grad);
            grad -= c;
            u = y - step * grad;
            prob.prox(u, step, candidate);
            const double fc = prob.objective(candidate, scratch);
            if (fc > f && momentum > 0) {
                // Restart from the last iterate without momentum.
                y = x;
                momentum = 0;
                continue;
            }
            const double change = (candidate - x).cwiseAbs().maxCoeff();
            x_prev = x;
            x = candidate;
            f = std::min(f, fc);
            if (change < inner_tol) break;
            ++momentum;
            y = x + (static_cast<double>(momentum) / (momentum + 3.0)) * (x - x_prev);
        }
        next = x;
    };

    const auto outcome = detail::block_coordinate_descent(design, *ws, groups, B, R, opts, update);
    PenaltyStructure structure{kind, alpha};
    return detail::finish(design, std::move(B), structure, partition, lambda, outcome.iterations, outcome.converged);
}

} // namespace varxl
