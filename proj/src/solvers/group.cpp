#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "varxl/kernels.hpp"

namespace varxl {

namespace detail {

BcdOutcome block_coordinate_descent(const LaggedDesign& design, SolverWorkspace& ws,
                                    const std::vector<PreparedGroup>& groups, Matrix& B, RowMatrix& R,
                                    const SolverOptions& opts, const GroupUpdate& update)
{
    const auto N = static_cast<std::size_t>(design.samples());
    std::vector<char> active(groups.size(), 0);
    Vector c;
    Vector current;
    Vector next;

    const auto visit = [&](std::size_t gi) {
        const PreparedGroup& g = groups[gi];
        c.resize(g.size);
        current.resize(g.size);
        Index off = 0;
        for (const Slice& s : g.slices) {
            std::span<const double> r(R.row(s.row).data(), N);
            const Index n = static_cast<Index>(s.cols.size());
            for (Index a = 0; a < n; ++a) {
                const Index col = s.cols[static_cast<std::size_t>(a)];
                current(off + a) = B(s.row, col);
                c(off + a) = kernels::dot(r, {design.Z.row(col).data(), N});
            }
            c.segment(off, n).noalias() += ws.block(s.block).gram * current.segment(off, n);
            off += n;
        }
        next.resize(g.size);
        update(gi, c, current, next);

        double max_change = 0.0;
        bool nonzero = false;
        off = 0;
        for (const Slice& s : g.slices) {
            std::span<double> r(R.row(s.row).data(), N);
            for (std::size_t a = 0; a < s.cols.size(); ++a) {
                const Index idx = off + static_cast<Index>(a);
                const double delta = next(idx) - current(idx);
                nonzero = nonzero || next(idx) != 0.0;
                if (delta == 0.0) continue;
                kernels::axpy(-delta, {design.Z.row(s.cols[a]).data(), N}, r);
                B(s.row, s.cols[a]) = next(idx);
                max_change = std::max(max_change, std::abs(delta));
            }
            off += static_cast<Index>(s.cols.size());
        }
        active[gi] = nonzero;
        return max_change;
    };

    BcdOutcome out;
    while (out.iterations < opts.max_iter) {
        ++out.iterations;
        double change = 0.0;
        for (std::size_t gi = 0; gi < groups.size(); ++gi) change = std::max(change, visit(gi));
        if (change < opts.tol) {
            out.converged = true;
            break;
        }
        if (!opts.active_set) continue;
        while (out.iterations < opts.max_iter) {
            ++out.iterations;
            double active_change = 0.0;
            for (std::size_t gi = 0; gi < groups.size(); ++gi) {
                if (active[gi]) active_change = std::max(active_change, visit(gi));
            }
            if (active_change < opts.tol) break;
        }
    }
    return out;
}

} // namespace detail

namespace {

FitResult fit_group(const LaggedDesign& design, double lambda, const GroupPartition& partition,
                    const SolverOptions& opts, PenaltyKind kind)
{
    detail::check_design(design, lambda, opts);
    if (partition.rows != design.Y.rows() || partition.cols != design.Z.rows()) {
        throw ValidationError("group partition does not match the design");
    }
    detail::WorkspaceRef ws(design, opts);
    const auto groups = detail::prepare_groups(partition, *ws);
    Matrix B = detail::initial_coefficients(design, opts);
    RowMatrix R = detail::residual(design, B);

    Vector eigvals;
    Vector proj;
    const auto update = [&](std::size_t gi, const Vector& c, const Vector&, Vector& next) {
        const detail::PreparedGroup& g = groups[gi];
        const double threshold = lambda * g.weight;
        if (threshold > 0.0 && c.norm() <= threshold) {
            next.setZero();
            return;
        }
        // Spectral data of the group Hessian, which is block diagonal by row.
        eigvals.resize(g.size);
        proj.resize(g.size);
        Index off = 0;
        double vmax = 0.0;
        for (const auto& s : g.slices) {
            const auto& blk = ws->block(s.block);
            const Index n = static_cast<Index>(s.cols.size());
            eigvals.segment(off, n) = blk.eigvals;
            proj.segment(off, n).noalias() = blk.eigvecs.transpose() * c.segment(off, n);
            vmax = std::max(vmax, blk.eigvals.maxCoeff());
            off += n;
        }
        const double cutoff = 1e-12 * vmax;
        for (Index i = 0; i < g.size; ++i) {
            if (!(eigvals(i) > cutoff)) proj(i) = 0.0;
        }
        if (threshold > 0.0 && proj.norm() <= threshold) {
            next.setZero();
            return;
        }
        const double radius = threshold > 0.0 ? detail::trust_region_radius(eigvals, proj, threshold) : 0.0;
        for (Index i = 0; i < g.size; ++i) {
            if (proj(i) == 0.0) continue;
            proj(i) = threshold > 0.0 ? radius * proj(i) / (eigvals(i) * radius + threshold) : proj(i) / eigvals(i);
        }
        off = 0;
        for (const auto& s : g.slices) {
            const Index n = static_cast<Index>(s.cols.size());
            next.segment(off, n).noalias() = ws->block(s.block).eigvecs * proj.segment(off, n);
            off += n;
        }
    };

    const auto outcome = detail::block_coordinate_descent(design, *ws, groups, B, R, opts, update);
    const PenaltyStructure structure{kind, std::nullopt};
    return detail::finish(design, std::move(B), structure, partition, lambda, outcome.iterations, outcome.converged);
}

} // namespace

FitResult fit_lag_group(const LaggedDesign& design, double lambda, const GroupPartition& partition,
                        const SolverOptions& opts)
{
    return fit_group(design, lambda, partition, opts, PenaltyKind::LagGroup);
}

FitResult fit_own_other(const LaggedDesign& design, double lambda, const GroupPartition& partition,
                        const SolverOptions& opts)
{
    return fit_group(design, lambda, partition, opts, PenaltyKind::OwnOther);
}

} // namespace varxl
