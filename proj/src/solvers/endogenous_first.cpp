#include <algorithm>
#include <cmath>

#include "internal.hpp"

namespace varxl {

Vector hierarchical_prox(const Vector& v, double lambda_step, Index k, Index m)
{
    if (v.size() != k + m) throw ValidationError("hierarchical_prox: vector must hold k + m entries");
    Vector out = v;
    if (lambda_step <= 0.0) return out;
    // Inner (exogenous) group first, then the whole block.
    if (m > 0) {
        auto inner = out.tail(m);
        const double n = inner.norm();
        if (n <= lambda_step) inner.setZero();
        else inner *= 1.0 - lambda_step / n;
    }
    const double n = out.norm();
    if (n <= lambda_step) out.setZero();
    else out *= 1.0 - lambda_step / n;
    return out;
}

namespace {

struct LagBlock {
    Index endo_start;
    Index exo_start;
    Index exo_len;
};

double block_penalty(const Vector& b, const std::vector<LagBlock>& blocks, Index k)
{
    double total = 0.0;
    for (const auto& blk : blocks) {
        const double endo = b.segment(blk.endo_start, k).squaredNorm();
        const double exo = b.segment(blk.exo_start, blk.exo_len).squaredNorm();
        total += std::sqrt(endo + exo) + std::sqrt(exo);
    }
    return total;
}

void apply_prox(const Vector& u, double t, const std::vector<LagBlock>& blocks, Index k, Vector& out)
{
    out.resize(u.size());
    Vector v;
    for (const auto& blk : blocks) {
        v.resize(k + blk.exo_len);
        v.head(k) = u.segment(blk.endo_start, k);
        v.tail(blk.exo_len) = u.segment(blk.exo_start, blk.exo_len);
        const Vector w = hierarchical_prox(v, t, k, blk.exo_len);
        out.segment(blk.endo_start, k) = w.head(k);
        out.segment(blk.exo_start, blk.exo_len) = w.tail(blk.exo_len);
    }
}

} // namespace

FitResult fit_endogenous_first(const LaggedDesign& design, double lambda, const SolverOptions& opts)
{
    detail::check_design(design, lambda, opts);
    const VarxSpec& spec = design.spec;
    if (spec.s > spec.p) throw ValidationError("the endo_first structure requires s <= p");
    detail::WorkspaceRef ws(design, opts);
    const Matrix& gram = ws->gram();
    const Matrix& cross = ws->cross();
    Matrix B = detail::initial_coefficients(design, opts);

    std::vector<LagBlock> blocks;
    for (int lag = 1; lag <= spec.p; ++lag) {
        const Index exo_len = lag <= spec.s ? spec.m : 0;
        blocks.push_back({(lag - 1) * Index{spec.k}, spec.endogenous_regressors() + (lag - 1) * Index{spec.m}, exo_len});
    }
    const Index k = spec.k;

    const double lipschitz = ws->gram_max_eigenvalue();
    int iterations = 0;
    bool converged = true;
    if (lipschitz > 0.0) {
        const double step = 1.0 / lipschitz;
        Vector x, x_prev, y, grad, u, candidate, d;
        for (Index i = 0; i < B.rows(); ++i) {
            const Vector c = cross.row(i).transpose();
            const auto objective = [&](const Vector& b) {
                return 0.5 * b.dot(gram * b) - c.dot(b) + lambda * block_penalty(b, blocks, k);
            };
            x = B.row(i).transpose();
            y = x;
            double f = objective(x);
            int momentum = 1;
            bool row_converged = false;
            int it = 0;
            while (it < opts.max_iter) {
                ++it;
                grad.noalias() = gram * y;
                grad -= c;
                u = y - step * grad;
                apply_prox(u, step * lambda, blocks, k, candidate);
                const double fc = objective(candidate);
                if (fc > f && momentum > 1) {
                    y = x;
                    momentum = 1;
                    continue;
                }
                const double change = (candidate - x).cwiseAbs().maxCoeff();
                // (L I - G)(y - candidate) is a subgradient of the objective at
                // the candidate, so its norm certifies stationarity.
                d = y - candidate;
                const double residual = (lipschitz * d - gram * d).norm();
                x_prev = x;
                x = candidate;
                f = std::min(f, fc);
                if (change < opts.tol && residual < opts.tol) {
                    row_converged = true;
                    break;
                }
                ++momentum;
                y = x + ((momentum - 2.0) / (momentum + 1.0)) * (x - x_prev);
            }
            B.row(i) = x.transpose();
            iterations = std::max(iterations, it);
            converged = converged && row_converged;
        }
    } else {
        B.setZero();
    }

    const PenaltyStructure structure{PenaltyKind::EndogenousFirst, std::nullopt};
    const GroupPartition partition = group_partition(spec, structure);
    return detail::finish(design, std::move(B), structure, partition, lambda, iterations, converged);
}

} // namespace varxl
