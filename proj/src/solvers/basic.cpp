#include <algorithm>
#include <cmath>
#include <vector>

#include "internal.hpp"
#include "varxl/kernels.hpp"

namespace varxl {

// Rows of B decouple under the L1 penalty, so each row runs its own
// coordinate descent against its own residual series.
FitResult fit_basic(const LaggedDesign& design, double lambda, const SolverOptions& opts)
{
    detail::check_design(design, lambda, opts);
    detail::WorkspaceRef ws(design, opts);
    const Matrix& gram = ws->gram();
    Matrix B = detail::initial_coefficients(design, opts);
    RowMatrix R = detail::residual(design, B);
    const Index P = design.Z.rows();
    const auto N = static_cast<std::size_t>(design.samples());

    int iterations = 0;
    bool converged = true;
    std::vector<char> active(static_cast<std::size_t>(P));
    for (Index i = 0; i < B.rows(); ++i) {
        std::span<double> r(R.row(i).data(), N);
        const auto pass = [&](bool full) {
            double max_change = 0.0;
            for (Index j = 0; j < P; ++j) {
                if (!full && !active[static_cast<std::size_t>(j)]) continue;
                std::span<const double> z(design.Z.row(j).data(), N);
                const double old = B(i, j);
                const double gjj = gram(j, j);
                double updated = 0.0;
                if (gjj > 0.0) updated = soft_threshold(kernels::dot(r, z) + gjj * old, lambda) / gjj;
                const double delta = updated - old;
                if (delta != 0.0) {
                    kernels::axpy(-delta, z, r);
                    B(i, j) = updated;
                    max_change = std::max(max_change, std::abs(delta));
                }
                active[static_cast<std::size_t>(j)] = updated != 0.0;
            }
            return max_change;
        };

        int it = 0;
        bool row_converged = false;
        while (it < opts.max_iter) {
            ++it;
            if (pass(true) < opts.tol) {
                row_converged = true;
                break;
            }
            if (!opts.active_set) continue;
            while (it < opts.max_iter) {
                ++it;
                if (pass(false) < opts.tol) break;
            }
        }
        iterations = std::max(iterations, it);
        converged = converged && row_converged;
    }

    const PenaltyStructure structure{PenaltyKind::Basic, std::nullopt};
    const GroupPartition partition = group_partition(design.spec, structure);
    return detail::finish(design, std::move(B), structure, partition, lambda, iterations, converged);
}

} // namespace varxl
