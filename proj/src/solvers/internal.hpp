#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "varxl/solvers.hpp"

namespace varxl::detail {

// One row's share of a coefficient group: the columns it owns in that row and
// the workspace block holding the matching Gram sub-block.
struct Slice {
    Index row = 0;
    int block = 0;
    std::vector<Index> cols;
};

struct PreparedGroup {
    std::vector<Slice> slices;
    double weight = 1.0;
    Index size = 0;
};

std::vector<PreparedGroup> prepare_groups(const GroupPartition& partition, SolverWorkspace& ws);

// Either the caller's workspace or one owned here.
class WorkspaceRef {
public:
    WorkspaceRef(const LaggedDesign& design, const SolverOptions& opts);
    SolverWorkspace& operator*() { return *ptr_; }
    SolverWorkspace* operator->() { return ptr_; }

private:
    std::unique_ptr<SolverWorkspace> owned_;
    SolverWorkspace* ptr_;
};

void check_design(const LaggedDesign& design, double lambda, const SolverOptions& opts);

Matrix initial_coefficients(const LaggedDesign& design, const SolverOptions& opts);

// Y - B Z, one contiguous row per response.
RowMatrix residual(const LaggedDesign& design, const Matrix& B);

// Radius of the group trust-region problem for spectral data (v, a = W'r).
double trust_region_radius(const Vector& eigvals, const Vector& proj, double lambda);

// Given the group's partial correlation c = (R Z')_g + G_g b_g and its current
// coefficients, writes the new coefficients into next.
using GroupUpdate = std::function<void(std::size_t group, const Vector& c, const Vector& current, Vector& next)>;

struct BcdOutcome {
    int iterations = 0;
    bool converged = false;
};

// Cycles over groups, alternating full sweeps with sweeps over the nonzero
// groups, until a full sweep moves no coefficient by more than opts.tol.
BcdOutcome block_coordinate_descent(const LaggedDesign& design, SolverWorkspace& ws,
                                    const std::vector<PreparedGroup>& groups, Matrix& B, RowMatrix& R,
                                    const SolverOptions& opts, const GroupUpdate& update);

FitResult finish(const LaggedDesign& design, Matrix B, const PenaltyStructure& structure,
                 const GroupPartition& partition, double lambda, int iterations, bool converged);

} // namespace varxl::detail
