#pragma once
// Penalized least-squares solvers for 0.5 ||Y - B Z||_F^2 + lambda * P(B) on a
// centered lagged design. B is k x (kp + ms); the intercept is recovered
// afterwards from the design means.

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "varxl/penalties.hpp"
#include "varxl/types.hpp"
#include "varxl/varx.hpp"

namespace varxl {

// Design-dependent quantities shared by every fit on the same design: the
// Gram matrix Z Z', the cross products Y Z', and eigendecompositions of the
// Gram sub-blocks that group updates need. Build one per design and pass it
// through SolverOptions when fitting a path of lambdas.
class SolverWorkspace {
public:
    explicit SolverWorkspace(const LaggedDesign& design);

    const LaggedDesign& design() const { return *design_; }
    const Matrix& gram() const { return gram_; }
    const Matrix& cross() const { return cross_; }

    // Largest eigenvalue of the full Gram matrix (power method, cached).
    double gram_max_eigenvalue();

    struct Block {
        std::vector<Index> cols;
        Matrix gram;   // Gram restricted to cols
        Vector eigvals;
        Matrix eigvecs;
        double max_eigenvalue = 0.0;
        Vector power_vector; // warm start for the power method
    };
    // Index of the block for this column set, created on first use.
    int block_for(const std::vector<Index>& cols);
    Block& block(int id) { return blocks_[static_cast<std::size_t>(id)]; }

private:
    const LaggedDesign* design_;
    Matrix gram_;
    Matrix cross_;
    std::optional<double> gram_max_;
    Vector gram_power_vector_;
    std::vector<Block> blocks_;
    std::map<std::vector<Index>, int> block_ids_;
};

struct SolverOptions {
    double tol = 1e-4; // on the largest absolute coefficient change per pass
    int max_iter = 1000;
    std::optional<Matrix> warm_start; // k x (kp + ms)
    bool active_set = true;
    SolverWorkspace* workspace = nullptr; // must belong to the design being fit

    void validate() const;
};

// Shrinkage target [C_y, C_x]: penalize B - C instead of B.
struct MinnesotaTarget {
    Matrix C_y; // k x kp
    Matrix C_x; // k x ms

    // Phi(1) = I, everything else 0.
    static MinnesotaTarget random_walk(const VarxSpec& spec);
    Matrix stacked() const;
};

struct FitResult {
    CoefficientSet coeffs;
    Matrix B;                 // penalized coefficients (target removed)
    double lambda = 0.0;
    double objective = 0.0;   // 0.5 ||Y - B Z||^2 + lambda P(B) on the fitted design
    int iterations = 0;
    bool converged = false;
    double sparsity_ratio = 0.0;
    std::vector<int> active_groups; // indices into the structure's partition
};

double soft_threshold(double x, double threshold);

// Minimizer of 0.5 b'Gb - r'b + lambda ||b|| given G = W diag(v) W', assuming
// ||r|| > lambda and r orthogonal to the null space of G. Solves
// ||(Delta G + lambda I)^{-1} r|| = 1 for the radius Delta = ||b|| by
// safeguarded Newton, then returns b = Delta (Delta G + lambda I)^{-1} r.
Vector trust_region_group_update(const Vector& eigvals, const Matrix& eigvecs, const Vector& r, double lambda);

struct PowerResult {
    double value = 0.0;
    Vector vector;
    int iterations = 0;
};

// Dominant eigenpair of a symmetric PSD matrix.
PowerResult power_method_max_eig(const Matrix& S, const Vector* warm = nullptr, double rel_tol = 1e-12,
                                 int max_iter = 100000);

FitResult fit_basic(const LaggedDesign& design, double lambda, const SolverOptions& opts = {});
FitResult fit_lag_group(const LaggedDesign& design, double lambda, const GroupPartition& partition,
                        const SolverOptions& opts = {});
FitResult fit_own_other(const LaggedDesign& design, double lambda, const GroupPartition& partition,
                        const SolverOptions& opts = {});
FitResult fit_sparse_group(const LaggedDesign& design, double lambda, double alpha, const GroupPartition& partition,
                           const SolverOptions& opts = {});

// Prox of lambda_step (||v|| + ||v_exo||) for v = [endogenous (k), exogenous (m)].
Vector hierarchical_prox(const Vector& v, double lambda_step, Index k, Index m);

FitResult fit_endogenous_first(const LaggedDesign& design, double lambda, const SolverOptions& opts = {});

// Dispatch on the structure; the design must be centered.
FitResult fit_design(const LaggedDesign& design, const PenaltyStructure& structure, double lambda,
                     const SolverOptions& opts = {});

// Subtracts C Z from Y (before centering) and records it as the design offset.
void apply_target(LaggedDesign& design, const Matrix& C);

// Builds the design for spec.h, optionally shrinks toward a target, solves and
// recovers the intercept. With a target the returned coefficients include it.
FitResult fit(const Matrix& endog, const Matrix& exog, const VarxSpec& spec, const PenaltyStructure& structure,
              double lambda, const MinnesotaTarget* target = nullptr, const SolverOptions& opts = {});

double penalized_objective(const LaggedDesign& design, const Matrix& B, const PenaltyStructure& structure,
                           double lambda);

// Largest violation of the optimality conditions at B: for zero groups the
// excess of the correlation over the zero-solution bound, for nonzero groups
// the distance of the correlation from lambda times the subdifferential.
double kkt_violation(const LaggedDesign& design, const Matrix& B, const PenaltyStructure& structure, double lambda);

double sparsity_ratio(const Matrix& B);
double sparsity_ratio(const CoefficientSet& coeffs);

} // namespace varxl
