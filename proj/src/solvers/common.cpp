#include <algorithm>
#include <cmath>
#include <limits>

#include "internal.hpp"
#include "varxl/kernels.hpp"

namespace varxl {

SolverWorkspace::SolverWorkspace(const LaggedDesign& design) : design_(&design)
{
    gram_ = design.Z * design.Z.transpose();
    cross_ = design.Y * design.Z.transpose();
}

double SolverWorkspace::gram_max_eigenvalue()
{
    if (!gram_max_) {
        const auto pm = power_method_max_eig(gram_, nullptr);
        gram_max_ = pm.value;
        gram_power_vector_ = pm.vector;
    }
    return *gram_max_;
}

int SolverWorkspace::block_for(const std::vector<Index>& cols)
{
    const auto it = block_ids_.find(cols);
    if (it != block_ids_.end()) return it->second;

    Block b;
    b.cols = cols;
    const Index n = static_cast<Index>(cols.size());
    b.gram.resize(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) b.gram(i, j) = gram_(cols[static_cast<std::size_t>(i)], cols[static_cast<std::size_t>(j)]);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(b.gram);
    if (es.info() != Eigen::Success) throw NumericalError("eigendecomposition of a Gram block failed");
    b.eigvals = es.eigenvalues().cwiseMax(0.0);
    b.eigvecs = es.eigenvectors();
    // Power method for the step size, warm-started from the nearest
    // previously seen block of the same size.
    const Vector* warm = nullptr;
    for (auto rit = blocks_.rbegin(); rit != blocks_.rend(); ++rit) {
        if (rit->power_vector.size() == n) {
            warm = &rit->power_vector;
            break;
        }
    }
    const auto pm = power_method_max_eig(b.gram, warm);
    b.max_eigenvalue = pm.value;
    b.power_vector = pm.vector;

    const int id = static_cast<int>(blocks_.size());
    blocks_.push_back(std::move(b));
    block_ids_.emplace(cols, id);
    return id;
}

void SolverOptions::validate() const
{
    if (!(tol > 0.0)) throw ValidationError("solver tolerance must be positive");
    if (max_iter < 1) throw ValidationError("max_iter must be at least 1");
}

MinnesotaTarget MinnesotaTarget::random_walk(const VarxSpec& spec)
{
    MinnesotaTarget t;
    t.C_y = Matrix::Zero(spec.k, spec.endogenous_regressors());
    t.C_y.leftCols(spec.k).setIdentity();
    t.C_x = Matrix::Zero(spec.k, spec.exogenous_regressors());
    return t;
}

Matrix MinnesotaTarget::stacked() const
{
    Matrix C(C_y.rows(), C_y.cols() + C_x.cols());
    C << C_y, C_x;
    return C;
}

double soft_threshold(double x, double threshold)
{
    const double mag = std::abs(x) - threshold;
    return mag > 0.0 ? std::copysign(mag, x) : 0.0;
}

PowerResult power_method_max_eig(const Matrix& S, const Vector* warm, double rel_tol, int max_iter)
{
    const Index n = S.rows();
    if (n != S.cols()) throw ValidationError("power method needs a square matrix");
    PowerResult out;
    if (n == 0) return out;
    Vector x;
    if (warm != nullptr && warm->size() == n && warm->norm() > 0.0) {
        x = warm->normalized();
    } else {
        // Uneven start so no eigenvector is orthogonal to it by symmetry.
        x = Vector::LinSpaced(n, 1.0, 2.0).normalized();
    }
    double value = 0.0;
    for (int it = 1; it <= max_iter; ++it) {
        Vector y = S * x;
        const double norm = y.norm();
        if (norm == 0.0) {
            out.value = 0.0;
            out.vector = x;
            out.iterations = it;
            return out;
        }
        const double rayleigh = x.dot(y);
        x = y / norm;
        out.iterations = it;
        if (it > 1 && std::abs(rayleigh - value) <= rel_tol * std::abs(rayleigh)) {
            value = rayleigh;
            break;
        }
        value = rayleigh;
    }
    out.value = x.dot(S * x);
    out.vector = x;
    return out;
}

Vector trust_region_group_update(const Vector& eigvals, const Matrix& eigvecs, const Vector& r, double lambda)
{
    if (eigvecs.rows() != r.size() || eigvecs.cols() != eigvals.size()) {
        throw ValidationError("trust_region_group_update: dimension mismatch");
    }
    Vector a = eigvecs.transpose() * r;
    const double vmax = eigvals.size() > 0 ? eigvals.maxCoeff() : 0.0;
    const double cutoff = 1e-12 * std::max(vmax, 1e-300);
    for (Index i = 0; i < a.size(); ++i) {
        if (!(eigvals(i) > cutoff)) a(i) = 0.0;
    }
    Vector scaled(a.size());
    if (lambda <= 0.0) {
        for (Index i = 0; i < a.size(); ++i) scaled(i) = eigvals(i) > cutoff ? a(i) / eigvals(i) : 0.0;
        return eigvecs * scaled;
    }
    if (a.norm() <= lambda) return Vector::Zero(r.size());
    const double delta = detail::trust_region_radius(eigvals, a, lambda);
    for (Index i = 0; i < a.size(); ++i) scaled(i) = delta * a(i) / (eigvals(i) * delta + lambda);
    return eigvecs * scaled;
}

double sparsity_ratio(const Matrix& B)
{
    if (B.size() == 0) return 1.0;
    return static_cast<double>((B.array() == 0.0).count()) / static_cast<double>(B.size());
}

double sparsity_ratio(const CoefficientSet& coeffs)
{
    const Index total = coeffs.phi.size() + coeffs.beta.size();
    if (total == 0) return 1.0;
    const Index zeros = (coeffs.phi.array() == 0.0).count() + (coeffs.beta.array() == 0.0).count();
    return static_cast<double>(zeros) / static_cast<double>(total);
}

double penalized_objective(const LaggedDesign& design, const Matrix& B, const PenaltyStructure& structure,
                           double lambda)
{
    return least_squares_objective(design, B) + lambda * penalty_value(B, structure, design.spec);
}

namespace {

Vector gather(const Matrix& M, const CoefficientGroup& g)
{
    Vector v(static_cast<Index>(g.entries.size()));
    for (std::size_t e = 0; e < g.entries.size(); ++e) v(static_cast<Index>(e)) = M(g.entries[e].first, g.entries[e].second);
    return v;
}

double group_violation(const Vector& c, const Vector& b, double bound)
{
    const double bn = b.norm();
    if (bn == 0.0) return std::max(0.0, c.norm() - bound);
    return (c - bound * b / bn).norm();
}

double sparse_group_violation(const Vector& c, const Vector& b, double l1, double group)
{
    const double bn = b.norm();
    if (bn == 0.0) {
        double ss = 0.0;
        for (Index i = 0; i < c.size(); ++i) {
            const double v = std::abs(c(i)) - l1;
            if (v > 0.0) ss += v * v;
        }
        return std::max(0.0, std::sqrt(ss) - group);
    }
    double ss = 0.0;
    for (Index i = 0; i < c.size(); ++i) {
        double v;
        if (b(i) != 0.0) {
            v = c(i) - group * b(i) / bn - l1 * (b(i) > 0.0 ? 1.0 : -1.0);
        } else {
            v = std::max(0.0, std::abs(c(i)) - l1);
        }
        ss += v * v;
    }
    return std::sqrt(ss);
}

double nested_violation(const Vector& c_endo, const Vector& c_exo, const Vector& b_endo, const Vector& b_exo,
                        double lambda)
{
    const double full = std::sqrt(b_endo.squaredNorm() + b_exo.squaredNorm());
    const double exo = b_exo.norm();
    if (full == 0.0) {
        const double excess = std::max(0.0, c_exo.norm() - lambda);
        return std::max(0.0, std::sqrt(c_endo.squaredNorm() + excess * excess) - lambda);
    }
    const Vector r_endo = c_endo - lambda * b_endo / full;
    if (exo == 0.0) {
        const double excess = std::max(0.0, c_exo.norm() - lambda);
        return std::sqrt(r_endo.squaredNorm() + excess * excess);
    }
    const Vector r_exo = c_exo - lambda * b_exo / full - lambda * b_exo / exo;
    return std::sqrt(r_endo.squaredNorm() + r_exo.squaredNorm());
}

} // namespace

double kkt_violation(const LaggedDesign& design, const Matrix& B, const PenaltyStructure& structure, double lambda)
{
    const VarxSpec& spec = design.spec;
    if (B.rows() != design.Y.rows() || B.cols() != design.Z.rows()) {
        throw ValidationError("kkt_violation: coefficient matrix has the wrong shape");
    }
    RowMatrix R = design.Y;
    R.noalias() -= B * design.Z;
    const Matrix C = R * design.Z.transpose();
    double worst = 0.0;

    switch (structure.kind) {
    case PenaltyKind::Basic:
        for (Index i = 0; i < B.rows(); ++i) {
            for (Index j = 0; j < B.cols(); ++j) {
                const double v = B(i, j) == 0.0 ? std::max(0.0, std::abs(C(i, j)) - lambda)
                                                : std::abs(C(i, j) - lambda * (B(i, j) > 0.0 ? 1.0 : -1.0));
                worst = std::max(worst, v);
            }
        }
        return worst;
    case PenaltyKind::LagGroup:
    case PenaltyKind::OwnOther: {
        const GroupPartition part = group_partition(spec, structure);
        for (const auto& g : part.groups) {
            worst = std::max(worst, group_violation(gather(C, g), gather(B, g), lambda * g.weight));
        }
        return worst;
    }
    case PenaltyKind::SparseLag:
    case PenaltyKind::SparseOwnOther: {
        const double alpha = structure.resolved_alpha(spec.k);
        const GroupPartition part = group_partition(spec, structure);
        for (const auto& g : part.groups) {
            worst = std::max(worst, sparse_group_violation(gather(C, g), gather(B, g), alpha * lambda,
                                                           (1.0 - alpha) * lambda * g.weight));
        }
        return worst;
    }
    case PenaltyKind::EndogenousFirst: {
        if (spec.s > spec.p) throw ValidationError("the endo_first structure requires s <= p");
        const Index base = spec.endogenous_regressors();
        for (Index i = 0; i < spec.k; ++i) {
            for (int lag = 1; lag <= spec.p; ++lag) {
                const Index e0 = (lag - 1) * spec.k;
                const Index x0 = base + (lag - 1) * spec.m;
                const Index mx = lag <= spec.s ? spec.m : 0;
                worst = std::max(worst, nested_violation(C.row(i).segment(e0, spec.k).transpose(),
                                                         C.row(i).segment(x0, mx).transpose(),
                                                         B.row(i).segment(e0, spec.k).transpose(),
                                                         B.row(i).segment(x0, mx).transpose(), lambda));
            }
        }
        return worst;
    }
    }
    return worst;
}

void apply_target(LaggedDesign& design, const Matrix& C)
{
    if (C.rows() != design.Y.rows() || C.cols() != design.Z.rows()) {
        throw ValidationError("shrinkage target does not match the model dimensions");
    }
    RowMatrix offset = C * design.Z;
    design.Y -= offset;
    if (design.centered) design.y_bar -= C * design.z_bar;
    design.offset = std::move(offset);
}

namespace detail {

std::vector<PreparedGroup> prepare_groups(const GroupPartition& partition, SolverWorkspace& ws)
{
    std::vector<PreparedGroup> out;
    out.reserve(partition.groups.size());
    for (const auto& g : partition.groups) {
        PreparedGroup pg;
        pg.weight = g.weight;
        pg.size = static_cast<Index>(g.entries.size());
        for (const auto& [r, c] : g.entries) {
            if (pg.slices.empty() || pg.slices.back().row != r) {
                Slice s;
                s.row = r;
                pg.slices.push_back(std::move(s));
            }
            pg.slices.back().cols.push_back(c);
        }
        for (auto& s : pg.slices) s.block = ws.block_for(s.cols);
        out.push_back(std::move(pg));
    }
    return out;
}

WorkspaceRef::WorkspaceRef(const LaggedDesign& design, const SolverOptions& opts)
{
    if (opts.workspace != nullptr && &opts.workspace->design() == &design) {
        ptr_ = opts.workspace;
    } else {
        owned_ = std::make_unique<SolverWorkspace>(design);
        ptr_ = owned_.get();
    }
}

void check_design(const LaggedDesign& design, double lambda, const SolverOptions& opts)
{
    opts.validate();
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda must be finite and non-negative");
    if (design.Y.rows() != design.spec.k || design.Z.rows() != design.spec.regressors()) {
        throw ValidationError("design does not match its model dimensions");
    }
    if (!design.Z.allFinite() || !design.Y.allFinite()) throw ValidationError("design contains non-finite values");
}

Matrix initial_coefficients(const LaggedDesign& design, const SolverOptions& opts)
{
    const Index k = design.Y.rows();
    const Index P = design.Z.rows();
    if (opts.warm_start) {
        if (opts.warm_start->rows() != k || opts.warm_start->cols() != P) {
            throw ValidationError("warm start has the wrong shape");
        }
        return *opts.warm_start;
    }
    return Matrix::Zero(k, P);
}

RowMatrix residual(const LaggedDesign& design, const Matrix& B)
{
    RowMatrix R = design.Y;
    R.noalias() -= B * design.Z;
    return R;
}

double trust_region_radius(const Vector& v, const Vector& a, double lambda)
{
    const auto eval = [&](double d, double& deriv) {
        double s = 0.0;
        double ds = 0.0;
        for (Index i = 0; i < a.size(); ++i) {
            if (a(i) == 0.0) continue;
            const double den = v(i) * d + lambda;
            const double t = a(i) * a(i) / (den * den);
            s += t;
            ds -= 2.0 * t * v(i) / den;
        }
        const double f = std::sqrt(s);
        deriv = ds / (2.0 * f);
        return f;
    };

    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double d = a.norm() / lambda;
    bool done = false;
    for (int it = 0; it < 100; ++it) {
        double df = 0.0;
        const double f = eval(d, df);
        if (std::abs(f - 1.0) <= 1e-14) {
            done = true;
            break;
        }
        if (f > 1.0) lo = d;
        else hi = d;
        // Newton on 1 - 1/f, which is close to linear in d.
        double next = df < 0.0 ? d - (f - 1.0) * f / df : std::numeric_limits<double>::quiet_NaN();
        if (!std::isfinite(next) || next <= lo || next >= hi) {
            next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * std::max(d, 1e-300);
        }
        if (std::abs(next - d) <= 1e-15 * d) {
            d = next;
            done = true;
            break;
        }
        d = next;
    }
    if (done) return d;

    double df = 0.0;
    if (!std::isfinite(hi)) {
        hi = std::max(d, 1e-300);
        while (eval(hi, df) > 1.0) {
            hi *= 2.0;
            if (!std::isfinite(hi)) throw NumericalError("group update radius diverged");
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (eval(mid, df) > 1.0) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

FitResult finish(const LaggedDesign& design, Matrix B, const PenaltyStructure& structure,
                 const GroupPartition& partition, double lambda, int iterations, bool converged)
{
    FitResult out;
    out.lambda = lambda;
    out.iterations = iterations;
    out.converged = converged;
    const Vector nu = design.centered ? recover_intercept(B, design.y_bar, design.z_bar)
                                      : Vector::Zero(design.Y.rows());
    out.coeffs = CoefficientSet::from_stacked(nu, B, design.spec);
    out.objective = least_squares_objective(design, B);
    if (lambda > 0.0) {
        const double alpha = structure.is_sparse() ? structure.resolved_alpha(design.spec.k) : 0.0;
        out.objective += lambda * penalty_value(B, partition, alpha);
    }
    out.sparsity_ratio = sparsity_ratio(B);
    for (std::size_t g = 0; g < partition.groups.size(); ++g) {
        const auto& grp = partition.groups[g];
        if (grp.kind == GroupKind::NestedInner) continue;
        bool nonzero = false;
        for (const auto& [r, c] : grp.entries) nonzero = nonzero || B(r, c) != 0.0;
        if (nonzero) out.active_groups.push_back(static_cast<int>(g));
    }
    out.B = std::move(B);
    return out;
}

} // namespace detail

} // namespace varxl
