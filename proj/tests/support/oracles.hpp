#pragma once
// Reference implementations used only by the tests. They are written from the
// penalty definitions directly and share no code with the library solvers.

#include <cstdint>

#include "varxl/penalties.hpp"
#include "varxl/types.hpp"
#include "varxl/varx.hpp"

namespace oracle {

using varxl::Index;
using varxl::Matrix;
using varxl::Vector;

struct Instance {
    varxl::VarxSpec spec;
    Matrix endog;
    Matrix exog;
    varxl::LaggedDesign design; // centered, horizon spec.h
};

// Data from a stable VAR(1) with independent exogenous AR(1) series.
Instance make_instance(int k, int m, int p, int s, Index T, std::uint64_t seed, int h = 1);

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed);

double penalty(const Matrix& B, varxl::PenaltyKind kind, const varxl::VarxSpec& spec, double alpha);

// Prox of step * penalty at V.
Matrix prox(const Matrix& V, varxl::PenaltyKind kind, const varxl::VarxSpec& spec, double alpha, double step);

// Two-dimensional reduction of the nested-group prox: the minimizer scales the
// endogenous and exogenous parts separately, found by nested golden sections.
Vector nested_prox(const Vector& v, Index k, double step);

double objective(const varxl::LaggedDesign& d, const Matrix& B, varxl::PenaltyKind kind, double alpha, double lambda);

// Accelerated proximal gradient with adaptive restart on the full matrix B,
// run to a fixed point.
Matrix proximal_gradient(const varxl::LaggedDesign& d, varxl::PenaltyKind kind, double alpha, double lambda,
                         int max_iter = 200000, double tol = 1e-13);

// Unpenalized least squares by column-pivoted QR.
Matrix least_squares(const varxl::LaggedDesign& d);

// Spectral radius of the companion matrix of phi = [Phi(1) ... Phi(p)] from a
// complex eigendecomposition.
double companion_radius(const Matrix& phi);

} // namespace oracle
