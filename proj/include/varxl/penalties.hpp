#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "varxl/types.hpp"
#include "varxl/varx.hpp"

namespace varxl {

enum class PenaltyKind { Basic, LagGroup, OwnOther, SparseLag, SparseOwnOther, EndogenousFirst };

// basic, lag, own_other, sparse_lag, sparse_own_other, endo_first
std::string_view to_string(PenaltyKind kind);
PenaltyKind parse_penalty_kind(std::string_view name);
const std::vector<PenaltyKind>& all_penalty_kinds();

struct PenaltyStructure {
    PenaltyKind kind = PenaltyKind::Basic;
    // Mixing weight for the sparse kinds; unset means 1/(k+1).
    std::optional<double> alpha;

    bool is_sparse() const { return kind == PenaltyKind::SparseLag || kind == PenaltyKind::SparseOwnOther; }
    double resolved_alpha(int k) const;
};

enum class GroupKind { Single, EndogenousLag, OwnDiagonal, OtherOffDiagonal, ExogenousColumn, NestedOuter, NestedInner };

// A set of entries of B = [phi, beta] penalized together by weight * ||.||_F.
struct CoefficientGroup {
    GroupKind kind = GroupKind::Single;
    std::vector<std::pair<Index, Index>> entries; // (row, column), row-major order
    double weight = 1.0;
    int lag = 0;  // 1-based lag, 0 when not tied to one
    int row = -1; // row of B for row-local groups
};

struct GroupPartition {
    PenaltyKind kind = PenaltyKind::Basic;
    Index rows = 0;
    Index cols = 0;
    std::vector<CoefficientGroup> groups;
};

double default_alpha(int k);

GroupPartition group_partition(const VarxSpec& spec, const PenaltyStructure& structure);

// Group part sum_g w_g ||B_g||, scaled by (1 - alpha) and joined by alpha ||B||_1
// for the sparse kinds. The partition overload takes alpha as given (0 for the
// non-sparse kinds).
double penalty_value(const Matrix& B, const PenaltyStructure& structure, const VarxSpec& spec);
double penalty_value(const Matrix& B, const GroupPartition& partition, double alpha);

// Smallest lambda at which B = 0 solves the penalized problem on a centered
// design. Returns 0 for a zero response.
double lambda_max(const LaggedDesign& design, const PenaltyStructure& structure, const VarxSpec& spec);

struct LambdaGrid {
    std::vector<double> values; // descending
    double depth = 25.0;
};

LambdaGrid lambda_grid(double lambda_max, int n_points = 10, double depth = 25.0);

// Smallest t >= 0 with ||ST(c, alpha t)|| <= (1 - alpha) w t.
double sparse_group_threshold(const Vector& c, double alpha, double weight);

} // namespace varxl
