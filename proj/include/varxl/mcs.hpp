#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "varxl/types.hpp"

namespace varxl {

struct LossMatrix {
    Matrix losses; // models x periods
    std::vector<std::string> model_names;

    void validate() const;
};

// d[i][j](t) = loss_i(t) - loss_j(t)
std::vector<std::vector<Vector>> loss_differentials(const LossMatrix& losses);

struct McsStep {
    std::vector<std::string> eliminated;
    double statistic = 0.0;
    double p_value = 0.0; // running maximum, as reported for the eliminated models
};

struct McsResult {
    std::vector<std::string> surviving;
    std::vector<McsStep> trace;
    double final_p_value = 1.0;
    int block_length = 1;
};

struct McsOptions {
    double alpha = 0.15;
    int n_boot = 5000;
    int block_length = 0; // 0 -> floor(n^(1/3))
    std::uint64_t seed = 1;
};

// Model confidence set with the range statistic max |t_ij| and a circular
// block bootstrap. The worst model (largest mean loss differential against the
// rest) is dropped until equal predictive ability is no longer rejected; exact
// ties for worst are dropped together.
McsResult model_confidence_set(const LossMatrix& losses, const McsOptions& opts = {});

// Bootstrap resample indices, one row per replicate.
std::vector<std::vector<int>> circular_block_indices(int n_periods, int block_length, int n_boot, std::uint64_t seed);

} // namespace varxl
