#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "varxl/types.hpp"

namespace varxl {

// T x n panel of observations; rows are time steps, columns are series.
struct MultivariateSeries {
    Matrix values;
    std::vector<std::string> labels; // empty or n names
    std::vector<std::string> times;  // empty or T stamps

    MultivariateSeries() = default;
    explicit MultivariateSeries(Matrix v, std::vector<std::string> names = {},
                                std::vector<std::string> stamps = {});

    Index length() const { return values.rows(); }
    Index width() const { return values.cols(); }

    // Throws ValidationError unless T >= 1, n >= 1, all entries finite and
    // label/time lists are either empty or sized to match.
    void validate() const;
};

struct StandardizedSeries {
    MultivariateSeries series;
    Vector means;
    Vector sds;

    // Maps a row of standardized values back to the original scale.
    Vector restore(const Vector& standardized) const;
};

// Column-wise z-scores using the sample (n-1) standard deviation.
StandardizedSeries standardize(const MultivariateSeries& series);

// Reads a comma separated file with a header row of series names. A leading
// column whose entries are not all numeric is treated as time labels.
MultivariateSeries read_csv(const std::filesystem::path& path);
MultivariateSeries parse_csv(const std::string& text);

std::string to_csv(const MultivariateSeries& series);

} // namespace varxl
