#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace varxl {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Design and response matrices keep each regressor's time path contiguous.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input: dimensions, ranges, file contents.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Something went wrong numerically (singular system, degenerate data).
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace varxl
