#include "varxl/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace varxl::kernels::scalar {

double dot(const double* x, const double* y, std::size_t n)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares(const double* x, std::size_t n)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void soft_threshold(const double* x, double threshold, double* out, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = std::max(std::abs(x[i]) - threshold, 0.0);
        out[i] = std::copysign(mag, x[i]);
        if (mag == 0.0) out[i] = 0.0;
    }
}

} // namespace varxl::kernels::scalar
