#pragma once
// Dense inner-loop kernels used by the coordinate-descent solvers.
//
// Every kernel has a portable scalar reference implementation. On x86-64 an
// AVX2+FMA variant and on AArch64 a NEON variant are compiled alongside it and
// picked at runtime from the CPU's capabilities. The variants only reorder
// floating point accumulation, so results agree with the scalar path to
// rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace varxl::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

// Best ISA supported by this CPU and build.
Isa detect_isa();

// ISA currently used by the dispatching entry points below.
Isa active_isa();

// Force a particular ISA (tests and benchmarking). Returns false and leaves
// the selection untouched when the ISA is unavailable on this machine.
bool set_active_isa(Isa isa);

// True when the given ISA can run here.
bool isa_available(Isa isa);

double dot(std::span<const double> x, std::span<const double> y);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

double sum_squares(std::span<const double> x);

// out[i] = sgn(x[i]) * max(|x[i]| - threshold, 0)
void soft_threshold(std::span<const double> x, double threshold, std::span<double> out);

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_squares(const double* x, std::size_t n);
void soft_threshold(const double* x, double threshold, double* out, std::size_t n);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_squares(const double* x, std::size_t n);
void soft_threshold(const double* x, double threshold, double* out, std::size_t n);
} // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_squares(const double* x, std::size_t n);
void soft_threshold(const double* x, double threshold, double* out, std::size_t n);
} // namespace neon
#endif

} // namespace varxl::kernels
