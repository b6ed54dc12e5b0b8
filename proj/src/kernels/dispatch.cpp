#include "varxl/kernels.hpp"

#include <atomic>
#include <cassert>
#include <cstdlib>
#include <cstring>

namespace varxl::kernels {

namespace {

struct Table {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    double (*sum_squares)(const double*, std::size_t);
    void (*soft_threshold)(const double*, double, double*, std::size_t);
};

constexpr Table scalar_table{scalar::dot, scalar::axpy, scalar::sum_squares, scalar::soft_threshold};
#if defined(__x86_64__) || defined(_M_X64)
constexpr Table avx2_table{avx2::dot, avx2::axpy, avx2::sum_squares, avx2::soft_threshold};
#endif
#if defined(__aarch64__)
constexpr Table neon_table{neon::dot, neon::axpy, neon::sum_squares, neon::soft_threshold};
#endif

const Table* table_for(Isa isa)
{
    switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2: return &avx2_table;
#endif
#if defined(__aarch64__)
    case Isa::Neon: return &neon_table;
#endif
    default: return &scalar_table;
    }
}

Isa initial_isa()
{
    // VARXL_FORCE_SCALAR=1 pins the reference kernels, e.g. for bisecting
    // a numerical difference between machines.
    const char* force = std::getenv("VARXL_FORCE_SCALAR");
    if (force != nullptr && std::strcmp(force, "0") != 0) return Isa::Scalar;
    return detect_isa();
}

std::atomic<Isa>& current()
{
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

} // namespace

std::string_view isa_name(Isa isa)
{
    switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
    }
    return "unknown";
}

bool isa_available(Isa isa)
{
    switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
        return true;
#else
        return false;
#endif
    }
    return false;
}

Isa detect_isa()
{
    if (isa_available(Isa::Avx2)) return Isa::Avx2;
    if (isa_available(Isa::Neon)) return Isa::Neon;
    return Isa::Scalar;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

bool set_active_isa(Isa isa)
{
    if (!isa_available(isa)) return false;
    current().store(isa, std::memory_order_relaxed);
    return true;
}

double dot(std::span<const double> x, std::span<const double> y)
{
    assert(x.size() == y.size());
    return table_for(active_isa())->dot(x.data(), y.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    assert(x.size() == y.size());
    table_for(active_isa())->axpy(alpha, x.data(), y.data(), x.size());
}

double sum_squares(std::span<const double> x)
{
    return table_for(active_isa())->sum_squares(x.data(), x.size());
}

void soft_threshold(std::span<const double> x, double threshold, std::span<double> out)
{
    assert(x.size() == out.size());
    table_for(active_isa())->soft_threshold(x.data(), threshold, out.data(), x.size());
}

} // namespace varxl::kernels
