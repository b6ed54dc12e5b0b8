#include "varxl/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>
#include <cmath>

namespace varxl::kernels::neon {

double dot(const double* x, const double* y, std::size_t n)
{
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n)
{
    const float64x2_t a = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), a, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double sum_squares(const double* x, std::size_t n)
{
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float64x2_t a = vld1q_f64(x + i);
        const float64x2_t b = vld1q_f64(x + i + 2);
        acc0 = vfmaq_f64(acc0, a, a);
        acc1 = vfmaq_f64(acc1, b, b);
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

void soft_threshold(const double* x, double threshold, double* out, std::size_t n)
{
    const float64x2_t thr = vdupq_n_f64(threshold);
    const float64x2_t zero = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t v = vld1q_f64(x + i);
        const float64x2_t mag = vmaxq_f64(vsubq_f64(vabsq_f64(v), thr), zero);
        // copy the sign bit of v onto mag, then zero the shrunk lanes
        const uint64x2_t sign_bit = vdupq_n_u64(0x8000000000000000ULL);
        const float64x2_t signed_mag = vbslq_f64(sign_bit, v, mag);
        const uint64x2_t nz = vcgtq_f64(mag, zero);
        vst1q_f64(out + i, vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(signed_mag), nz)));
    }
    for (; i < n; ++i) {
        const double mag = std::abs(x[i]) - threshold;
        out[i] = mag > 0.0 ? std::copysign(mag, x[i]) : 0.0;
    }
}

} // namespace varxl::kernels::neon

#endif
