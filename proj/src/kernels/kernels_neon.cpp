// NEON variants for AArch64 (Advanced SIMD is mandatory there, so no
// runtime probe is needed beyond the architecture check).

#include "kernels_impl.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace occupancy::kernels::neon {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x, const double* bias,
          double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double s = dot(w + r * cols, x, cols);
        y[r] = bias ? s + bias[r] : s;
    }
}

void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols, const double* v,
                double* out) {
    for (std::size_t r = 0; r < rows; ++r) axpy(v[r], w + r * cols, out, cols);
}

void outer_acc(const double* u, std::size_t rows, const double* x, std::size_t cols, double* m) {
    for (std::size_t r = 0; r < rows; ++r) axpy(u[r], x, m + r * cols, cols);
}

void adam(double* theta, const double* g, double* m, double* v, std::size_t n,
          const AdamCoefficients& c) {
    const float64x2_t b1 = vdupq_n_f64(c.beta1), b2 = vdupq_n_f64(c.beta2);
    const float64x2_t ob1 = vdupq_n_f64(1.0 - c.beta1), ob2 = vdupq_n_f64(1.0 - c.beta2);
    const float64x2_t bc1 = vdupq_n_f64(c.bias1), bc2 = vdupq_n_f64(c.bias2);
    const float64x2_t lr = vdupq_n_f64(c.lr), eps = vdupq_n_f64(c.eps);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t gi = vld1q_f64(g + i);
        const float64x2_t mi = vaddq_f64(vmulq_f64(b1, vld1q_f64(m + i)), vmulq_f64(ob1, gi));
        const float64x2_t vi =
            vaddq_f64(vmulq_f64(b2, vld1q_f64(v + i)), vmulq_f64(ob2, vmulq_f64(gi, gi)));
        vst1q_f64(m + i, mi);
        vst1q_f64(v + i, vi);
        const float64x2_t step = vdivq_f64(vmulq_f64(lr, vdivq_f64(mi, bc1)),
                                           vaddq_f64(vsqrtq_f64(vdivq_f64(vi, bc2)), eps));
        vst1q_f64(theta + i, vsubq_f64(vld1q_f64(theta + i), step));
    }
    if (i < n) scalar::adam(theta + i, g + i, m + i, v + i, n - i, c);
}

}  // namespace
}  // namespace occupancy::kernels::neon

namespace occupancy::kernels {

const KernelTable* neon_table_compiled() noexcept {
    static const KernelTable table{Isa::Neon,        neon::dot,        neon::axpy,
                                   neon::gemv,       neon::gemv_t_acc, neon::outer_acc,
                                   neon::adam};
    return &table;
}

}  // namespace occupancy::kernels

#endif
