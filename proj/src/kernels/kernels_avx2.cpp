// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma
// and is only entered after a runtime CPU check.

#include "kernels_impl.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

namespace occupancy::kernels::avx2 {
namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x, const double* bias,
          double* y) {
    std::size_t r = 0;
    // Four rows at a time so each x chunk is loaded once per block.
    for (; r + 4 <= rows; r += 4) {
        const double* w0 = w + r * cols;
        const double* w1 = w0 + cols;
        const double* w2 = w1 + cols;
        const double* w3 = w2 + cols;
        __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
        __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            const __m256d xv = _mm256_loadu_pd(x + c);
            a0 = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + c), xv, a0);
            a1 = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + c), xv, a1);
            a2 = _mm256_fmadd_pd(_mm256_loadu_pd(w2 + c), xv, a2);
            a3 = _mm256_fmadd_pd(_mm256_loadu_pd(w3 + c), xv, a3);
        }
        double s0 = hsum(a0), s1 = hsum(a1), s2 = hsum(a2), s3 = hsum(a3);
        for (; c < cols; ++c) {
            s0 += w0[c] * x[c];
            s1 += w1[c] * x[c];
            s2 += w2[c] * x[c];
            s3 += w3[c] * x[c];
        }
        if (bias) {
            s0 += bias[r];
            s1 += bias[r + 1];
            s2 += bias[r + 2];
            s3 += bias[r + 3];
        }
        y[r] = s0;
        y[r + 1] = s1;
        y[r + 2] = s2;
        y[r + 3] = s3;
    }
    for (; r < rows; ++r) {
        const double s = dot(w + r * cols, x, cols);
        y[r] = bias ? s + bias[r] : s;
    }
}

void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols, const double* v,
                double* out) {
    std::size_t r = 0;
    for (; r + 4 <= rows; r += 4) {
        const double* w0 = w + r * cols;
        const double* w1 = w0 + cols;
        const double* w2 = w1 + cols;
        const double* w3 = w2 + cols;
        const __m256d v0 = _mm256_set1_pd(v[r]), v1 = _mm256_set1_pd(v[r + 1]);
        const __m256d v2 = _mm256_set1_pd(v[r + 2]), v3 = _mm256_set1_pd(v[r + 3]);
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d o = _mm256_loadu_pd(out + c);
            o = _mm256_fmadd_pd(_mm256_loadu_pd(w0 + c), v0, o);
            o = _mm256_fmadd_pd(_mm256_loadu_pd(w1 + c), v1, o);
            o = _mm256_fmadd_pd(_mm256_loadu_pd(w2 + c), v2, o);
            o = _mm256_fmadd_pd(_mm256_loadu_pd(w3 + c), v3, o);
            _mm256_storeu_pd(out + c, o);
        }
        for (; c < cols; ++c) {
            out[c] += w0[c] * v[r] + w1[c] * v[r + 1] + w2[c] * v[r + 2] + w3[c] * v[r + 3];
        }
    }
    for (; r < rows; ++r) axpy(v[r], w + r * cols, out, cols);
}

void outer_acc(const double* u, std::size_t rows, const double* x, std::size_t cols, double* m) {
    for (std::size_t r = 0; r < rows; ++r) axpy(u[r], x, m + r * cols, cols);
}

// Elementwise with the same operation order as the scalar reference, no
// fused multiply-adds: results are bitwise identical to it.
void adam(double* theta, const double* g, double* m, double* v, std::size_t n,
          const AdamCoefficients& c) {
    const __m256d b1 = _mm256_set1_pd(c.beta1), b2 = _mm256_set1_pd(c.beta2);
    const __m256d ob1 = _mm256_set1_pd(1.0 - c.beta1), ob2 = _mm256_set1_pd(1.0 - c.beta2);
    const __m256d bc1 = _mm256_set1_pd(c.bias1), bc2 = _mm256_set1_pd(c.bias2);
    const __m256d lr = _mm256_set1_pd(c.lr), eps = _mm256_set1_pd(c.eps);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d gi = _mm256_loadu_pd(g + i);
        const __m256d mi =
            _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(ob1, gi));
        const __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                         _mm256_mul_pd(ob2, _mm256_mul_pd(gi, gi)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        const __m256d mhat = _mm256_div_pd(mi, bc1);
        const __m256d vhat = _mm256_div_pd(vi, bc2);
        const __m256d step =
            _mm256_div_pd(_mm256_mul_pd(lr, mhat), _mm256_add_pd(_mm256_sqrt_pd(vhat), eps));
        _mm256_storeu_pd(theta + i, _mm256_sub_pd(_mm256_loadu_pd(theta + i), step));
    }
    if (i < n) scalar::adam(theta + i, g + i, m + i, v + i, n - i, c);
}

}  // namespace
}  // namespace occupancy::kernels::avx2

namespace occupancy::kernels {

const KernelTable* avx2_table_compiled() noexcept {
    static const KernelTable table{Isa::Avx2,        avx2::dot,        avx2::axpy,
                                   avx2::gemv,       avx2::gemv_t_acc, avx2::outer_acc,
                                   avx2::adam};
    return &table;
}

}  // namespace occupancy::kernels

#endif
