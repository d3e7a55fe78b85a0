#include <cmath>

#include "kernels_impl.hpp"

namespace occupancy::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
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
    const double one_b1 = 1.0 - c.beta1;
    const double one_b2 = 1.0 - c.beta2;
    for (std::size_t i = 0; i < n; ++i) {
        const double mi = c.beta1 * m[i] + one_b1 * g[i];
        const double vi = c.beta2 * v[i] + one_b2 * (g[i] * g[i]);
        m[i] = mi;
        v[i] = vi;
        const double mhat = mi / c.bias1;
        const double vhat = vi / c.bias2;
        theta[i] -= c.lr * mhat / (std::sqrt(vhat) + c.eps);
    }
}

}  // namespace occupancy::kernels::scalar

namespace occupancy::kernels {

const KernelTable& scalar_table() noexcept {
    static const KernelTable table{Isa::Scalar,       scalar::dot,       scalar::axpy,
                                   scalar::gemv,      scalar::gemv_t_acc, scalar::outer_acc,
                                   scalar::adam};
    return table;
}

}  // namespace occupancy::kernels
