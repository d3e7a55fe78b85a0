#pragma once

// Dense double-precision kernels behind the LSTM and the optimizer.
//
// Every kernel has a scalar reference implementation; AVX2+FMA (x86-64) and
// NEON (AArch64) variants are selected at runtime when the CPU supports them.
// The SIMD variants reorder floating-point sums, so results agree with the
// scalar reference to rounding, not bitwise (the Adam kernel is the exception:
// it is elementwise and bitwise identical across variants).

#include <cstddef>
#include <span>
#include <string_view>

namespace occupancy::kernels {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa) noexcept;

struct AdamCoefficients {
    double lr;
    double beta1;
    double beta2;
    double eps;
    double bias1;  // 1 - beta1^t
    double bias2;  // 1 - beta2^t
};

struct KernelTable {
    Isa isa;
    /// sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    /// y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    /// y = W x + bias, W row-major rows x cols. `bias` may be null.
    void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x,
                 const double* bias, double* y);
    /// out += W^T v, W row-major rows x cols, v has `rows` entries.
    void (*gemv_t_acc)(const double* w, std::size_t rows, std::size_t cols, const double* v,
                       double* out);
    /// M += u x^T, M row-major rows x cols.
    void (*outer_acc)(const double* u, std::size_t rows, const double* x, std::size_t cols,
                      double* m);
    /// Bias-corrected Adam step over n parameters.
    void (*adam)(double* theta, const double* grad, double* m, double* v, std::size_t n,
                 const AdamCoefficients& c);
};

const KernelTable& scalar_table() noexcept;
/// Null when the variant is not compiled in or the CPU lacks the extension.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

/// The table used by the library. Defaults to the widest supported variant;
/// the OCCUPANCY_ISA environment variable (scalar|avx2|neon) overrides it.
const KernelTable& active() noexcept;

/// Switches the active table. Returns false (and changes nothing) when the
/// requested variant is unavailable.
bool select(Isa isa) noexcept;

// Span conveniences over the active table.

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace occupancy::kernels
