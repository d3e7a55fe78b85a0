#pragma once

#include "occupancy/kernels.hpp"

namespace occupancy::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* w, std::size_t rows, std::size_t cols, const double* x, const double* bias,
          double* y);
void gemv_t_acc(const double* w, std::size_t rows, std::size_t cols, const double* v, double* out);
void outer_acc(const double* u, std::size_t rows, const double* x, std::size_t cols, double* m);
void adam(double* theta, const double* g, double* m, double* v, std::size_t n,
          const AdamCoefficients& c);
}  // namespace scalar

// Defined only in builds where the variant's translation unit is compiled.
const KernelTable* avx2_table_compiled() noexcept;
const KernelTable* neon_table_compiled() noexcept;

}  // namespace occupancy::kernels
