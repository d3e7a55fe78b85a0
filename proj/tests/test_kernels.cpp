#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "occupancy/kernels.hpp"
#include "occupancy/lstm.hpp"

using namespace occupancy;
using kernels::KernelTable;

namespace {

std::vector<const KernelTable*> simd_tables() {
    std::vector<const KernelTable*> out;
    if (auto* t = kernels::avx2_table()) out.push_back(t);
    if (auto* t = kernels::neon_table()) out.push_back(t);
    return out;
}

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return v;
}

// Reordered sums of n products of N(0,1) values: error bound ~ n * eps * sum|terms|.
void check_close(double simd, double ref, double scale) {
    CHECK(std::abs(simd - ref) <= 1e-13 * (scale + 1.0));
}

/// Restores the active kernel table when a test switches it.
struct IsaGuard {
    kernels::Isa saved = kernels::active().isa;
    ~IsaGuard() { kernels::select(saved); }
};

}  // namespace

TEST_CASE("a kernel variant is active") {
    const auto& t = kernels::active();
    MESSAGE("active kernels: " << kernels::isa_name(t.isa));
    CHECK(t.dot != nullptr);
    CHECK(kernels::select(kernels::Isa::Scalar));
    CHECK(kernels::active().isa == kernels::Isa::Scalar);
    kernels::select(t.isa);
}

TEST_CASE("SIMD kernels match the scalar reference") {
    const auto tables = simd_tables();
    if (tables.empty()) {
        MESSAGE("no SIMD variant available on this CPU; scalar only");
        return;
    }
    const KernelTable& ref = kernels::scalar_table();
    std::mt19937_64 rng(2024);

    for (const KernelTable* simd : tables) {
        CAPTURE(kernels::isa_name(simd->isa));
        for (std::size_t n = 0; n <= 41; ++n) {
            const auto a = random_vec(rng, n), b = random_vec(rng, n);
            double scale = 0.0;
            for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]);
            check_close(simd->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n), scale);

            auto y1 = random_vec(rng, n);
            auto y2 = y1;
            simd->axpy(0.37, a.data(), y1.data(), n);
            ref.axpy(0.37, a.data(), y2.data(), n);
            for (std::size_t i = 0; i < n; ++i) check_close(y1[i], y2[i], std::abs(y2[i]));
        }

        for (std::size_t rows : {0u, 1u, 3u, 4u, 7u, 16u, 33u}) {
            for (std::size_t cols : {1u, 2u, 5u, 8u, 13u, 76u}) {
                CAPTURE(rows);
                CAPTURE(cols);
                const auto w = random_vec(rng, rows * cols);
                const auto x = random_vec(rng, cols);
                const auto bias = random_vec(rng, rows);
                const auto v = random_vec(rng, rows);

                std::vector<double> y1(rows), y2(rows);
                simd->gemv(w.data(), rows, cols, x.data(), bias.data(), y1.data());
                ref.gemv(w.data(), rows, cols, x.data(), bias.data(), y2.data());
                for (std::size_t r = 0; r < rows; ++r) check_close(y1[r], y2[r], 4.0 * cols);

                simd->gemv(w.data(), rows, cols, x.data(), nullptr, y1.data());
                ref.gemv(w.data(), rows, cols, x.data(), nullptr, y2.data());
                for (std::size_t r = 0; r < rows; ++r) check_close(y1[r], y2[r], 4.0 * cols);

                auto o1 = random_vec(rng, cols);
                auto o2 = o1;
                simd->gemv_t_acc(w.data(), rows, cols, v.data(), o1.data());
                ref.gemv_t_acc(w.data(), rows, cols, v.data(), o2.data());
                for (std::size_t c = 0; c < cols; ++c) check_close(o1[c], o2[c], 4.0 * rows);

                auto m1 = random_vec(rng, rows * cols);
                auto m2 = m1;
                simd->outer_acc(v.data(), rows, x.data(), cols, m1.data());
                ref.outer_acc(v.data(), rows, x.data(), cols, m2.data());
                for (std::size_t k = 0; k < m1.size(); ++k) check_close(m1[k], m2[k], 8.0);
            }
        }
    }
}

TEST_CASE("SIMD Adam step is bitwise identical to the scalar reference") {
    const KernelTable& ref = kernels::scalar_table();
    std::mt19937_64 rng(99);
    for (const KernelTable* simd : simd_tables()) {
        CAPTURE(kernels::isa_name(simd->isa));
        for (std::size_t n : {0u, 1u, 3u, 4u, 9u, 64u, 1001u}) {
            auto theta1 = random_vec(rng, n);
            auto m1 = random_vec(rng, n);
            auto v1 = random_vec(rng, n);
            for (auto& x : v1) x = x * x;
            auto theta2 = theta1, m2 = m1, v2 = v1;
            const auto g = random_vec(rng, n);
            for (std::uint64_t step = 1; step <= 5; ++step) {
                const kernels::AdamCoefficients c{1e-3, 0.9, 0.999, 1e-8,
                                                  1.0 - std::pow(0.9, double(step)),
                                                  1.0 - std::pow(0.999, double(step))};
                simd->adam(theta1.data(), g.data(), m1.data(), v1.data(), n, c);
                ref.adam(theta2.data(), g.data(), m2.data(), v2.data(), n, c);
            }
            CHECK(std::memcmp(theta1.data(), theta2.data(), n * sizeof(double)) == 0);
            CHECK(std::memcmp(m1.data(), m2.data(), n * sizeof(double)) == 0);
            CHECK(std::memcmp(v1.data(), v2.data(), n * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("LSTM forward and gradients agree across kernel variants") {
    const auto tables = simd_tables();
    if (tables.empty()) return;
    IsaGuard guard;

    LstmParams p = LstmParams::init_uniform(24, 12, 3);
    std::mt19937_64 rng(4);
    FeatureMatrix x(FeatureLayout::standard(), 50);
    for (std::size_t t = 0; t < x.rows(); ++t) {
        for (double& v : x.row(t)) v = std::normal_distribution<double>(0.0, 1.0)(rng);
    }
    std::vector<int> y(x.rows());
    for (auto& v : y) v = static_cast<int>(rng() & 1);

    auto run = [&](kernels::Isa isa) {
        REQUIRE(kernels::select(isa));
        LstmState s = LstmState::zeros(24);
        std::vector<StepCache> caches(x.rows());
        std::vector<double> preds(x.rows());
        for (std::size_t t = 0; t < x.rows(); ++t) {
            lstm_step(p, s, x.row(t), caches[t]);
            preds[t] = predict_head(p, s.h);
        }
        LstmParams g;
        backward_segment(p, caches, y, preds, g);
        return std::pair{preds, g};
    };

    const auto [pref, gref] = run(kernels::Isa::Scalar);
    for (const KernelTable* simd : tables) {
        const auto [ps, gs] = run(simd->isa);
        for (std::size_t t = 0; t < pref.size(); ++t) CHECK(std::abs(ps[t] - pref[t]) < 1e-12);
        for (std::size_t k = 0; k < gref.size(); ++k) {
            CHECK(std::abs(gs.flat()[k] - gref.flat()[k]) < 1e-12);
        }
    }
}
