#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls the library routine it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <span>
#include <vector>

#include "occupancy/lstm.hpp"

namespace oracle {

/// O(N^2) pair counting, ties = 1/2. Returns -1 when a class is missing.
inline double auroc_pairs(std::span<const double> p, std::span<const int> y) {
    double concordant = 0.0;
    std::size_t pos = 0, neg = 0;
    for (int v : y) (v ? pos : neg)++;
    if (pos == 0 || neg == 0) return -1.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
        if (y[a] != 1) continue;
        for (std::size_t b = 0; b < p.size(); ++b) {
            if (y[b] != 0) continue;
            if (p[a] > p[b]) concordant += 1.0;
            else if (p[a] == p[b]) concordant += 0.5;
        }
    }
    return concordant / (static_cast<double>(pos) * static_cast<double>(neg));
}

/// Step-sum over distinct thresholds, each prefix {score >= tau} counted from
/// scratch. Returns -1 when there are no positives.
inline double average_precision_thresholds(std::span<const double> p, std::span<const int> y) {
    std::size_t pos = 0;
    for (int v : y) pos += static_cast<std::size_t>(v);
    if (pos == 0) return -1.0;
    std::set<double, std::greater<>> taus(p.begin(), p.end());
    double ap = 0.0, prev_recall = 0.0;
    for (double tau : taus) {
        std::size_t tp = 0, k = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] >= tau) {
                ++k;
                tp += static_cast<std::size_t>(y[i]);
            }
        }
        const double recall = static_cast<double>(tp) / static_cast<double>(pos);
        ap += (recall - prev_recall) * static_cast<double>(tp) / static_cast<double>(k);
        prev_recall = recall;
    }
    return ap;
}

/// |a-b| / max(1e-8, |a|+|b|)
inline double relative_error(double a, double b) {
    return std::abs(a - b) / std::max(1e-8, std::abs(a) + std::abs(b));
}

/// Central differences of the segment loss w.r.t. every parameter entry.
inline std::vector<double> finite_difference_gradient(const occupancy::LstmParams& params,
                                                      const occupancy::LstmState& initial,
                                                      const occupancy::FeatureMatrix& inputs,
                                                      std::span<const int> targets,
                                                      double delta = 1e-5) {
    occupancy::LstmParams probe = params;
    std::vector<double> grad(params.size());
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double saved = probe.flat()[k];
        probe.flat()[k] = saved + delta;
        const double up = occupancy::segment_loss(probe, initial, inputs, targets);
        probe.flat()[k] = saved - delta;
        const double down = occupancy::segment_loss(probe, initial, inputs, targets);
        probe.flat()[k] = saved;
        grad[k] = (up - down) / (2.0 * delta);
    }
    return grad;
}

struct GradCheckCase {
    occupancy::LstmParams params;
    occupancy::LstmState initial;
    occupancy::FeatureMatrix inputs;
    std::vector<int> targets;
};

/// Random parameters (scaled up from the default init so gates are not all
/// near 0.5), random carried-in state, inputs and labels.
inline GradCheckCase random_gradcheck_case(std::size_t hidden, std::size_t inputs,
                                           std::size_t length, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unit(-0.9, 0.9);
    GradCheckCase c;
    c.params = occupancy::LstmParams(hidden, inputs);
    for (double& w : c.params.flat()) w = 0.5 * normal(rng);
    c.initial = occupancy::LstmState::zeros(hidden);
    for (double& v : c.initial.h) v = unit(rng);
    for (double& v : c.initial.c) v = 2.0 * unit(rng);
    occupancy::FeatureLayout layout;
    for (std::size_t j = 0; j < inputs; ++j) {
        layout.names.push_back("x" + std::to_string(j));
        layout.kinds.push_back(occupancy::FeatureKind::Continuous);
    }
    c.inputs = occupancy::FeatureMatrix(layout, length);
    for (std::size_t t = 0; t < length; ++t) {
        for (double& v : c.inputs.row(t)) v = normal(rng);
    }
    std::bernoulli_distribution coin(0.5);
    for (std::size_t t = 0; t < length; ++t) c.targets.push_back(coin(rng) ? 1 : 0);
    return c;
}

/// Forward pass recording caches, then the library's analytic gradient.
inline occupancy::LstmParams analytic_gradient(const GradCheckCase& c) {
    occupancy::LstmState state = c.initial;
    std::vector<occupancy::StepCache> caches(c.inputs.rows());
    std::vector<double> preds(c.inputs.rows());
    for (std::size_t t = 0; t < c.inputs.rows(); ++t) {
        occupancy::lstm_step(c.params, state, c.inputs.row(t), caches[t]);
        preds[t] = occupancy::predict_head(c.params, state.h);
    }
    occupancy::LstmParams grads;
    occupancy::backward_segment(c.params, caches, c.targets, preds, grads);
    return grads;
}

/// Max relative error between analytic and finite-difference gradients.
inline double gradcheck_max_error(const GradCheckCase& c) {
    const occupancy::LstmParams analytic = analytic_gradient(c);
    const std::vector<double> numeric =
        finite_difference_gradient(c.params, c.initial, c.inputs, c.targets);
    double worst = 0.0;
    for (std::size_t k = 0; k < numeric.size(); ++k) {
        worst = std::max(worst, relative_error(analytic.flat()[k], numeric[k]));
    }
    return worst;
}

}  // namespace oracle
