#pragma once

// Single-layer LSTM with a sigmoid occupancy head, trained by truncated
// backpropagation through time and Adam. Double precision throughout.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "occupancy/timeseries.hpp"

namespace occupancy {

/// Gate blocks in the stacked gate matrix, top to bottom.
enum class Gate : std::size_t { Forget = 0, Input = 1, Output = 2, Candidate = 3 };

/// All trainable tensors in one contiguous buffer:
///
///   gate weights  4H x (H + n_x), row blocks [forget; input; output; candidate],
///                 each row multiplying the concatenation [h_prev, x]
///   gate biases   4H
///   head weights  H
///   head bias     1
///
/// The same type holds gradients.
class LstmParams {
public:
    LstmParams() = default;
    LstmParams(std::size_t hidden, std::size_t inputs);

    /// Gate and head weights ~ U[-1/sqrt(H), 1/sqrt(H)], biases zero.
    static LstmParams init_uniform(std::size_t hidden, std::size_t inputs, std::uint64_t seed);

    std::size_t hidden() const noexcept { return hidden_; }
    std::size_t inputs() const noexcept { return inputs_; }
    std::size_t concat() const noexcept { return hidden_ + inputs_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<double> flat() noexcept { return data_; }
    std::span<const double> flat() const noexcept { return data_; }

    std::span<double> gate_weights() noexcept { return {data_.data(), 4 * hidden_ * concat()}; }
    std::span<const double> gate_weights() const noexcept {
        return {data_.data(), 4 * hidden_ * concat()};
    }
    std::span<double> gate_weights(Gate g) noexcept {
        return gate_weights().subspan(index(g) * hidden_ * concat(), hidden_ * concat());
    }
    std::span<const double> gate_weights(Gate g) const noexcept {
        return gate_weights().subspan(index(g) * hidden_ * concat(), hidden_ * concat());
    }

    std::span<double> gate_bias() noexcept { return {data_.data() + bias_offset(), 4 * hidden_}; }
    std::span<const double> gate_bias() const noexcept {
        return {data_.data() + bias_offset(), 4 * hidden_};
    }
    std::span<double> gate_bias(Gate g) noexcept {
        return gate_bias().subspan(index(g) * hidden_, hidden_);
    }
    std::span<const double> gate_bias(Gate g) const noexcept {
        return gate_bias().subspan(index(g) * hidden_, hidden_);
    }

    std::span<double> head_weights() noexcept { return {data_.data() + head_offset(), hidden_}; }
    std::span<const double> head_weights() const noexcept {
        return {data_.data() + head_offset(), hidden_};
    }
    double& head_bias() noexcept { return data_.back(); }
    double head_bias() const noexcept { return data_.back(); }

    void set_zero() noexcept;
    bool all_finite() const noexcept;
    bool operator==(const LstmParams&) const = default;

private:
    static constexpr std::size_t index(Gate g) noexcept { return static_cast<std::size_t>(g); }
    std::size_t bias_offset() const noexcept { return 4 * hidden_ * concat(); }
    std::size_t head_offset() const noexcept { return bias_offset() + 4 * hidden_; }

    std::size_t hidden_ = 0;
    std::size_t inputs_ = 0;
    std::vector<double> data_;
};

struct LstmState {
    std::vector<double> h;
    std::vector<double> c;

    static LstmState zeros(std::size_t hidden) {
        return {std::vector<double>(hidden, 0.0), std::vector<double>(hidden, 0.0)};
    }
};

/// Everything one step's backward pass needs.
struct StepCache {
    std::vector<double> input;   // [h_prev, x]
    std::vector<double> c_prev;
    std::vector<double> gates;   // activations: f, i, o (sigmoid), candidate (tanh)
    std::vector<double> c;
    std::vector<double> tanh_c;
    std::vector<double> h;

    std::span<const double> x(std::size_t hidden) const {
        return std::span<const double>(input).subspan(hidden);
    }
    std::span<const double> h_prev(std::size_t hidden) const {
        return std::span<const double>(input).first(hidden);
    }
    std::span<const double> gate(Gate g, std::size_t hidden) const {
        return std::span<const double>(gates).subspan(static_cast<std::size_t>(g) * hidden, hidden);
    }
};

double sigmoid(double z) noexcept;

/// Advances `state` by one input and records the step in `cache` (buffers are
/// resized as needed, so a cache can be reused across calls).
/// Throws ShapeError on size mismatch and NumericError on non-finite input.
void lstm_step(const LstmParams& params, LstmState& state, std::span<const double> x,
               StepCache& cache);
std::pair<LstmState, StepCache> lstm_step(const LstmParams& params, const LstmState& state,
                                          std::span<const double> x);

/// sigmoid(W_fc . h + b_fc)
double predict_head(const LstmParams& params, std::span<const double> h);

inline constexpr double kProbClamp = 1e-7;

/// Binary cross-entropy with the prediction clamped to [1e-7, 1 - 1e-7].
double bce_loss(double yhat, int y) noexcept;

/// Exact gradients of the mean per-step BCE over one segment. Gradient flow
/// stops at the oldest step (the incoming state is treated as a constant).
/// `grads` is resized/zeroed to the shape of `params`.
void backward_segment(const LstmParams& params, std::span<const StepCache> caches,
                      std::span<const int> targets, std::span<const double> preds,
                      LstmParams& grads);

/// Mean per-step BCE of a forward pass over `inputs` (one row per step)
/// starting from `initial`.
double segment_loss(const LstmParams& params, const LstmState& initial,
                    const FeatureMatrix& inputs, std::span<const int> targets);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    static AdamState for_params(const LstmParams& p);
};

void adam_update(LstmParams& params, const LstmParams& grads, AdamState& state, double lr);

struct TrainConfig {
    std::size_t hidden = 256;
    int epochs = 10;
    double learning_rate = 0.001;
    std::size_t tbptt_segment = 100;
    int window = 30;
    std::uint64_t seed = 0;

    /// Throws ConfigError on non-positive values or an unsupported window.
    void validate() const;
};

struct TrainResult {
    LstmParams params;
    std::vector<double> epoch_loss;  // mean per-step BCE of each epoch
};

/// Chronological single-sequence training. `features` row t is the input at
/// step t and `targets[t]` the label predicted from it; both have equal length.
/// Throws NumericError (with step index and value) if the loss goes non-finite.
TrainResult train(const FeatureMatrix& features, std::span<const int> targets,
                  const TrainConfig& cfg);

/// One probability per row, from a zero initial state.
std::vector<double> predict_series(const LstmParams& params, const FeatureMatrix& features);
/// As above, continuing from (and updating) `state`.
std::vector<double> predict_series(const LstmParams& params, const FeatureMatrix& features,
                                   LstmState& state);

}  // namespace occupancy
