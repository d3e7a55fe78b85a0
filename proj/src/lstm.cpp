#include "occupancy/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "occupancy/error.hpp"
#include "occupancy/kernels.hpp"

namespace occupancy {

LstmParams::LstmParams(std::size_t hidden, std::size_t inputs)
    : hidden_(hidden), inputs_(inputs),
      data_(4 * hidden * (hidden + inputs) + 4 * hidden + hidden + 1, 0.0) {
    if (hidden == 0 || inputs == 0) throw ConfigError("LSTM dimensions must be positive");
}

LstmParams LstmParams::init_uniform(std::size_t hidden, std::size_t inputs, std::uint64_t seed) {
    LstmParams p(hidden, inputs);
    std::mt19937_64 rng(seed);
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : p.gate_weights()) w = dist(rng);
    for (double& w : p.head_weights()) w = dist(rng);
    return p;
}

void LstmParams::set_zero() noexcept { std::fill(data_.begin(), data_.end(), 0.0); }

bool LstmParams::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double sigmoid(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

void lstm_step(const LstmParams& params, LstmState& state, std::span<const double> x,
               StepCache& cache) {
    const std::size_t H = params.hidden();
    const std::size_t n = params.concat();
    if (x.size() != params.inputs() || state.h.size() != H || state.c.size() != H) {
        throw ShapeError("lstm_step: expected input " + std::to_string(params.inputs()) +
                         " and state " + std::to_string(H) + ", got input " +
                         std::to_string(x.size()) + " and state " + std::to_string(state.h.size()));
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw NumericError("lstm_step: non-finite input");
    }

    cache.input.resize(n);
    cache.c_prev.resize(H);
    cache.gates.resize(4 * H);
    cache.c.resize(H);
    cache.tanh_c.resize(H);
    cache.h.resize(H);

    std::copy(state.h.begin(), state.h.end(), cache.input.begin());
    std::copy(x.begin(), x.end(), cache.input.begin() + static_cast<std::ptrdiff_t>(H));
    std::copy(state.c.begin(), state.c.end(), cache.c_prev.begin());

    double* z = cache.gates.data();
    kernels::active().gemv(params.gate_weights().data(), 4 * H, n, cache.input.data(),
                           params.gate_bias().data(), z);

    for (std::size_t j = 0; j < 3 * H; ++j) z[j] = sigmoid(z[j]);
    for (std::size_t j = 3 * H; j < 4 * H; ++j) z[j] = std::tanh(z[j]);

    const double* f = z;
    const double* i = z + H;
    const double* o = z + 2 * H;
    const double* g = z + 3 * H;
    for (std::size_t j = 0; j < H; ++j) {
        const double c = f[j] * cache.c_prev[j] + i[j] * g[j];
        const double tc = std::tanh(c);
        cache.c[j] = c;
        cache.tanh_c[j] = tc;
        cache.h[j] = o[j] * tc;
    }
    std::copy(cache.h.begin(), cache.h.end(), state.h.begin());
    std::copy(cache.c.begin(), cache.c.end(), state.c.begin());
}

std::pair<LstmState, StepCache> lstm_step(const LstmParams& params, const LstmState& state,
                                          std::span<const double> x) {
    LstmState next = state;
    StepCache cache;
    lstm_step(params, next, x, cache);
    return {std::move(next), std::move(cache)};
}

double predict_head(const LstmParams& params, std::span<const double> h) {
    if (h.size() != params.hidden()) throw ShapeError("predict_head: hidden size mismatch");
    return sigmoid(kernels::dot(params.head_weights(), h) + params.head_bias());
}

double bce_loss(double yhat, int y) noexcept {
    const double p = std::clamp(yhat, kProbClamp, 1.0 - kProbClamp);
    return y == 1 ? -std::log(p) : -std::log1p(-p);
}

void backward_segment(const LstmParams& params, std::span<const StepCache> caches,
                      std::span<const int> targets, std::span<const double> preds,
                      LstmParams& grads) {
    if (caches.size() != targets.size() || caches.size() != preds.size()) {
        throw ShapeError("backward_segment: " + std::to_string(caches.size()) + " caches, " +
                         std::to_string(targets.size()) + " targets, " +
                         std::to_string(preds.size()) + " predictions");
    }
    const std::size_t H = params.hidden();
    const std::size_t n = params.concat();
    if (grads.hidden() != H || grads.inputs() != params.inputs()) {
        grads = LstmParams(H, params.inputs());
    } else {
        grads.set_zero();
    }
    const std::size_t L = caches.size();
    if (L == 0) return;

    const auto& k = kernels::active();
    std::vector<double> dh_next(H, 0.0), dc_next(H, 0.0), dh(H), dz(4 * H), dinput(n);
    const auto head_w = params.head_weights();
    auto g_head_w = grads.head_weights();
    auto g_bias = grads.gate_bias();
    const double inv_len = 1.0 / static_cast<double>(L);

    for (std::size_t s = L; s-- > 0;) {
        const StepCache& cache = caches[s];
        // d(mean BCE)/d(logit) = (yhat - y) / L
        const double dlogit = (preds[s] - static_cast<double>(targets[s])) * inv_len;
        k.axpy(dlogit, cache.h.data(), g_head_w.data(), H);
        grads.head_bias() += dlogit;

        for (std::size_t j = 0; j < H; ++j) dh[j] = head_w[j] * dlogit + dh_next[j];

        const double* f = cache.gates.data();
        const double* i = f + H;
        const double* o = f + 2 * H;
        const double* g = f + 3 * H;
        for (std::size_t j = 0; j < H; ++j) {
            const double tc = cache.tanh_c[j];
            const double dc = dh[j] * o[j] * (1.0 - tc * tc) + dc_next[j];
            dz[j] = dc * cache.c_prev[j] * f[j] * (1.0 - f[j]);
            dz[H + j] = dc * g[j] * i[j] * (1.0 - i[j]);
            dz[2 * H + j] = dh[j] * tc * o[j] * (1.0 - o[j]);
            dz[3 * H + j] = dc * i[j] * (1.0 - g[j] * g[j]);
            dc_next[j] = dc * f[j];
        }

        k.outer_acc(dz.data(), 4 * H, cache.input.data(), n, grads.gate_weights().data());
        for (std::size_t j = 0; j < 4 * H; ++j) g_bias[j] += dz[j];

        std::fill(dinput.begin(), dinput.end(), 0.0);
        k.gemv_t_acc(params.gate_weights().data(), 4 * H, n, dz.data(), dinput.data());
        std::copy(dinput.begin(), dinput.begin() + static_cast<std::ptrdiff_t>(H), dh_next.begin());
    }
}

double segment_loss(const LstmParams& params, const LstmState& initial,
                    const FeatureMatrix& inputs, std::span<const int> targets) {
    if (inputs.rows() != targets.size()) throw ShapeError("segment_loss: length mismatch");
    if (inputs.rows() == 0) return 0.0;
    LstmState state = initial;
    StepCache cache;
    double sum = 0.0;
    for (std::size_t t = 0; t < inputs.rows(); ++t) {
        lstm_step(params, state, inputs.row(t), cache);
        sum += bce_loss(predict_head(params, state.h), targets[t]);
    }
    return sum / static_cast<double>(inputs.rows());
}

AdamState AdamState::for_params(const LstmParams& p) {
    AdamState s;
    s.m.assign(p.size(), 0.0);
    s.v.assign(p.size(), 0.0);
    return s;
}

void adam_update(LstmParams& params, const LstmParams& grads, AdamState& state, double lr) {
    if (grads.size() != params.size()) throw ShapeError("adam_update: gradient shape mismatch");
    if (state.m.size() != params.size() || state.v.size() != params.size()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
        state.step = 0;
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const kernels::AdamCoefficients c{lr,
                                      state.beta1,
                                      state.beta2,
                                      state.eps,
                                      1.0 - std::pow(state.beta1, t),
                                      1.0 - std::pow(state.beta2, t)};
    kernels::active().adam(params.flat().data(), grads.flat().data(), state.m.data(),
                           state.v.data(), params.size(), c);
}

void TrainConfig::validate() const {
    if (hidden == 0) throw ConfigError("hidden size must be positive");
    if (epochs <= 0) throw ConfigError("epochs must be positive");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning rate must be positive");
    }
    if (tbptt_segment == 0) throw ConfigError("tbptt segment must be positive");
    if (window < 1 || !WindowSpec(window).supported()) {
        throw ConfigError("window " + std::to_string(window) + " is not in the supported set");
    }
}

TrainResult train(const FeatureMatrix& features, std::span<const int> targets,
                  const TrainConfig& cfg) {
    cfg.validate();
    if (features.rows() != targets.size()) {
        throw ShapeError("train: " + std::to_string(features.rows()) + " feature rows vs " +
                         std::to_string(targets.size()) + " targets");
    }
    if (features.rows() == 0) throw ShapeError("train: empty training series");

    TrainResult result;
    result.params = LstmParams::init_uniform(cfg.hidden, features.cols(), cfg.seed);
    LstmParams& params = result.params;
    LstmParams grads(cfg.hidden, features.cols());
    AdamState adam = AdamState::for_params(params);

    const std::size_t N = features.rows();
    const std::size_t seg = cfg.tbptt_segment;
    std::vector<StepCache> tape(std::min(seg, N));
    std::vector<double> preds(tape.size());

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        LstmState state = LstmState::zeros(cfg.hidden);
        double loss_sum = 0.0;
        std::size_t k = 0;
        for (std::size_t t = 0; t < N; ++t) {
            lstm_step(params, state, features.row(t), tape[k]);
            const double p = predict_head(params, state.h);
            preds[k] = p;
            const double loss = bce_loss(p, targets[t]);
            if (!std::isfinite(loss) || !std::isfinite(p)) {
                std::ostringstream os;
                os << "non-finite loss at epoch " << epoch + 1 << ", step " << t << ": loss=" << loss
                   << " prediction=" << p;
                throw NumericError(os.str());
            }
            loss_sum += loss;
            ++k;
            if (k == seg || t + 1 == N) {
                const std::size_t first = t + 1 - k;
                backward_segment(params, std::span<const StepCache>(tape).first(k),
                                 targets.subspan(first, k), std::span<const double>(preds).first(k),
                                 grads);
                adam_update(params, grads, adam, cfg.learning_rate);
                if (!params.all_finite()) {
                    throw NumericError("non-finite parameters after update at epoch " +
                                       std::to_string(epoch + 1) + ", step " + std::to_string(t));
                }
                k = 0;
            }
        }
        result.epoch_loss.push_back(loss_sum / static_cast<double>(N));
    }
    return result;
}

std::vector<double> predict_series(const LstmParams& params, const FeatureMatrix& features,
                                   LstmState& state) {
    if (features.cols() != params.inputs()) {
        throw ShapeError("predict_series: model expects " + std::to_string(params.inputs()) +
                         " features, got " + std::to_string(features.cols()));
    }
    std::vector<double> out(features.rows());
    StepCache cache;
    for (std::size_t t = 0; t < features.rows(); ++t) {
        lstm_step(params, state, features.row(t), cache);
        out[t] = predict_head(params, state.h);
    }
    return out;
}

std::vector<double> predict_series(const LstmParams& params, const FeatureMatrix& features) {
    LstmState state = LstmState::zeros(params.hidden());
    return predict_series(params, features, state);
}

}  // namespace occupancy
