#include "occupancy/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "occupancy/error.hpp"
#include "occupancy/lstm.hpp"
#include "occupancy/textio.hpp"

namespace occupancy {

EvalPairs::EvalPairs(std::span<const double> predictions, std::span<const int> labels)
    : preds_(predictions), labels_(labels) {
    if (preds_.size() != labels_.size()) {
        throw ShapeError("EvalPairs: " + std::to_string(preds_.size()) + " predictions vs " +
                         std::to_string(labels_.size()) + " labels");
    }
    if (preds_.empty()) throw ShapeError("EvalPairs: no samples");
    for (std::size_t i = 0; i < preds_.size(); ++i) {
        if (!(preds_[i] >= 0.0 && preds_[i] <= 1.0)) {
            throw DomainError("prediction " + std::to_string(i) + " outside [0,1]");
        }
        if (labels_[i] != 0 && labels_[i] != 1) {
            throw DomainError("label " + std::to_string(i) + " not binary");
        }
    }
}

double mean_bce(const EvalPairs& pairs) {
    double sum = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        sum += bce_loss(pairs.predictions()[i], pairs.labels()[i]);
    }
    return sum / static_cast<double>(pairs.size());
}

namespace {

std::vector<std::size_t> order_by_score_desc(std::span<const double> preds) {
    std::vector<std::size_t> idx(preds.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return preds[a] > preds[b]; });
    return idx;
}

}  // namespace

std::optional<double> auroc(const EvalPairs& pairs) {
    const auto preds = pairs.predictions();
    const auto labels = pairs.labels();
    const std::size_t n = pairs.size();
    const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    const std::size_t neg = n - pos;
    if (pos == 0 || neg == 0) return std::nullopt;

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return preds[a] < preds[b]; });

    // Sum of 1-based average ranks of the positives (Mann-Whitney U).
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j + 1 < n && preds[idx[j + 1]] == preds[idx[i]]) ++j;
        const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) {
            if (labels[idx[k]] == 1) rank_sum += avg_rank;
        }
        i = j + 1;
    }
    const double p = static_cast<double>(pos);
    const double u = rank_sum - p * (p + 1.0) / 2.0;
    return u / (p * static_cast<double>(neg));
}

std::optional<double> average_precision(const EvalPairs& pairs) {
    const auto preds = pairs.predictions();
    const auto labels = pairs.labels();
    const auto pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    if (pos == 0) return std::nullopt;

    const auto idx = order_by_score_desc(preds);
    const std::size_t n = idx.size();
    std::size_t tp = 0, seen = 0;
    double ap = 0.0, prev_recall = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && preds[idx[j]] == preds[idx[i]]) {
            tp += static_cast<std::size_t>(labels[idx[j]]);
            ++j;
        }
        seen = j;
        const double recall = static_cast<double>(tp) / static_cast<double>(pos);
        const double precision = static_cast<double>(tp) / static_cast<double>(seen);
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j;
    }
    return ap;
}

MetricsReport evaluate(std::span<const double> preds, const Dataset& d, WindowSpec w,
                       std::size_t begin) {
    if (d.size() < 2 || begin + 1 >= d.size()) {
        throw ShapeError("evaluate: no scorable steps in dataset of length " +
                         std::to_string(d.size()));
    }
    const std::size_t expected = d.size() - 1 - begin;
    if (preds.size() != expected) {
        throw ShapeError("evaluate: expected " + std::to_string(expected) + " predictions, got " +
                         std::to_string(preds.size()));
    }
    const std::vector<int> all_targets = window_targets(d, w);
    const std::span<const int> targets = std::span<const int>(all_targets).subspan(begin);
    const EvalPairs pairs(preds, targets);

    MetricsReport r;
    r.room_id = d.room_id();
    r.window_minutes = w.minutes;
    r.bce = mean_bce(pairs);
    r.auroc = auroc(pairs);
    r.average_precision = average_precision(pairs);
    r.samples = pairs.size();
    r.prevalence = static_cast<double>(std::count(targets.begin(), targets.end(), 1)) /
                   static_cast<double>(targets.size());
    return r;
}

std::string metrics_csv_header() { return "room,window_minutes,bce,auroc,avg_precision"; }

std::string metrics_csv_row(const MetricsReport& r) {
    auto cell = [](const std::optional<double>& v) {
        return v ? format_fixed(*v, 6) : std::string("n/a");
    };
    return r.room_id + ',' + std::to_string(r.window_minutes) + ',' + format_fixed(r.bce, 6) + ',' +
           cell(r.auroc) + ',' + cell(r.average_precision);
}

}  // namespace occupancy
