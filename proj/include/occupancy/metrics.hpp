#pragma once

// Binary-classification metrics over (probability, label) pairs.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "occupancy/timeseries.hpp"

namespace occupancy {

/// Non-owning view of aligned predictions and labels.
class EvalPairs {
public:
    /// Throws ShapeError on unequal or zero length, DomainError on labels
    /// outside {0,1} or predictions outside [0,1].
    EvalPairs(std::span<const double> predictions, std::span<const int> labels);

    std::span<const double> predictions() const noexcept { return preds_; }
    std::span<const int> labels() const noexcept { return labels_; }
    std::size_t size() const noexcept { return preds_.size(); }

private:
    std::span<const double> preds_;
    std::span<const int> labels_;
};

/// Mean clamped BCE.
double mean_bce(const EvalPairs& pairs);

/// P(random positive scores above random negative), ties counted 1/2, via
/// average ranks. nullopt when either class is absent.
std::optional<double> auroc(const EvalPairs& pairs);

/// Step-sum of precision over recall increments along the descending-score
/// ranking. Samples with equal scores form one block evaluated together.
/// nullopt when there are no positives.
std::optional<double> average_precision(const EvalPairs& pairs);

struct MetricsReport {
    std::string room_id;
    int window_minutes = 0;
    double bce = 0.0;
    std::optional<double> auroc;
    std::optional<double> average_precision;
    std::size_t samples = 0;
    double prevalence = 0.0;
};

/// Scores predictions made at steps begin, begin+1, ..., T-2 of `d` against
/// the W-window targets at those steps. preds.size() must equal T-1-begin.
MetricsReport evaluate(std::span<const double> preds, const Dataset& d, WindowSpec w,
                       std::size_t begin = 0);

/// `room,window_minutes,bce,auroc,avg_precision`, "n/a" for undefined cells.
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsReport& r);

}  // namespace occupancy
