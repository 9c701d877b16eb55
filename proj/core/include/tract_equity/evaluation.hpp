#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tract_equity/ingest.hpp"
#include "tract_equity/race.hpp"

namespace tract_equity {

// Rows are true classes, columns are predicted classes.
struct ConfusionMatrix {
    std::array<std::array<std::uint64_t, kRaceCount>, kRaceCount> counts{};

    std::uint64_t& at(RaceCategory truth, RaceCategory predicted) {
        return counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
    }
    std::uint64_t at(RaceCategory truth, RaceCategory predicted) const {
        return counts[static_cast<std::size_t>(truth)][static_cast<std::size_t>(predicted)];
    }

    std::uint64_t total() const;
    std::uint64_t row_sum(RaceCategory truth) const;  // class support
    std::uint64_t col_sum(RaceCategory predicted) const;
    std::uint64_t trace() const;

    // Elementwise sum, so shard matrices can be reduced.
    ConfusionMatrix& operator+=(const ConfusionMatrix& other);
    ConfusionMatrix transposed() const;

    bool operator==(const ConfusionMatrix&) const = default;
};

// Throws EmptyInputError on an empty pair list.
ConfusionMatrix build_confusion(
    std::span<const std::pair<RaceCategory, RaceCategory>> pairs);

// trace/total. Throws EmptyInputError when the matrix is empty.
double accuracy(const ConfusionMatrix& cm);

struct ClassMetrics {
    std::uint64_t support = 0;
    double precision = 0.0;  // TP/(TP+FP), 0 when no positive predictions
    double recall = 0.0;     // TP/(TP+FN), 0 when support is 0
    double f1 = 0.0;
    double fpr = 0.0;  // one-vs-rest FP/(FP+TN)
    double fnr = 0.0;  // always 1 - recall
};

std::array<ClassMetrics, kRaceCount> class_metrics(const ConfusionMatrix& cm);

struct WeightedMetrics {
    double precision = 0.0;
    double recall = 0.0;  // equals accuracy by construction
    double f1 = 0.0;
};

// Support-weighted averages of the per-class metrics.
WeightedMetrics weighted_metrics(const ConfusionMatrix& cm);

// Misclassification-stress parameters: the White false-positive rate pulls
// White ownership down, per-race false-negative rates push minority
// ownership up.
struct StressParams {
    double white_fpr = 0.0;
    std::array<double, kRaceCount> fnr_by_race{};  // White entry is ignored
};

// stressed_white = white * (1 - white_fpr); stressed_r = share_r / (1 -
// fnr_r) for the other categories. Deliberately NOT renormalized; the
// stressed vector need not sum to 1. Throws FnrOutOfRangeError when any
// rate falls outside [0, 1).
std::array<double, kRaceCount> stress_adjust(const std::array<double, kRaceCount>& shares,
                                             const StressParams& params);

struct LabeledRecord {
    RaceCategory truth;
    RaceCategory predicted;
    double median_income = 0.0;
};

struct DecileAccuracy {
    std::size_t count = 0;
    std::size_t correct = 0;
    double accuracy = 0.0;  // 0 when the decile is empty
};

// Rank-based deciles over record-level incomes; records with equal income
// share the lower decile. Throws InsufficientDataError when fewer than 10
// records are given.
std::array<DecileAccuracy, 10> accuracy_by_income_decile(
    std::span<const LabeledRecord> records);

// Validation file: record_id, true_race, [predicted_race], [median_income].
// Race cells hold category names (case-insensitive). An absent
// predicted_race column means predictions will be joined later.
struct GroundTruthRow {
    std::string record_id;
    RaceCategory truth = RaceCategory::White;
    std::optional<RaceCategory> predicted;
    std::optional<double> median_income;
};

struct GroundTruthResult {
    std::vector<GroundTruthRow> rows;
    std::vector<RejectedRow> rejects;
};

GroundTruthResult load_ground_truth(std::istream& in);

}  // namespace tract_equity
