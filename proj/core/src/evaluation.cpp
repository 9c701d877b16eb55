#include "tract_equity/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <numeric>

#include "tract_equity/csv.hpp"
#include "tract_equity/errors.hpp"

namespace tract_equity {

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts) {
        for (std::uint64_t c : row) t += c;
    }
    return t;
}

std::uint64_t ConfusionMatrix::row_sum(RaceCategory truth) const {
    const auto& row = counts[static_cast<std::size_t>(truth)];
    return std::accumulate(row.begin(), row.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::col_sum(RaceCategory predicted) const {
    std::uint64_t t = 0;
    for (const auto& row : counts) t += row[static_cast<std::size_t>(predicted)];
    return t;
}

std::uint64_t ConfusionMatrix::trace() const {
    std::uint64_t t = 0;
    for (std::size_t i = 0; i < kRaceCount; ++i) t += counts[i][i];
    return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
    for (std::size_t i = 0; i < kRaceCount; ++i) {
        for (std::size_t j = 0; j < kRaceCount; ++j) counts[i][j] += other.counts[i][j];
    }
    return *this;
}

ConfusionMatrix ConfusionMatrix::transposed() const {
    ConfusionMatrix out;
    for (std::size_t i = 0; i < kRaceCount; ++i) {
        for (std::size_t j = 0; j < kRaceCount; ++j) out.counts[j][i] = counts[i][j];
    }
    return out;
}

ConfusionMatrix build_confusion(
    std::span<const std::pair<RaceCategory, RaceCategory>> pairs) {
    if (pairs.empty()) throw EmptyInputError("confusion matrix of zero pairs");
    ConfusionMatrix cm;
    for (const auto& [truth, predicted] : pairs) ++cm.at(truth, predicted);
    return cm;
}

double accuracy(const ConfusionMatrix& cm) {
    std::uint64_t total = cm.total();
    if (total == 0) throw EmptyInputError("accuracy of empty confusion matrix");
    return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

std::array<ClassMetrics, kRaceCount> class_metrics(const ConfusionMatrix& cm) {
    std::uint64_t total = cm.total();
    if (total == 0) throw EmptyInputError("metrics of empty confusion matrix");

    std::array<ClassMetrics, kRaceCount> out{};
    for (RaceCategory race : kAllRaces) {
        auto i = static_cast<std::size_t>(race);
        std::uint64_t tp = cm.counts[i][i];
        std::uint64_t support = cm.row_sum(race);
        std::uint64_t predicted = cm.col_sum(race);
        std::uint64_t fp = predicted - tp;
        std::uint64_t fn = support - tp;
        std::uint64_t tn = total - tp - fp - fn;

        ClassMetrics& m = out[i];
        m.support = support;
        m.precision = predicted == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(predicted);
        m.recall = support == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(support);
        m.f1 = (m.precision + m.recall) == 0.0
                   ? 0.0
                   : 2.0 * m.precision * m.recall / (m.precision + m.recall);
        m.fpr = (fp + tn) == 0 ? 0.0 : static_cast<double>(fp) / static_cast<double>(fp + tn);
        m.fnr = 1.0 - m.recall;
    }
    return out;
}

WeightedMetrics weighted_metrics(const ConfusionMatrix& cm) {
    auto metrics = class_metrics(cm);
    double total = static_cast<double>(cm.total());
    WeightedMetrics out;
    for (const ClassMetrics& m : metrics) {
        double w = static_cast<double>(m.support) / total;
        out.precision += w * m.precision;
        out.recall += w * m.recall;
        out.f1 += w * m.f1;
    }
    return out;
}

std::array<double, kRaceCount> stress_adjust(const std::array<double, kRaceCount>& shares,
                                             const StressParams& params) {
    if (params.white_fpr < 0.0 || params.white_fpr >= 1.0) {
        throw FnrOutOfRangeError("white_fpr " + std::to_string(params.white_fpr));
    }
    constexpr auto white = static_cast<std::size_t>(RaceCategory::White);
    std::array<double, kRaceCount> out{};
    out[white] = shares[white] * (1.0 - params.white_fpr);
    for (std::size_t i = 0; i < kRaceCount; ++i) {
        if (i == white) continue;
        double fnr = params.fnr_by_race[i];
        if (fnr < 0.0 || fnr >= 1.0) {
            throw FnrOutOfRangeError(std::string(race_name(static_cast<RaceCategory>(i))) +
                                     " fnr " + std::to_string(fnr));
        }
        out[i] = shares[i] / (1.0 - fnr);
    }
    return out;
}

std::array<DecileAccuracy, 10> accuracy_by_income_decile(
    std::span<const LabeledRecord> records) {
    if (records.size() < 10) {
        throw InsufficientDataError("income deciles need at least 10 records, got " +
                                    std::to_string(records.size()));
    }
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return records[a].median_income < records[b].median_income;
    });

    std::array<DecileAccuracy, 10> out{};
    std::size_t n = records.size();
    std::size_t prev_decile = 0;
    for (std::size_t rank = 0; rank < n; ++rank) {
        std::size_t decile = rank * 10 / n;
        // Equal incomes share the lower decile of the run.
        if (rank > 0 &&
            records[order[rank]].median_income == records[order[rank - 1]].median_income) {
            decile = prev_decile;
        }
        prev_decile = decile;
        const LabeledRecord& rec = records[order[rank]];
        ++out[decile].count;
        if (rec.truth == rec.predicted) ++out[decile].correct;
    }
    for (DecileAccuracy& d : out) {
        d.accuracy = d.count == 0
                         ? 0.0
                         : static_cast<double>(d.correct) / static_cast<double>(d.count);
    }
    return out;
}

namespace {

std::optional<RaceCategory> race_from_cell(std::string_view cell) {
    std::string lowered;
    lowered.reserve(cell.size());
    for (char c : cell) {
        lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return race_from_name(lowered);
}

}  // namespace

GroundTruthResult load_ground_truth(std::istream& in) {
    csv::Reader reader(in);
    const std::size_t id_col = reader.require_column("record_id");
    const std::size_t truth_col = reader.require_column("true_race");
    const std::optional<std::size_t> pred_col = reader.find_column("predicted_race");
    const std::optional<std::size_t> income_col = reader.find_column("median_income");
    const std::size_t width = reader.header().size();

    GroundTruthResult result;
    csv::Row row;
    while (reader.next(row)) {
        auto fail = [&](RejectReason reason, std::string detail) {
            result.rejects.push_back(
                RejectedRow{row.line_number, reason, std::move(detail), row.raw});
        };
        if (row.fields.size() != width) {
            fail(RejectReason::MissingField, "wrong field count");
            continue;
        }
        GroundTruthRow rec;
        rec.record_id = csv::trim(row.fields[id_col]);
        if (rec.record_id.empty()) {
            fail(RejectReason::MissingField, "empty record_id");
            continue;
        }
        auto truth = race_from_cell(csv::trim(row.fields[truth_col]));
        if (!truth) {
            fail(RejectReason::InvalidRace, "true_race: " + row.fields[truth_col]);
            continue;
        }
        rec.truth = *truth;
        if (pred_col) {
            std::string_view cell = csv::trim(row.fields[*pred_col]);
            if (!cell.empty()) {
                auto predicted = race_from_cell(cell);
                if (!predicted) {
                    fail(RejectReason::InvalidRace, "predicted_race: " + row.fields[*pred_col]);
                    continue;
                }
                rec.predicted = *predicted;
            }
        }
        if (income_col) {
            std::string_view cell = csv::trim(row.fields[*income_col]);
            if (!cell.empty()) {
                auto income = csv::parse_double(cell);
                if (!income || !std::isfinite(*income) || *income < 0.0) {
                    fail(RejectReason::BadNumber, "median_income: " + row.fields[*income_col]);
                    continue;
                }
                rec.median_income = *income;
            }
        }
        result.rows.push_back(std::move(rec));
    }
    return result;
}

}  // namespace tract_equity
