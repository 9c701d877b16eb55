#include <algorithm>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "tract_equity/errors.hpp"
#include "tract_equity/evaluation.hpp"

namespace te = tract_equity;
using te::RaceCategory;

namespace {

// truth/predicted pair shorthand.
using Pair = std::pair<RaceCategory, RaceCategory>;

te::ConfusionMatrix matrix_of(const std::vector<Pair>& pairs) {
    return te::build_confusion(pairs);
}

}  // namespace

TEST_CASE("confusion matrix counts, sums and trace") {
    std::vector<Pair> pairs = {
        {RaceCategory::White, RaceCategory::White},
        {RaceCategory::White, RaceCategory::Black},
        {RaceCategory::Black, RaceCategory::Black},
        {RaceCategory::Black, RaceCategory::Black},
        {RaceCategory::Hispanic, RaceCategory::White},
    };
    auto cm = matrix_of(pairs);
    CHECK(cm.total() == 5);
    CHECK(cm.trace() == 3);
    CHECK(cm.at(RaceCategory::White, RaceCategory::Black) == 1);
    CHECK(cm.row_sum(RaceCategory::Black) == 2);
    CHECK(cm.col_sum(RaceCategory::White) == 2);
    CHECK(cm.col_sum(RaceCategory::Asian) == 0);
    CHECK(te::accuracy(cm) == doctest::Approx(0.6));

    std::vector<Pair> none;
    CHECK_THROWS_AS((void)te::build_confusion(none), te::EmptyInputError);
    te::ConfusionMatrix zero;
    CHECK_THROWS_AS((void)te::accuracy(zero), te::EmptyInputError);
    CHECK_THROWS_AS((void)te::class_metrics(zero), te::EmptyInputError);
}

TEST_CASE("pair order never changes the matrix") {
    std::vector<Pair> pairs;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 200; ++i) {
        pairs.push_back({static_cast<RaceCategory>(rng() % 5),
                         static_cast<RaceCategory>(rng() % 5)});
    }
    auto cm = matrix_of(pairs);
    std::shuffle(pairs.begin(), pairs.end(), rng);
    CHECK(matrix_of(pairs) == cm);
}

TEST_CASE("shard matrices reduce with +=") {
    std::vector<Pair> pairs;
    std::mt19937_64 rng(6);
    for (int i = 0; i < 300; ++i) {
        pairs.push_back({static_cast<RaceCategory>(rng() % 5),
                         static_cast<RaceCategory>(rng() % 5)});
    }
    auto whole = matrix_of(pairs);
    auto first = matrix_of({pairs.begin(), pairs.begin() + 120});
    auto second = matrix_of({pairs.begin() + 120, pairs.end()});
    first += second;
    CHECK(first == whole);
}

TEST_CASE("per-class metrics against hand-computed values") {
    // White: tp=8, fn=2 (->Black), fp=1 (Black->White). Black: tp=4, fn=1, fp=2.
    std::vector<Pair> pairs;
    for (int i = 0; i < 8; ++i) pairs.push_back({RaceCategory::White, RaceCategory::White});
    for (int i = 0; i < 2; ++i) pairs.push_back({RaceCategory::White, RaceCategory::Black});
    for (int i = 0; i < 4; ++i) pairs.push_back({RaceCategory::Black, RaceCategory::Black});
    pairs.push_back({RaceCategory::Black, RaceCategory::White});
    auto cm = matrix_of(pairs);
    auto m = te::class_metrics(cm);

    const auto& white = m[0];
    CHECK(white.support == 10);
    CHECK(white.precision == doctest::Approx(8.0 / 9.0));
    CHECK(white.recall == doctest::Approx(0.8));
    CHECK(white.fnr == doctest::Approx(0.2));
    // FPR: 1 false White among 5 non-White records.
    CHECK(white.fpr == doctest::Approx(0.2));
    CHECK(white.f1 == doctest::Approx(2.0 * (8.0 / 9.0) * 0.8 / (8.0 / 9.0 + 0.8)));

    const auto& black = m[1];
    CHECK(black.support == 5);
    CHECK(black.precision == doctest::Approx(4.0 / 6.0));
    CHECK(black.recall == doctest::Approx(0.8));
    CHECK(black.fpr == doctest::Approx(0.2));

    // Classes that never appear: all-zero metrics, no NaN.
    const auto& asian = m[3];
    CHECK(asian.support == 0);
    CHECK(asian.precision == 0.0);
    CHECK(asian.recall == 0.0);
    CHECK(asian.f1 == 0.0);
    CHECK(asian.fpr == 0.0);
    CHECK(asian.fnr == 1.0);  // always 1 - recall, even at zero support
}

TEST_CASE("precision is zero when a class is never predicted") {
    std::vector<Pair> pairs = {
        {RaceCategory::Other, RaceCategory::White},
        {RaceCategory::Other, RaceCategory::Black},
        {RaceCategory::White, RaceCategory::White},
    };
    auto m = te::class_metrics(matrix_of(pairs));
    CHECK(m[4].support == 2);
    CHECK(m[4].precision == 0.0);  // col_sum(Other) == 0
    CHECK(m[4].recall == 0.0);
    CHECK(m[4].fnr == 1.0);
}

TEST_CASE("fnr always mirrors recall") {
    std::mt19937_64 rng(7);
    std::vector<Pair> pairs;
    for (int i = 0; i < 500; ++i) {
        pairs.push_back({static_cast<RaceCategory>(rng() % 5),
                         static_cast<RaceCategory>(rng() % 5)});
    }
    for (const auto& m : te::class_metrics(matrix_of(pairs))) {
        CHECK(m.fnr == 1.0 - m.recall);
    }
}

TEST_CASE("transposing the matrix swaps precision and recall") {
    std::mt19937_64 rng(8);
    std::vector<Pair> pairs;
    for (int i = 0; i < 400; ++i) {
        pairs.push_back({static_cast<RaceCategory>(rng() % 5),
                         static_cast<RaceCategory>(rng() % 5)});
    }
    auto cm = matrix_of(pairs);
    auto m = te::class_metrics(cm);
    auto mt = te::class_metrics(cm.transposed());
    for (std::size_t i = 0; i < te::kRaceCount; ++i) {
        CHECK(m[i].precision == doctest::Approx(mt[i].recall).epsilon(1e-15));
        CHECK(m[i].recall == doctest::Approx(mt[i].precision).epsilon(1e-15));
    }
    CHECK(te::accuracy(cm) == te::accuracy(cm.transposed()));  // same trace and total
}

TEST_CASE("support-weighted recall is the overall accuracy") {
    std::mt19937_64 rng(9);
    for (int round = 0; round < 20; ++round) {
        std::vector<Pair> pairs;
        for (int i = 0; i < 250; ++i) {
            pairs.push_back({static_cast<RaceCategory>(rng() % 5),
                             static_cast<RaceCategory>(rng() % 5)});
        }
        auto cm = matrix_of(pairs);
        auto wm = te::weighted_metrics(cm);
        CHECK(wm.recall == doctest::Approx(te::accuracy(cm)).epsilon(1e-12));
        CHECK(wm.precision >= 0.0);
        CHECK(wm.precision <= 1.0);
        CHECK(wm.f1 >= 0.0);
        CHECK(wm.f1 <= 1.0);
    }
}

TEST_CASE("stress adjustment shifts shares the documented way") {
    std::array<double, 5> shares = {0.6, 0.2, 0.1, 0.05, 0.05};
    te::StressParams params;
    params.white_fpr = 0.10;
    params.fnr_by_race = {0.99, 0.20, 0.25, 0.0, 0.5};  // White slot ignored

    auto stressed = te::stress_adjust(shares, params);
    CHECK(stressed[0] == doctest::Approx(0.6 * 0.9));
    CHECK(stressed[1] == doctest::Approx(0.2 / 0.8));
    CHECK(stressed[2] == doctest::Approx(0.1 / 0.75));
    CHECK(stressed[3] == doctest::Approx(0.05));
    CHECK(stressed[4] == doctest::Approx(0.1));

    // The stressed vector is intentionally not a distribution.
    double sum = 0.0;
    for (double v : stressed) sum += v;
    CHECK(sum > 1.0);
}

TEST_CASE("stress rates outside [0,1) throw") {
    std::array<double, 5> shares = {0.6, 0.2, 0.1, 0.05, 0.05};
    te::StressParams params;
    params.white_fpr = 1.0;
    CHECK_THROWS_AS((void)te::stress_adjust(shares, params), te::FnrOutOfRangeError);
    params.white_fpr = -0.1;
    CHECK_THROWS_AS((void)te::stress_adjust(shares, params), te::FnrOutOfRangeError);
    params.white_fpr = 0.1;
    params.fnr_by_race = {0, 0, 1.0, 0, 0};
    CHECK_THROWS_AS((void)te::stress_adjust(shares, params), te::FnrOutOfRangeError);
    params.fnr_by_race = {0, -0.2, 0, 0, 0};
    CHECK_THROWS_AS((void)te::stress_adjust(shares, params), te::FnrOutOfRangeError);
}

TEST_CASE("stressing is monotone in the rates") {
    std::array<double, 5> shares = {0.5, 0.25, 0.125, 0.0625, 0.0625};
    te::StressParams mild{0.05, {0, 0.1, 0.1, 0.1, 0.1}};
    te::StressParams harsh{0.15, {0, 0.3, 0.3, 0.3, 0.3}};
    auto a = te::stress_adjust(shares, mild);
    auto b = te::stress_adjust(shares, harsh);
    CHECK(b[0] < a[0]);
    for (std::size_t i = 1; i < 5; ++i) CHECK(b[i] > a[i]);
}

TEST_CASE("income deciles split by rank with ties sharing the lower bin") {
    std::vector<te::LabeledRecord> records;
    for (int i = 0; i < 40; ++i) {
        te::LabeledRecord r;
        r.median_income = 1000.0 * (i + 1);
        r.truth = RaceCategory::White;
        // Records below the median predict wrong.
        r.predicted = i < 20 ? RaceCategory::Black : RaceCategory::White;
        records.push_back(r);
    }
    auto deciles = te::accuracy_by_income_decile(records);
    for (int d = 0; d < 10; ++d) {
        CHECK(deciles[d].count == 4);
        CHECK(deciles[d].accuracy == (d < 5 ? 0.0 : 1.0));
    }
}

TEST_CASE("decile assignment matches a brute-force reference") {
    std::mt19937_64 rng(10);
    std::vector<te::LabeledRecord> records;
    for (int i = 0; i < 137; ++i) {
        te::LabeledRecord r;
        r.median_income = static_cast<double>(rng() % 40) * 2500.0;  // many ties
        r.truth = static_cast<RaceCategory>(rng() % 5);
        r.predicted = static_cast<RaceCategory>(rng() % 5);
        records.push_back(r);
    }
    auto deciles = te::accuracy_by_income_decile(records);

    // Reference: stable sort by income, rank deciles, ties inherit.
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return records[a].median_income < records[b].median_income;
    });
    std::array<std::size_t, 10> count{}, correct{};
    std::size_t prev = 0;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        std::size_t d = rank * 10 / order.size();
        if (rank > 0 && records[order[rank]].median_income ==
                            records[order[rank - 1]].median_income) {
            d = prev;
        }
        prev = d;
        ++count[d];
        if (records[order[rank]].truth == records[order[rank]].predicted) ++correct[d];
    }
    std::size_t total = 0;
    for (int d = 0; d < 10; ++d) {
        CHECK(deciles[d].count == count[d]);
        CHECK(deciles[d].correct == correct[d]);
        total += deciles[d].count;
    }
    CHECK(total == records.size());  // every record lands in exactly one decile

    std::vector<te::LabeledRecord> nine(records.begin(), records.begin() + 9);
    CHECK_THROWS_AS((void)te::accuracy_by_income_decile(nine), te::InsufficientDataError);
}

TEST_CASE("all-equal incomes collapse into the first decile") {
    std::vector<te::LabeledRecord> records(20);
    for (auto& r : records) {
        r.median_income = 50000.0;
        r.truth = r.predicted = RaceCategory::White;
    }
    auto deciles = te::accuracy_by_income_decile(records);
    CHECK(deciles[0].count == 20);
    CHECK(deciles[0].accuracy == 1.0);
    for (int d = 1; d < 10; ++d) {
        CHECK(deciles[d].count == 0);
        CHECK(deciles[d].accuracy == 0.0);
    }
}

TEST_CASE("ground truth loads names case-insensitively and keeps optionals optional") {
    std::istringstream in(
        "record_id,true_race,predicted_race,median_income\n"
        "R1,white,White,52000\n"
        "R2,BLACK,,\n"
        "R3,Hispanic,hispanic,0\n");
    auto result = te::load_ground_truth(in);
    CHECK(result.rejects.empty());
    REQUIRE(result.rows.size() == 3);
    CHECK(result.rows[0].truth == RaceCategory::White);
    CHECK(result.rows[0].predicted == RaceCategory::White);
    CHECK(result.rows[0].median_income == 52000.0);
    CHECK(result.rows[1].truth == RaceCategory::Black);
    CHECK_FALSE(result.rows[1].predicted.has_value());
    CHECK_FALSE(result.rows[1].median_income.has_value());
    CHECK(result.rows[2].median_income == 0.0);
}

TEST_CASE("ground truth loader rejects what it cannot read") {
    std::istringstream in(
        "record_id,true_race,predicted_race,median_income\n"
        ",white,,\n"
        "R2,martian,,\n"
        "R3,white,klingon,\n"
        "R4,white,,minus\n"
        "R5,white,,-100\n"
        "R6,white,white,60000\n");
    auto result = te::load_ground_truth(in);
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].record_id == "R6");
    REQUIRE(result.rejects.size() == 5);
    CHECK(result.rejects[0].reason == te::RejectReason::MissingField);
    CHECK(result.rejects[1].reason == te::RejectReason::InvalidRace);
    CHECK(result.rejects[2].reason == te::RejectReason::InvalidRace);
    CHECK(result.rejects[3].reason == te::RejectReason::BadNumber);
    CHECK(result.rejects[4].reason == te::RejectReason::BadNumber);
}

TEST_CASE("predicted_race column is optional") {
    std::istringstream in(
        "record_id,true_race\n"
        "R1,asian\n");
    auto result = te::load_ground_truth(in);
    REQUIRE(result.rows.size() == 1);
    CHECK(result.rows[0].truth == RaceCategory::Asian);
    CHECK_FALSE(result.rows[0].predicted.has_value());
}
