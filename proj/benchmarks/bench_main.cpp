#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "tract_equity/entity_classifier.hpp"
#include "tract_equity/evaluation.hpp"
#include "tract_equity/ingest.hpp"
#include "tract_equity/lowess.hpp"
#include "tract_equity/race_imputer.hpp"
#include "tract_equity/tract_analytics.hpp"

namespace te = tract_equity;

namespace {

te::GeoId geoid_at(std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "36001%06zu", i + 100);
    return te::GeoId::parse(buf).value();
}

te::RaceDistribution dist_at(std::size_t i) {
    // Deterministic, varied, strictly positive.
    te::RaceDistribution d;
    double sum = 0.0;
    for (std::size_t r = 0; r < te::kRaceCount; ++r) {
        d.probs[r] = 0.05 + static_cast<double>((i * 7 + r * 13) % 23);
        sum += d.probs[r];
    }
    for (double& p : d.probs) p /= sum;
    return d;
}

te::SurnamePriorTable make_priors(std::size_t n_surnames) {
    te::SurnamePriorTable t;
    t.set_national_prior(dist_at(0));
    for (std::size_t i = 0; i < n_surnames; ++i) {
        t.add("SURNAME" + std::to_string(i), dist_at(i + 1));
    }
    return t;
}

te::GeoPriorTable make_geo(std::size_t n_tracts) {
    te::GeoPriorTable t;
    for (std::size_t i = 0; i < n_tracts; ++i) t.add(geoid_at(i), dist_at(i * 3 + 2));
    return t;
}

// ~200 parcels per tract, one in five corporate-like, races rotating.
struct AggregateFixture {
    te::Dataset dataset;
    te::ImputationMap imputations;

    explicit AggregateFixture(std::size_t n_tracts) {
        std::vector<te::ParcelRecord> parcels;
        std::vector<te::TractDemographics> tracts;
        for (std::size_t t = 0; t < n_tracts; ++t) {
            auto g = geoid_at(t);
            tracts.push_back(
                te::TractDemographics{g, 4000, dist_at(t), 65000.0, t % 2 == 0});
            for (std::size_t p = 0; p < 200; ++p) {
                std::string id = std::to_string(t) + "-" + std::to_string(p);
                bool corporate = p % 5 == 0;
                parcels.push_back(te::ParcelRecord{
                    id, g, 100000.0 + static_cast<double>(p) * 997.0,
                    corporate ? "ACME HOLDINGS LLC" : "SMITH JOHN",
                    corporate ? te::OwnerClass::Corporate : te::OwnerClass::Individual});
                if (!corporate) {
                    te::ParcelImputation imp;
                    auto race = static_cast<te::RaceCategory>(p % te::kRaceCount);
                    imp.race = race;
                    imp.distribution = te::RaceDistribution::point_mass(race);
                    imputations.emplace(std::move(id), std::move(imp));
                }
            }
        }
        dataset = te::build_dataset(std::move(parcels), std::move(tracts)).dataset;
    }
};

}  // namespace

static void BM_BisgPosterior(benchmark::State& state) {
    auto priors = make_priors(200);
    auto geo = make_geo(50);
    const char* surnames[] = {"SURNAME3", "SURNAME57", "SURNAME121", "UNKNOWN"};
    std::size_t i = 0;
    for (auto _ : state) {
        auto r = te::bisg_posterior(surnames[i % 4], geoid_at(i % 50), priors, geo);
        benchmark::DoNotOptimize(r);
        ++i;
    }
}
BENCHMARK(BM_BisgPosterior);

static void BM_ClassifyOwner(benchmark::State& state) {
    auto rules = te::EntityRules::defaults();
    const char* names[] = {
        "SMITH, JOHN A",
        "GARCIA MARIA",
        "123 MAIN STREET LLC",
        "CITY OF ALBANY",
        "JOHNSON FAMILY TRUST",
        "O'BRIEN-DAVIS, PATRICIA",
    };
    std::size_t i = 0;
    for (auto _ : state) {
        auto c = te::classify_owner(names[i % 6], rules);
        benchmark::DoNotOptimize(c);
        ++i;
    }
}
BENCHMARK(BM_ClassifyOwner);

static void BM_AggregateDataset(benchmark::State& state) {
    AggregateFixture fx(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto profiles = te::aggregate_dataset(fx.dataset, fx.imputations);
        benchmark::DoNotOptimize(profiles);
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(fx.dataset.parcels.size()));
}
BENCHMARK(BM_AggregateDataset)->Arg(10)->Arg(50);

static void BM_LowessTrend(benchmark::State& state) {
    std::vector<te::LowessPoint> pts;
    auto n = static_cast<std::size_t>(state.range(0));
    for (std::size_t i = 0; i < n; ++i) {
        double x = static_cast<double>(i) / static_cast<double>(n);
        pts.push_back({x, std::sin(6.28 * x) + 0.05 * std::cos(91.0 * x),
                       1.0 + static_cast<double>(i % 7)});
    }
    te::LowessOptions opt;
    for (auto _ : state) {
        auto curve = te::lowess_trend(pts, opt);
        benchmark::DoNotOptimize(curve);
    }
}
BENCHMARK(BM_LowessTrend)->Arg(100)->Arg(500);

static void BM_ClassMetrics(benchmark::State& state) {
    te::ConfusionMatrix cm;
    for (std::size_t t = 0; t < te::kRaceCount; ++t) {
        for (std::size_t p = 0; p < te::kRaceCount; ++p) {
            cm.counts[t][p] = t == p ? 9000 + 137 * t : 100 + 17 * (t + p);
        }
    }
    for (auto _ : state) {
        auto per_class = te::class_metrics(cm);
        auto weighted = te::weighted_metrics(cm);
        benchmark::DoNotOptimize(per_class);
        benchmark::DoNotOptimize(weighted);
    }
}
BENCHMARK(BM_ClassMetrics);

BENCHMARK_MAIN();
