#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tract_equity/evaluation.hpp"
#include "tract_equity/lowess.hpp"
#include "tract_equity/tract_analytics.hpp"

namespace tract_equity {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitParse = 3;
inline constexpr int kExitImputation = 4;
inline constexpr int kExitAnalytics = 5;

struct RunConfig {
    std::filesystem::path parcels_path;
    std::filesystem::path tracts_path;
    // Exactly one of priors_path (built-in Bayes imputer) or
    // predictions_path (external model output) must be set.
    std::filesystem::path priors_path;
    std::filesystem::path predictions_path;
    std::filesystem::path ground_truth_path;  // optional
    std::filesystem::path rules_path;         // optional entity-rule overrides
    std::filesystem::path out_dir;

    std::size_t min_properties = 100;
    GroupingMode majority_mode = GroupingMode::Majority;
    double extreme_white_pop_max = 0.5;
    double extreme_white_owner_min = 0.40;
    ExtremeOwnershipMode extreme_mode = ExtremeOwnershipMode::IndividualOnly;
    double lowess_frac = 2.0 / 3.0;
    int lowess_iterations = 3;
    std::uint64_t seed = 0;  // recorded in the manifest, not used by the run

    // Stress source precedence: explicit params here, else rates derived
    // from ground-truth metrics, else the stress table is skipped.
    std::optional<StressParams> stress;
};

// Runs ingest, classification, imputation, analytics and report emission.
// Returns 0 on success or a failure-class exit code (config 2, parse 3,
// imputation 4, analytics 5). The error message goes to stderr and, when
// given, *error_out. Identical inputs and config produce byte-identical
// output bundles.
int run_pipeline(const RunConfig& cfg, std::string* error_out = nullptr);

// Per-race scatter (pop_share, disparity, population weight) and LOWESS
// trend files under out_dir. Races with fewer than 3 tracts get a scatter
// but no trend. Returns the races that received a trend file.
std::vector<RaceCategory> emit_plot_data(const std::vector<DisparityRecord>& records,
                                         const std::filesystem::path& out_dir,
                                         const LowessOptions& options);

// The metrics.json payload (pretty-printed, trailing newline).
std::string metrics_report_json(const ConfusionMatrix& cm,
                                const std::optional<std::array<DecileAccuracy, 10>>& deciles,
                                const std::optional<StressParams>& stress);

void write_stressed_ownership_csv(std::ostream& out,
                                  const std::map<GeoId, TractOwnershipProfile>& profiles,
                                  const StressParams& params);

}  // namespace tract_equity
