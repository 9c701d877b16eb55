#include "tract_equity/pipeline.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tract_equity/csv.hpp"
#include "tract_equity/entity_classifier.hpp"
#include "tract_equity/errors.hpp"
#include "tract_equity/ingest.hpp"
#include "tract_equity/log.hpp"
#include "tract_equity/race_imputer.hpp"

namespace tract_equity {

namespace {

using ordered_json = nlohmann::ordered_json;

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

std::string_view grouping_mode_name(GroupingMode mode) {
    return mode == GroupingMode::Majority ? "majority" : "dominant";
}

std::string_view extreme_mode_name(ExtremeOwnershipMode mode) {
    return mode == ExtremeOwnershipMode::IndividualOnly ? "individual_only"
                                                        : "combined_with_corp";
}

// Semantic configuration only: no paths, so two runs into different
// directories hash identically.
std::string canonical_config(const RunConfig& cfg, bool use_predictions) {
    std::ostringstream s;
    s << "min_properties=" << cfg.min_properties
      << ";majority_mode=" << grouping_mode_name(cfg.majority_mode)
      << ";extreme_white_pop_max=" << csv::format_double(cfg.extreme_white_pop_max)
      << ";extreme_white_owner_min=" << csv::format_double(cfg.extreme_white_owner_min)
      << ";extreme_mode=" << extreme_mode_name(cfg.extreme_mode)
      << ";lowess_frac=" << csv::format_double(cfg.lowess_frac)
      << ";lowess_iterations=" << cfg.lowess_iterations
      << ";imputation=" << (use_predictions ? "external" : "bisg") << ";seed=" << cfg.seed
      << ";stress=";
    if (cfg.stress) {
        s << csv::format_double(cfg.stress->white_fpr);
        for (double f : cfg.stress->fnr_by_race) s << "," << csv::format_double(f);
    } else {
        s << "none";
    }
    return s.str();
}

void write_majority_csv(std::ostream& out, const std::vector<GroupProfileRow>& rows) {
    csv::Writer w(out);
    std::vector<std::string> header = {"group", "tract_count"};
    for (RaceCategory r : kAllRaces) header.push_back("pop_" + std::string(race_name(r)));
    for (RaceCategory r : kAllRaces) header.push_back("owner_" + std::string(race_name(r)));
    w.write_row(header);
    for (const GroupProfileRow& row : rows) {
        std::vector<std::string> fields = {std::string(majority_group_name(row.group)),
                                           std::to_string(row.tract_count)};
        for (double v : row.mean_pop_share) fields.push_back(csv::format_double(v));
        for (double v : row.mean_owner_share) fields.push_back(csv::format_double(v));
        w.write_row(fields);
    }
}

void write_extreme_csv(std::ostream& out, const std::vector<ExtremeDisparityRow>& rows) {
    csv::Writer w(out);
    w.write_row({"rank", "geoid", "white_pop_share", "white_owner_share", "gap"});
    std::size_t rank = 0;
    for (const ExtremeDisparityRow& row : rows) {
        w.write_row({std::to_string(++rank), row.geoid.value(),
                     csv::format_double(row.white_pop_share),
                     csv::format_double(row.white_owner_share), csv::format_double(row.gap)});
    }
}

void write_combined_csv(std::ostream& out,
                        const std::map<GeoId, TractOwnershipProfile>& profiles) {
    csv::Writer w(out);
    std::vector<std::string> header = {"geoid", "corporate_share", "combined_white_corp"};
    for (RaceCategory r : kAllRaces) header.push_back("all_share_" + std::string(race_name(r)));
    w.write_row(header);
    for (const auto& [geoid, p] : profiles) {
        std::vector<std::string> fields = {geoid.value(), csv::format_double(p.corporate_share),
                                           csv::format_double(combined_white_corp(p))};
        for (RaceCategory r : kAllRaces) {
            fields.push_back(csv::format_double(race_share_of_all(p, r)));
        }
        w.write_row(fields);
    }
}

void write_urbanization_csv(std::ostream& out,
                            const std::map<GeoId, TractOwnershipProfile>& profiles,
                            const std::map<GeoId, TractDemographics>& tracts,
                            std::optional<double> threshold) {
    csv::Writer w(out);
    w.write_row({"geoid", "census_urban", "n_properties", "urban_class"});
    if (!threshold) return;
    for (const auto& [geoid, p] : profiles) {
        auto it = tracts.find(geoid);
        if (it == tracts.end()) continue;
        UrbanClass cls = classify_urbanization(p, it->second, *threshold);
        w.write_row({geoid.value(), it->second.census_urban ? "1" : "0",
                     std::to_string(p.n_properties), std::string(urban_class_name(cls))});
    }
}

void write_value_shares_csv(std::ostream& out,
                            const std::optional<std::array<double, kRaceCount>>& shares) {
    csv::Writer w(out);
    w.write_row({"race", "value_share"});
    if (!shares) return;
    for (RaceCategory r : kAllRaces) {
        w.write_row({std::string(race_name(r)),
                     csv::format_double((*shares)[static_cast<std::size_t>(r)])});
    }
}

bool stress_params_usable(const StressParams& params) {
    if (params.white_fpr < 0.0 || params.white_fpr >= 1.0) return false;
    for (std::size_t i = 0; i < kRaceCount; ++i) {
        if (i == static_cast<std::size_t>(RaceCategory::White)) continue;
        if (params.fnr_by_race[i] < 0.0 || params.fnr_by_race[i] >= 1.0) return false;
    }
    return true;
}

ordered_json metrics_json(const ConfusionMatrix& cm,
                          const std::optional<std::array<DecileAccuracy, 10>>& deciles,
                          const std::optional<StressParams>& stress) {
    ordered_json j;
    ordered_json labels = ordered_json::array();
    for (RaceCategory r : kAllRaces) labels.push_back(std::string(race_name(r)));
    ordered_json counts = ordered_json::array();
    for (std::size_t i = 0; i < kRaceCount; ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t k = 0; k < kRaceCount; ++k) row.push_back(cm.counts[i][k]);
        counts.push_back(row);
    }
    j["confusion"] = {{"labels", labels}, {"counts", counts}, {"total", cm.total()}};
    j["accuracy"] = accuracy(cm);

    auto per_class = class_metrics(cm);
    ordered_json pc;
    for (RaceCategory r : kAllRaces) {
        const ClassMetrics& m = per_class[static_cast<std::size_t>(r)];
        pc[std::string(race_name(r))] = {{"support", m.support},   {"precision", m.precision},
                                         {"recall", m.recall},     {"f1", m.f1},
                                         {"fpr", m.fpr},           {"fnr", m.fnr}};
    }
    j["per_class"] = pc;

    WeightedMetrics wm = weighted_metrics(cm);
    j["weighted"] = {{"precision", wm.precision}, {"recall", wm.recall}, {"f1", wm.f1}};

    if (deciles) {
        ordered_json arr = ordered_json::array();
        for (std::size_t d = 0; d < deciles->size(); ++d) {
            const DecileAccuracy& a = (*deciles)[d];
            arr.push_back({{"decile", d + 1},
                           {"count", a.count},
                           {"correct", a.correct},
                           {"accuracy", a.accuracy}});
        }
        j["income_deciles"] = arr;
    } else {
        j["income_deciles"] = nullptr;
    }

    if (stress) {
        ordered_json fnr;
        for (RaceCategory r : kAllRaces) {
            fnr[std::string(race_name(r))] = stress->fnr_by_race[static_cast<std::size_t>(r)];
        }
        j["stress_params"] = {{"white_fpr", stress->white_fpr}, {"fnr_by_race", fnr}};
    } else {
        j["stress_params"] = nullptr;
    }
    return j;
}

}  // namespace

void write_stressed_ownership_csv(std::ostream& out,
                                  const std::map<GeoId, TractOwnershipProfile>& profiles,
                                  const StressParams& params) {
    csv::Writer w(out);
    std::vector<std::string> header = {"geoid"};
    for (RaceCategory r : kAllRaces) {
        header.push_back("share_" + std::string(race_name(r)));
        header.push_back("stressed_" + std::string(race_name(r)));
    }
    w.write_row(header);
    for (const auto& [geoid, p] : profiles) {
        auto stressed = stress_adjust(p.indiv_share_by_race, params);
        std::vector<std::string> fields = {geoid.value()};
        for (std::size_t r = 0; r < kRaceCount; ++r) {
            fields.push_back(csv::format_double(p.indiv_share_by_race[r]));
            fields.push_back(csv::format_double(stressed[r]));
        }
        w.write_row(fields);
    }
}

std::string metrics_report_json(const ConfusionMatrix& cm,
                                const std::optional<std::array<DecileAccuracy, 10>>& deciles,
                                const std::optional<StressParams>& stress) {
    return metrics_json(cm, deciles, stress).dump(2) + "\n";
}

std::vector<RaceCategory> emit_plot_data(const std::vector<DisparityRecord>& records,
                                         const std::filesystem::path& out_dir,
                                         const LowessOptions& options) {
    std::vector<RaceCategory> trends;
    for (RaceCategory race : kAllRaces) {
        std::vector<LowessPoint> points;
        {
            std::ofstream out =
                open_out(out_dir / ("scatter_" + std::string(race_name(race)) + ".csv"));
            csv::Writer w(out);
            w.write_row({"geoid", "pop_share", "disparity", "weight"});
            for (const DisparityRecord& rec : records) {
                if (rec.race != race) continue;
                w.write_row({rec.geoid.value(), csv::format_double(rec.pop_share),
                             csv::format_double(rec.disparity), std::to_string(rec.weight)});
                points.push_back(LowessPoint{rec.pop_share, rec.disparity,
                                             static_cast<double>(rec.weight)});
            }
        }
        if (points.size() < 3) {
            log::info("trend skipped for " + std::string(race_name(race)) +
                      ": fewer than 3 tracts");
            continue;
        }
        LowessCurve curve = lowess_trend(points, options);
        std::ofstream out = open_out(out_dir / ("trend_" + std::string(race_name(race)) + ".csv"));
        csv::Writer w(out);
        w.write_row({"x", "y"});
        for (std::size_t i = 0; i < curve.x.size(); ++i) {
            w.write_row({csv::format_double(curve.x[i]), csv::format_double(curve.y[i])});
        }
        trends.push_back(race);
    }
    return trends;
}

int run_pipeline(const RunConfig& cfg, std::string* error_out) {
    auto fail = [&](int code, const std::string& msg) {
        std::fprintf(stderr, "tract-equity: error: %s\n", msg.c_str());
        if (error_out != nullptr) *error_out = msg;
        return code;
    };

    // --- configuration ---------------------------------------------------
    const bool use_predictions = !cfg.predictions_path.empty();
    EntityRules rules = EntityRules::defaults();
    {
        auto require_file = [](const std::filesystem::path& p,
                               const char* role) -> std::optional<std::string> {
            if (p.empty()) return std::string(role) + " path not set";
            if (!std::filesystem::exists(p)) {
                return std::string(role) + " file not found: " + p.string();
            }
            return std::nullopt;
        };
        if (auto err = require_file(cfg.parcels_path, "parcels")) return fail(kExitConfig, *err);
        if (auto err = require_file(cfg.tracts_path, "tracts")) return fail(kExitConfig, *err);
        if (use_predictions && !cfg.priors_path.empty()) {
            return fail(kExitConfig, "give either priors or predictions, not both");
        }
        if (use_predictions) {
            if (auto err = require_file(cfg.predictions_path, "predictions")) {
                return fail(kExitConfig, *err);
            }
        } else if (auto err = require_file(cfg.priors_path, "surname priors")) {
            return fail(kExitConfig, *err);
        }
        if (!cfg.ground_truth_path.empty()) {
            if (auto err = require_file(cfg.ground_truth_path, "ground truth")) {
                return fail(kExitConfig, *err);
            }
        }
        if (cfg.out_dir.empty()) return fail(kExitConfig, "output directory not set");
        if (cfg.min_properties == 0) {
            return fail(kExitConfig, "min-properties must be at least 1");
        }
        if (!(cfg.lowess_frac > 0.0) || cfg.lowess_frac > 1.0) {
            return fail(kExitConfig, "lowess-frac must be in (0, 1]");
        }
        if (!cfg.rules_path.empty()) {
            if (auto err = require_file(cfg.rules_path, "entity rules")) {
                return fail(kExitConfig, *err);
            }
            try {
                std::ifstream in = open_in(cfg.rules_path);
                rules = EntityRules::load(in);
            } catch (const std::exception& e) {
                return fail(kExitConfig, e.what());
            }
        }
        std::error_code ec;
        std::filesystem::create_directories(cfg.out_dir, ec);
        if (ec) {
            return fail(kExitConfig,
                        "cannot create output directory " + cfg.out_dir.string());
        }
    }

    // --- parse -----------------------------------------------------------
    ParcelParseResult parcels;
    DemographicsParseResult demos;
    GroundTruthResult ground_truth;
    try {
        std::ifstream pin = open_in(cfg.parcels_path);
        parcels = parse_parcels(pin);
        std::ifstream tin = open_in(cfg.tracts_path);
        demos = parse_demographics(tin);
        if (!cfg.ground_truth_path.empty()) {
            std::ifstream gin = open_in(cfg.ground_truth_path);
            ground_truth = load_ground_truth(gin);
        }
    } catch (const std::exception& e) {
        return fail(kExitParse, e.what());
    }

    BuildResult built = build_dataset(std::move(parcels.records), std::move(demos.records));
    FilterResult filtered = filter_small_tracts(built.dataset, cfg.min_properties);
    if (filtered.dataset.tracts.empty()) {
        std::fprintf(stderr,
                     "tract-equity: warning: no tract meets the %zu-property minimum; "
                     "reports will be empty\n",
                     cfg.min_properties);
    }

    // --- imputation ------------------------------------------------------
    ImputationMap imputations;
    std::vector<RejectedRow> imputation_rejects;
    std::size_t prediction_rows = 0;
    std::size_t priors_loaded = 0;
    try {
        for (ParcelRecord& p : filtered.dataset.parcels) {
            if (!p.owner_type) p.owner_type = classify_owner(p.owner_name_raw, rules);
        }
        if (use_predictions) {
            std::ifstream in = open_in(cfg.predictions_path);
            PredictionsResult preds = load_predictions(in);
            prediction_rows = preds.predictions.size();
            imputation_rejects = std::move(preds.rejects);
            imputations = impute_with_predictions(filtered.dataset, preds.predictions);
        } else {
            std::ifstream in = open_in(cfg.priors_path);
            SurnamePriorTable priors = SurnamePriorTable::load(in, &imputation_rejects);
            priors_loaded = priors.size();
            GeoPriorTable geo = GeoPriorTable::from_demographics(filtered.dataset.tracts);
            imputations = impute_with_bisg(filtered.dataset, priors, geo, rules);
        }
    } catch (const std::exception& e) {
        return fail(kExitImputation, e.what());
    }

    // --- analytics and reports -------------------------------------------
    try {
        const auto& tracts = filtered.dataset.tracts;
        std::map<GeoId, TractOwnershipProfile> profiles =
            aggregate_dataset(filtered.dataset, imputations);

        std::vector<DisparityRecord> disparities;
        for (const auto& [geoid, profile] : profiles) {
            auto it = tracts.find(geoid);
            if (it == tracts.end()) continue;
            for (DisparityRecord& rec : disparity(profile, it->second)) {
                disparities.push_back(rec);
            }
        }

        std::vector<GroupProfileRow> majority =
            majority_profile_table(profiles, tracts, cfg.majority_mode);
        std::vector<ExtremeDisparityRow> extremes =
            find_extreme_disparity(profiles, tracts, cfg.extreme_white_pop_max,
                                   cfg.extreme_white_owner_min, cfg.extreme_mode);
        std::optional<double> quartile;
        if (!profiles.empty()) quartile = property_count_quartile_threshold(profiles);
        std::optional<std::array<double, kRaceCount>> value_shares;
        if (!profiles.empty()) {
            try {
                value_shares = value_share_by_race(profiles);
            } catch (const ZeroTotalValueError&) {
                log::warn("no individually-owned assessed value; value shares skipped");
            }
        }

        // Ground-truth evaluation: rows either carry predictions or join
        // the pipeline's own by record_id.
        std::optional<ConfusionMatrix> confusion;
        std::optional<std::array<DecileAccuracy, 10>> deciles;
        std::size_t gt_pairs = 0, gt_unmatched = 0;
        std::vector<std::pair<RaceCategory, RaceCategory>> pairs;
        std::vector<LabeledRecord> labeled;
        for (const GroundTruthRow& row : ground_truth.rows) {
            std::optional<RaceCategory> predicted = row.predicted;
            if (!predicted) {
                auto it = imputations.find(row.record_id);
                if (it != imputations.end() && it->second.individual()) {
                    predicted = it->second.race;
                }
            }
            if (!predicted) {
                ++gt_unmatched;
                continue;
            }
            pairs.emplace_back(row.truth, *predicted);
            if (row.median_income) {
                labeled.push_back(LabeledRecord{row.truth, *predicted, *row.median_income});
            }
        }
        gt_pairs = pairs.size();
        if (!pairs.empty()) {
            confusion = build_confusion(pairs);
            if (labeled.size() >= 10) deciles = accuracy_by_income_decile(labeled);
        }

        std::optional<StressParams> stress = cfg.stress;
        if (!stress && confusion) {
            auto metrics = class_metrics(*confusion);
            StressParams derived;
            derived.white_fpr = metrics[static_cast<std::size_t>(RaceCategory::White)].fpr;
            for (std::size_t r = 0; r < kRaceCount; ++r) {
                derived.fnr_by_race[r] = metrics[r].support > 0 ? metrics[r].fnr : 0.0;
            }
            stress = derived;
        }
        bool stress_ok = stress && stress_params_usable(*stress);
        if (stress && !stress_ok) {
            log::warn("stress rates outside [0,1); stressed ownership table skipped");
        }

        // Reject bundle: ingest problems in rejects.csv, with quarantined
        // parcels appended (row_number 0).
        const std::size_t parcel_reject_count = parcels.rejects.size();
        const std::size_t tract_reject_count = demos.rejects.size();
        std::vector<RejectedRow> ingest_rejects = std::move(parcels.rejects);
        for (RejectedRow& r : demos.rejects) ingest_rejects.push_back(std::move(r));
        for (const ParcelRecord& p : built.quarantined) {
            ingest_rejects.push_back(RejectedRow{0, RejectReason::UnknownTract,
                                                 "geoid " + p.geoid.value(),
                                                 parcel_to_line(p)});
        }

        std::vector<std::string> outputs;
        auto emit = [&](const char* name, auto&& writer) {
            std::ofstream out = open_out(cfg.out_dir / name);
            writer(out);
            outputs.push_back(name);
        };

        emit("rejects.csv", [&](std::ostream& o) { write_rejects_csv(o, ingest_rejects); });
        emit("imputation_rejects.csv",
             [&](std::ostream& o) { write_rejects_csv(o, imputation_rejects); });
        if (!cfg.ground_truth_path.empty()) {
            emit("ground_truth_rejects.csv",
                 [&](std::ostream& o) { write_rejects_csv(o, ground_truth.rejects); });
        }
        emit("predictions.csv", [&](std::ostream& o) { write_predictions_csv(o, imputations); });
        emit("profiles.csv", [&](std::ostream& o) { write_profiles_csv(o, profiles); });
        emit("disparity.csv", [&](std::ostream& o) { write_disparity_csv(o, disparities); });
        emit("majority_profiles.csv", [&](std::ostream& o) { write_majority_csv(o, majority); });
        emit("extreme_tracts.csv", [&](std::ostream& o) { write_extreme_csv(o, extremes); });
        emit("combined_ownership.csv", [&](std::ostream& o) { write_combined_csv(o, profiles); });
        emit("urbanization.csv",
             [&](std::ostream& o) { write_urbanization_csv(o, profiles, tracts, quartile); });
        emit("value_shares.csv",
             [&](std::ostream& o) { write_value_shares_csv(o, value_shares); });
        if (stress_ok) {
            emit("stressed_ownership.csv",
                 [&](std::ostream& o) { write_stressed_ownership_csv(o, profiles, *stress); });
        }

        LowessOptions lowess_options;
        lowess_options.frac = cfg.lowess_frac;
        lowess_options.iterations = cfg.lowess_iterations;
        std::vector<RaceCategory> trends = emit_plot_data(disparities, cfg.out_dir, lowess_options);
        for (RaceCategory r : kAllRaces) {
            outputs.push_back("scatter_" + std::string(race_name(r)) + ".csv");
        }
        for (RaceCategory r : trends) {
            outputs.push_back("trend_" + std::string(race_name(r)) + ".csv");
        }

        if (confusion) {
            std::ofstream out = open_out(cfg.out_dir / "metrics.json");
            out << metrics_report_json(*confusion, deciles, stress);
            outputs.push_back("metrics.json");
        }

        ordered_json manifest;
        manifest["tool"] = "tract-equity";
        manifest["config"] = {
            {"min_properties", cfg.min_properties},
            {"majority_mode", std::string(grouping_mode_name(cfg.majority_mode))},
            {"extreme_white_pop_max", cfg.extreme_white_pop_max},
            {"extreme_white_owner_min", cfg.extreme_white_owner_min},
            {"extreme_mode", std::string(extreme_mode_name(cfg.extreme_mode))},
            {"lowess_frac", cfg.lowess_frac},
            {"lowess_iterations", cfg.lowess_iterations},
            {"imputation", use_predictions ? "external" : "bisg"},
            {"seed", cfg.seed},
        };
        manifest["config_hash"] = hex64(fnv1a(canonical_config(cfg, use_predictions)));
        manifest["inputs"] = {
            {"parcels", cfg.parcels_path.filename().string()},
            {"tracts", cfg.tracts_path.filename().string()},
            {"priors", use_predictions ? "" : cfg.priors_path.filename().string()},
            {"predictions", use_predictions ? cfg.predictions_path.filename().string() : ""},
            {"ground_truth", cfg.ground_truth_path.empty()
                                 ? ""
                                 : cfg.ground_truth_path.filename().string()},
        };
        manifest["counts"] = {
            {"parcel_rows_accepted", built.dataset.parcels.size() + built.quarantined.size()},
            {"parcel_rows_rejected", parcel_reject_count},
            {"parcels_quarantined", built.quarantined.size()},
            {"tract_rows_accepted", built.dataset.tracts.size()},
            {"tract_rows_rejected", tract_reject_count},
            {"tracts_after_filter", filtered.dataset.tracts.size()},
            {"tracts_excluded_small", filtered.excluded_tracts},
            {"parcels_after_filter", filtered.dataset.parcels.size()},
            {"parcels_excluded_small", filtered.excluded_parcels},
            {"profiles", profiles.size()},
            {"surname_priors", priors_loaded},
            {"prediction_rows", prediction_rows},
            {"imputation_rejects", imputation_rejects.size()},
            {"ground_truth_rows", ground_truth.rows.size()},
            {"ground_truth_rejects", ground_truth.rejects.size()},
            {"ground_truth_pairs", gt_pairs},
            {"ground_truth_unmatched", gt_unmatched},
        };
        manifest["analytics"] = {
            {"quartile_threshold", quartile ? ordered_json(*quartile) : ordered_json(nullptr)},
            {"stress_applied", stress_ok},
        };
        outputs.push_back("manifest.json");
        manifest["outputs"] = outputs;
        std::ofstream mout = open_out(cfg.out_dir / "manifest.json");
        mout << manifest.dump(2) << "\n";
    } catch (const std::exception& e) {
        return fail(kExitAnalytics, e.what());
    }
    return kExitOk;
}

}  // namespace tract_equity
