// tract-equity: command-line toolkit for tract-level property-ownership
// equity analysis. See README.md for file formats and examples.

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tract_equity/entity_classifier.hpp"
#include "tract_equity/errors.hpp"
#include "tract_equity/evaluation.hpp"
#include "tract_equity/ingest.hpp"
#include "tract_equity/pipeline.hpp"
#include "tract_equity/race_imputer.hpp"
#include "tract_equity/synthetic.hpp"
#include "tract_equity/tract_analytics.hpp"

namespace te = tract_equity;
namespace fs = std::filesystem;

namespace {

int report_error(int code, const std::string& msg) {
    std::fprintf(stderr, "tract-equity: error: %s\n", msg.c_str());
    return code;
}

bool file_exists(const fs::path& p) { return !p.empty() && fs::exists(p); }

int check_input(const fs::path& p, const char* role, int* rc) {
    if (file_exists(p)) return 0;
    *rc = report_error(te::kExitConfig,
                       p.empty() ? std::string(role) + " path not set"
                                 : std::string(role) + " file not found: " + p.string());
    return 1;
}

int make_out_dir(const fs::path& out, int* rc) {
    if (out.empty()) {
        *rc = report_error(te::kExitConfig, "output directory not set");
        return 1;
    }
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        *rc = report_error(te::kExitConfig, "cannot create output directory " + out.string());
        return 1;
    }
    return 0;
}

std::ofstream must_write(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw te::Error("cannot write " + p.string());
    return out;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
    fs::path parcels, tracts, out;
    std::size_t min_properties = 100;
};

int do_ingest(const IngestArgs& a) {
    int rc = 0;
    if (check_input(a.parcels, "parcels", &rc) || check_input(a.tracts, "tracts", &rc) ||
        make_out_dir(a.out, &rc)) {
        return rc;
    }
    te::ParcelParseResult parcels;
    te::DemographicsParseResult demos;
    try {
        std::ifstream pin(a.parcels, std::ios::binary);
        if (!pin) return report_error(te::kExitParse, "cannot open " + a.parcels.string());
        parcels = te::parse_parcels(pin);
        std::ifstream tin(a.tracts, std::ios::binary);
        if (!tin) return report_error(te::kExitParse, "cannot open " + a.tracts.string());
        demos = te::parse_demographics(tin);
    } catch (const std::exception& e) {
        return report_error(te::kExitParse, e.what());
    }
    const std::size_t parcel_rejects = parcels.rejects.size();
    const std::size_t tract_rejects = demos.rejects.size();

    te::BuildResult built =
        te::build_dataset(std::move(parcels.records), std::move(demos.records));
    te::FilterResult filtered = te::filter_small_tracts(built.dataset, a.min_properties);

    std::vector<te::RejectedRow> rejects = std::move(parcels.rejects);
    for (te::RejectedRow& r : demos.rejects) rejects.push_back(std::move(r));
    for (const te::ParcelRecord& p : built.quarantined) {
        rejects.push_back(te::RejectedRow{0, te::RejectReason::UnknownTract,
                                          "geoid " + p.geoid.value(), te::parcel_to_line(p)});
    }

    try {
        std::ofstream pout = must_write(a.out / "parcels.csv");
        te::write_parcels_csv(pout, filtered.dataset.parcels);
        std::vector<te::TractDemographics> tracts;
        for (const auto& [geoid, demo] : filtered.dataset.tracts) tracts.push_back(demo);
        std::ofstream tout = must_write(a.out / "tracts.csv");
        te::write_demographics_csv(tout, tracts);
        std::ofstream rout = must_write(a.out / "rejects.csv");
        te::write_rejects_csv(rout, rejects);
    } catch (const std::exception& e) {
        return report_error(te::kExitAnalytics, e.what());
    }

    std::printf("parcels: %zu kept, %zu rejected, %zu in unknown tracts\n",
                filtered.dataset.parcels.size(), parcel_rejects, built.quarantined.size());
    std::printf("tracts: %zu kept, %zu rejected, %zu under the %zu-property minimum\n",
                filtered.dataset.tracts.size(), tract_rejects, filtered.excluded_tracts,
                a.min_properties);
    return 0;
}

// ------------------------------------------------------- classify-entities

struct ClassifyArgs {
    fs::path parcels, rules, out;
};

int do_classify(const ClassifyArgs& a) {
    int rc = 0;
    if (check_input(a.parcels, "parcels", &rc) || make_out_dir(a.out, &rc)) return rc;
    te::EntityRules rules = te::EntityRules::defaults();
    if (!a.rules.empty()) {
        if (check_input(a.rules, "entity rules", &rc)) return rc;
        try {
            std::ifstream in(a.rules, std::ios::binary);
            rules = te::EntityRules::load(in);
        } catch (const std::exception& e) {
            return report_error(te::kExitConfig, e.what());
        }
    }
    te::ParcelParseResult parcels;
    try {
        std::ifstream in(a.parcels, std::ios::binary);
        if (!in) return report_error(te::kExitParse, "cannot open " + a.parcels.string());
        parcels = te::parse_parcels(in);
    } catch (const std::exception& e) {
        return report_error(te::kExitParse, e.what());
    }

    std::array<std::size_t, 4> counts{};
    for (te::ParcelRecord& p : parcels.records) {
        p.owner_type = te::classify_owner(p.owner_name_raw, rules);
        ++counts[static_cast<std::size_t>(*p.owner_type) - 1];
    }
    try {
        std::ofstream pout = must_write(a.out / "parcels_classified.csv");
        te::write_parcels_csv(pout, parcels.records);
        std::ofstream rout = must_write(a.out / "rejects.csv");
        te::write_rejects_csv(rout, parcels.rejects);
    } catch (const std::exception& e) {
        return report_error(te::kExitAnalytics, e.what());
    }
    std::printf("individual %zu, corporate %zu, government %zu, trust/estate/other %zu\n",
                counts[0], counts[1], counts[2], counts[3]);
    return 0;
}

// ---------------------------------------------------------------- impute

struct ImputeArgs {
    fs::path parcels, tracts, priors, predictions, rules, out;
    std::size_t min_properties = 100;
};

int do_impute(const ImputeArgs& a) {
    int rc = 0;
    if (check_input(a.parcels, "parcels", &rc) || check_input(a.tracts, "tracts", &rc) ||
        make_out_dir(a.out, &rc)) {
        return rc;
    }
    const bool use_predictions = !a.predictions.empty();
    if (use_predictions && !a.priors.empty()) {
        return report_error(te::kExitConfig, "give either --priors or --predictions, not both");
    }
    if (use_predictions) {
        if (check_input(a.predictions, "predictions", &rc)) return rc;
    } else if (check_input(a.priors, "surname priors", &rc)) {
        return rc;
    }
    te::EntityRules rules = te::EntityRules::defaults();
    if (!a.rules.empty()) {
        if (check_input(a.rules, "entity rules", &rc)) return rc;
        try {
            std::ifstream in(a.rules, std::ios::binary);
            rules = te::EntityRules::load(in);
        } catch (const std::exception& e) {
            return report_error(te::kExitConfig, e.what());
        }
    }

    te::ParcelParseResult parcels;
    te::DemographicsParseResult demos;
    try {
        std::ifstream pin(a.parcels, std::ios::binary);
        if (!pin) return report_error(te::kExitParse, "cannot open " + a.parcels.string());
        parcels = te::parse_parcels(pin);
        std::ifstream tin(a.tracts, std::ios::binary);
        if (!tin) return report_error(te::kExitParse, "cannot open " + a.tracts.string());
        demos = te::parse_demographics(tin);
    } catch (const std::exception& e) {
        return report_error(te::kExitParse, e.what());
    }
    const std::size_t parcel_rejects = parcels.rejects.size();
    const std::size_t tract_rejects = demos.rejects.size();

    te::BuildResult built =
        te::build_dataset(std::move(parcels.records), std::move(demos.records));
    te::FilterResult filtered = te::filter_small_tracts(built.dataset, a.min_properties);

    te::ImputationMap imputations;
    std::vector<te::RejectedRow> imputation_rejects;
    try {
        for (te::ParcelRecord& p : filtered.dataset.parcels) {
            if (!p.owner_type) p.owner_type = te::classify_owner(p.owner_name_raw, rules);
        }
        if (use_predictions) {
            std::ifstream in(a.predictions, std::ios::binary);
            if (!in) throw te::Error("cannot open " + a.predictions.string());
            te::PredictionsResult preds = te::load_predictions(in);
            imputation_rejects = std::move(preds.rejects);
            imputations = te::impute_with_predictions(filtered.dataset, preds.predictions);
        } else {
            std::ifstream in(a.priors, std::ios::binary);
            if (!in) throw te::Error("cannot open " + a.priors.string());
            te::SurnamePriorTable priors = te::SurnamePriorTable::load(in, &imputation_rejects);
            te::GeoPriorTable geo = te::GeoPriorTable::from_demographics(filtered.dataset.tracts);
            imputations = te::impute_with_bisg(filtered.dataset, priors, geo, rules);
        }
    } catch (const std::exception& e) {
        return report_error(te::kExitImputation, e.what());
    }

    std::vector<te::RejectedRow> rejects = std::move(parcels.rejects);
    for (te::RejectedRow& r : demos.rejects) rejects.push_back(std::move(r));
    for (const te::ParcelRecord& p : built.quarantined) {
        rejects.push_back(te::RejectedRow{0, te::RejectReason::UnknownTract,
                                          "geoid " + p.geoid.value(), te::parcel_to_line(p)});
    }
    std::size_t individuals = 0;
    for (const auto& [id, imp] : imputations) {
        if (imp.individual()) ++individuals;
    }
    try {
        std::ofstream pout = must_write(a.out / "predictions.csv");
        te::write_predictions_csv(pout, imputations);
        std::ofstream rout = must_write(a.out / "rejects.csv");
        te::write_rejects_csv(rout, rejects);
        std::ofstream iout = must_write(a.out / "imputation_rejects.csv");
        te::write_rejects_csv(iout, imputation_rejects);
    } catch (const std::exception& e) {
        return report_error(te::kExitAnalytics, e.what());
    }
    std::printf("imputed %zu individual owners; %zu non-individual parcels; "
                "%zu parcel/%zu tract rows rejected\n",
                individuals, imputations.size() - individuals, parcel_rejects, tract_rejects);
    return 0;
}

// --------------------------------------------------------------- evaluate

struct EvaluateArgs {
    fs::path ground_truth, predictions, out;
};

int do_evaluate(const EvaluateArgs& a) {
    int rc = 0;
    if (check_input(a.ground_truth, "ground truth", &rc) || make_out_dir(a.out, &rc)) return rc;
    if (!a.predictions.empty() && check_input(a.predictions, "predictions", &rc)) return rc;

    te::GroundTruthResult gt;
    std::map<std::string, te::RaceDistribution> predictions;
    try {
        std::ifstream gin(a.ground_truth, std::ios::binary);
        if (!gin) return report_error(te::kExitParse, "cannot open " + a.ground_truth.string());
        gt = te::load_ground_truth(gin);
        if (!a.predictions.empty()) {
            std::ifstream pin(a.predictions, std::ios::binary);
            if (!pin) {
                return report_error(te::kExitParse, "cannot open " + a.predictions.string());
            }
            predictions = te::load_predictions(pin).predictions;
        }
    } catch (const std::exception& e) {
        return report_error(te::kExitParse, e.what());
    }

    std::vector<std::pair<te::RaceCategory, te::RaceCategory>> pairs;
    std::vector<te::LabeledRecord> labeled;
    std::size_t unmatched = 0;
    for (const te::GroundTruthRow& row : gt.rows) {
        std::optional<te::RaceCategory> predicted = row.predicted;
        if (!predicted) {
            auto it = predictions.find(row.record_id);
            if (it != predictions.end()) predicted = te::argmax_race(it->second);
        }
        if (!predicted) {
            ++unmatched;
            continue;
        }
        pairs.emplace_back(row.truth, *predicted);
        if (row.median_income) {
            labeled.push_back(te::LabeledRecord{row.truth, *predicted, *row.median_income});
        }
    }
    if (pairs.empty()) {
        return report_error(te::kExitAnalytics,
                            "no usable ground-truth pairs (every row lacked a prediction)");
    }

    try {
        te::ConfusionMatrix cm = te::build_confusion(pairs);
        std::optional<std::array<te::DecileAccuracy, 10>> deciles;
        if (labeled.size() >= 10) deciles = te::accuracy_by_income_decile(labeled);
        auto metrics = te::class_metrics(cm);
        te::StressParams stress;
        stress.white_fpr = metrics[static_cast<std::size_t>(te::RaceCategory::White)].fpr;
        for (std::size_t r = 0; r < te::kRaceCount; ++r) {
            stress.fnr_by_race[r] = metrics[r].support > 0 ? metrics[r].fnr : 0.0;
        }
        std::ofstream mout = must_write(a.out / "metrics.json");
        mout << te::metrics_report_json(cm, deciles, stress);
        std::ofstream rout = must_write(a.out / "ground_truth_rejects.csv");
        te::write_rejects_csv(rout, gt.rejects);
        std::printf("accuracy %.4f over %zu pairs (%zu unmatched, %zu rejected rows)\n",
                    te::accuracy(cm), pairs.size(), unmatched, gt.rejects.size());
    } catch (const std::exception& e) {
        return report_error(te::kExitAnalytics, e.what());
    }
    return 0;
}

// ----------------------------------------------------------------- stress

struct StressArgs {
    fs::path profiles, out;
    te::StressParams params;
};

int do_stress(const StressArgs& a) {
    int rc = 0;
    if (check_input(a.profiles, "profiles", &rc) || make_out_dir(a.out, &rc)) return rc;
    auto in_unit = [](double v) { return v >= 0.0 && v < 1.0; };
    bool ok = in_unit(a.params.white_fpr);
    for (std::size_t r = 0; r < te::kRaceCount; ++r) {
        if (r == static_cast<std::size_t>(te::RaceCategory::White)) continue;
        ok = ok && in_unit(a.params.fnr_by_race[r]);
    }
    if (!ok) return report_error(te::kExitConfig, "stress rates must lie in [0, 1)");

    te::ProfilesLoadResult loaded;
    try {
        std::ifstream in(a.profiles, std::ios::binary);
        if (!in) return report_error(te::kExitParse, "cannot open " + a.profiles.string());
        loaded = te::load_profiles(in);
    } catch (const std::exception& e) {
        return report_error(te::kExitParse, e.what());
    }
    try {
        std::ofstream out = must_write(a.out / "stressed_ownership.csv");
        te::write_stressed_ownership_csv(out, loaded.profiles, a.params);
    } catch (const std::exception& e) {
        return report_error(te::kExitAnalytics, e.what());
    }
    std::printf("stressed %zu tracts (%zu rows rejected)\n", loaded.profiles.size(),
                loaded.rejects.size());
    return 0;
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
    te::SyntheticSpec spec;
    std::uint64_t seed = 42;
    fs::path out;
};

int do_synth(const SynthArgs& a) {
    int rc = 0;
    if (make_out_dir(a.out, &rc)) return rc;
    try {
        te::SyntheticPaths paths = te::generate_synthetic(a.spec, a.seed, a.out);
        std::printf("%s\n%s\n%s\n%s\n%s\n%s\n", paths.parcels.string().c_str(),
                    paths.tracts.string().c_str(), paths.surname_priors.string().c_str(),
                    paths.predictions.string().c_str(), paths.ground_truth.string().c_str(),
                    paths.planted_shares.string().c_str());
    } catch (const te::InvalidSpecError& e) {
        return report_error(te::kExitConfig, e.what());
    } catch (const std::exception& e) {
        return report_error(te::kExitAnalytics, e.what());
    }
    return 0;
}

// --------------------------------------------------- analyze and run-all

struct PipelineArgs {
    te::RunConfig cfg;
    std::string majority_mode = "majority";
    std::string extreme_mode = "individual";
    double white_fpr = 0.0, black_fnr = 0.0, hispanic_fnr = 0.0, asian_fnr = 0.0,
           other_fnr = 0.0;
    std::array<CLI::Option*, 5> stress_opts{};
};

void add_pipeline_options(CLI::App* cmd, PipelineArgs& a, bool with_ground_truth) {
    cmd->add_option("--parcels", a.cfg.parcels_path, "Parcel CSV")->required();
    cmd->add_option("--tracts", a.cfg.tracts_path, "Tract demographics CSV")->required();
    cmd->add_option("--priors", a.cfg.priors_path,
                    "Surname priors CSV (built-in Bayes imputer)");
    cmd->add_option("--predictions", a.cfg.predictions_path,
                    "External per-parcel race predictions CSV");
    if (with_ground_truth) {
        cmd->add_option("--ground-truth", a.cfg.ground_truth_path,
                        "Validation labels CSV; enables metrics.json");
    }
    cmd->add_option("--rules", a.cfg.rules_path, "Entity-classification keyword overrides");
    cmd->add_option("--out", a.cfg.out_dir, "Output directory")->required();
    cmd->add_option("--min-properties", a.cfg.min_properties,
                    "Drop tracts with fewer parcels than this")
        ->capture_default_str();
    cmd->add_option("--majority-mode", a.majority_mode, "Tract grouping: majority|dominant")
        ->check(CLI::IsMember({"majority", "strict", "dominant", "plurality"}))
        ->capture_default_str();
    cmd->add_option("--extreme-white-pop-max", a.cfg.extreme_white_pop_max,
                    "White population share ceiling for flagged tracts")
        ->capture_default_str();
    cmd->add_option("--extreme-white-owner-min", a.cfg.extreme_white_owner_min,
                    "White ownership floor for flagged tracts")
        ->capture_default_str();
    cmd->add_option("--extreme-mode", a.extreme_mode,
                    "Ownership measure: individual|combined")
        ->check(CLI::IsMember({"individual", "combined"}))
        ->capture_default_str();
    cmd->add_option("--lowess-frac", a.cfg.lowess_frac, "LOWESS neighbor fraction")
        ->capture_default_str();
    cmd->add_option("--lowess-iterations", a.cfg.lowess_iterations,
                    "LOWESS robustness passes")
        ->capture_default_str();
    cmd->add_option("--seed", a.cfg.seed, "Recorded in the manifest")->capture_default_str();
    a.stress_opts[0] = cmd->add_option("--white-fpr", a.white_fpr, "Stress White FPR");
    a.stress_opts[1] = cmd->add_option("--black-fnr", a.black_fnr, "Stress Black FNR");
    a.stress_opts[2] = cmd->add_option("--hispanic-fnr", a.hispanic_fnr, "Stress Hispanic FNR");
    a.stress_opts[3] = cmd->add_option("--asian-fnr", a.asian_fnr, "Stress Asian FNR");
    a.stress_opts[4] = cmd->add_option("--other-fnr", a.other_fnr, "Stress Other FNR");
}

int run_pipeline_command(PipelineArgs& a) {
    a.cfg.majority_mode = (a.majority_mode == "dominant" || a.majority_mode == "plurality")
                              ? te::GroupingMode::Dominant
                              : te::GroupingMode::Majority;
    a.cfg.extreme_mode = a.extreme_mode == "combined"
                             ? te::ExtremeOwnershipMode::CombinedWithCorp
                             : te::ExtremeOwnershipMode::IndividualOnly;
    bool any_stress = false;
    for (CLI::Option* opt : a.stress_opts) {
        any_stress = any_stress || (opt != nullptr && opt->count() > 0);
    }
    if (any_stress) {
        te::StressParams params;
        params.white_fpr = a.white_fpr;
        params.fnr_by_race = {0.0, a.black_fnr, a.hispanic_fnr, a.asian_fnr, a.other_fnr};
        a.cfg.stress = params;
    }
    return te::run_pipeline(a.cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tract-level property ownership equity toolkit"};
    app.set_version_flag("--version", "0.1.0");
    app.set_config("--config", "",
                   "INI config file ([subcommand] sections); command-line flags win");
    app.require_subcommand(1);

    int rc = 0;

    auto ingest_args = std::make_shared<IngestArgs>();
    CLI::App* ingest =
        app.add_subcommand("ingest", "Parse, validate and filter parcels and tracts");
    ingest->add_option("--parcels", ingest_args->parcels, "Parcel CSV")->required();
    ingest->add_option("--tracts", ingest_args->tracts, "Tract demographics CSV")->required();
    ingest->add_option("--out", ingest_args->out, "Output directory")->required();
    ingest->add_option("--min-properties", ingest_args->min_properties,
                       "Drop tracts with fewer parcels than this")
        ->capture_default_str();
    ingest->callback([ingest_args, &rc]() { rc = do_ingest(*ingest_args); });

    auto classify_args = std::make_shared<ClassifyArgs>();
    CLI::App* classify =
        app.add_subcommand("classify-entities", "Label owners by entity class");
    classify->add_option("--parcels", classify_args->parcels, "Parcel CSV")->required();
    classify->add_option("--rules", classify_args->rules, "Keyword overrides file");
    classify->add_option("--out", classify_args->out, "Output directory")->required();
    classify->callback([classify_args, &rc]() { rc = do_classify(*classify_args); });

    auto impute_args = std::make_shared<ImputeArgs>();
    CLI::App* impute = app.add_subcommand("impute", "Predict owner race distributions");
    impute->add_option("--parcels", impute_args->parcels, "Parcel CSV")->required();
    impute->add_option("--tracts", impute_args->tracts, "Tract demographics CSV")->required();
    impute->add_option("--priors", impute_args->priors, "Surname priors CSV");
    impute->add_option("--predictions", impute_args->predictions, "External predictions CSV");
    impute->add_option("--rules", impute_args->rules, "Keyword overrides file");
    impute->add_option("--min-properties", impute_args->min_properties, "Tract size filter")
        ->capture_default_str();
    impute->add_option("--out", impute_args->out, "Output directory")->required();
    impute->callback([impute_args, &rc]() { rc = do_impute(*impute_args); });

    auto analyze_args = std::make_shared<PipelineArgs>();
    CLI::App* analyze =
        app.add_subcommand("analyze", "Full pipeline without ground-truth validation");
    add_pipeline_options(analyze, *analyze_args, false);
    analyze->callback([analyze_args, &rc]() { rc = run_pipeline_command(*analyze_args); });

    auto evaluate_args = std::make_shared<EvaluateArgs>();
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "Score predictions against ground truth");
    evaluate->add_option("--ground-truth", evaluate_args->ground_truth, "Validation CSV")
        ->required();
    evaluate->add_option("--predictions", evaluate_args->predictions,
                         "Predictions CSV to join when rows lack predicted_race");
    evaluate->add_option("--out", evaluate_args->out, "Output directory")->required();
    evaluate->callback([evaluate_args, &rc]() { rc = do_evaluate(*evaluate_args); });

    auto stress_args = std::make_shared<StressArgs>();
    CLI::App* stress =
        app.add_subcommand("stress", "Apply misclassification stress to tract profiles");
    stress->add_option("--profiles", stress_args->profiles, "profiles.csv from analyze")
        ->required();
    stress->add_option("--white-fpr", stress_args->params.white_fpr, "White FPR")
        ->capture_default_str();
    stress
        ->add_option("--black-fnr",
                     stress_args->params.fnr_by_race[static_cast<std::size_t>(
                         te::RaceCategory::Black)],
                     "Black FNR")
        ->capture_default_str();
    stress
        ->add_option("--hispanic-fnr",
                     stress_args->params.fnr_by_race[static_cast<std::size_t>(
                         te::RaceCategory::Hispanic)],
                     "Hispanic FNR")
        ->capture_default_str();
    stress
        ->add_option("--asian-fnr",
                     stress_args->params.fnr_by_race[static_cast<std::size_t>(
                         te::RaceCategory::Asian)],
                     "Asian FNR")
        ->capture_default_str();
    stress
        ->add_option("--other-fnr",
                     stress_args->params.fnr_by_race[static_cast<std::size_t>(
                         te::RaceCategory::Other)],
                     "Other FNR")
        ->capture_default_str();
    stress->add_option("--out", stress_args->out, "Output directory")->required();
    stress->callback([stress_args, &rc]() { rc = do_stress(*stress_args); });

    auto synth_args = std::make_shared<SynthArgs>();
    CLI::App* synth = app.add_subcommand("synth", "Generate a seeded synthetic corpus");
    synth->add_option("--seed", synth_args->seed, "RNG seed")->capture_default_str();
    synth->add_option("--tracts", synth_args->spec.n_tracts, "Tract count")
        ->capture_default_str();
    synth->add_option("--min-parcels", synth_args->spec.min_parcels, "Min parcels per tract")
        ->capture_default_str();
    synth->add_option("--max-parcels", synth_args->spec.max_parcels, "Max parcels per tract")
        ->capture_default_str();
    synth
        ->add_option("--min-corporate", synth_args->spec.min_corporate,
                     "Min corporate-like share")
        ->capture_default_str();
    synth
        ->add_option("--max-corporate", synth_args->spec.max_corporate,
                     "Max corporate-like share")
        ->capture_default_str();
    synth
        ->add_option("--surnames-per-race", synth_args->spec.surnames_per_race,
                     "Surname pool size per category")
        ->capture_default_str();
    synth
        ->add_option("--urban-fraction", synth_args->spec.urban_fraction,
                     "Share of tracts marked census-urban")
        ->capture_default_str();
    synth->add_option("--out", synth_args->out, "Output directory")->required();
    synth->callback([synth_args, &rc]() { rc = do_synth(*synth_args); });

    auto runall_args = std::make_shared<PipelineArgs>();
    CLI::App* runall = app.add_subcommand(
        "run-all", "Full pipeline with optional ground-truth validation");
    add_pipeline_options(runall, *runall_args, true);
    runall->callback([runall_args, &rc]() { rc = run_pipeline_command(*runall_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : te::kExitConfig;
    }
    return rc;
}
