#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "tract_equity/csv.hpp"
#include "tract_equity/errors.hpp"
#include "tract_equity/pipeline.hpp"
#include "tract_equity/synthetic.hpp"

namespace te = tract_equity;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
};

te::SyntheticPaths make_corpus(const fs::path& dir) {
    te::SyntheticSpec spec;
    spec.n_tracts = 8;
    spec.min_parcels = 40;
    spec.max_parcels = 80;
    return te::generate_synthetic(spec, 4242, dir);
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(TRACT_EQUITY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("metrics report is well-formed json") {
    te::ConfusionMatrix cm;
    cm.at(te::RaceCategory::White, te::RaceCategory::White) = 90;
    cm.at(te::RaceCategory::White, te::RaceCategory::Black) = 10;
    cm.at(te::RaceCategory::Black, te::RaceCategory::Black) = 80;
    cm.at(te::RaceCategory::Black, te::RaceCategory::White) = 20;

    auto j = nlohmann::json::parse(te::metrics_report_json(cm, std::nullopt, std::nullopt));
    CHECK(j["confusion"]["total"] == 200);
    CHECK(j["confusion"]["labels"][0] == "white");
    CHECK(j["confusion"]["counts"][0][1] == 10);
    CHECK(j["accuracy"].get<double>() == doctest::Approx(0.85));
    CHECK(j["per_class"]["white"]["recall"].get<double>() == doctest::Approx(0.9));
    CHECK(j["per_class"]["white"]["support"] == 100);
    CHECK(j["per_class"]["hispanic"]["precision"].get<double>() == 0.0);
    CHECK(j["weighted"]["recall"].get<double>() == doctest::Approx(0.85));
    CHECK(j["income_deciles"].is_null());
    CHECK(j["stress_params"].is_null());

    std::array<te::DecileAccuracy, 10> deciles{};
    deciles[0] = {4, 2, 0.5};
    te::StressParams stress{0.069, {0.0, 0.0993, 0.1525, 0.1, 0.2}};
    auto j2 = nlohmann::json::parse(te::metrics_report_json(cm, deciles, stress));
    CHECK(j2["income_deciles"].size() == 10);
    CHECK(j2["income_deciles"][0]["count"] == 4);
    CHECK(j2["income_deciles"][0]["accuracy"].get<double>() == doctest::Approx(0.5));
    CHECK(j2["stress_params"]["white_fpr"].get<double>() == doctest::Approx(0.069));
    CHECK(j2["stress_params"]["fnr_by_race"]["black"].get<double>() == doctest::Approx(0.0993));
}

TEST_CASE("stressed ownership table applies the documented formulas") {
    auto g = te::GeoId::parse("36001000100");
    REQUIRE(g);
    te::TractOwnershipProfile p{*g};
    p.n_properties = 10;
    p.n_individual = 10;
    p.indiv_share_by_race = {0.6, 0.2, 0.1, 0.05, 0.05};
    std::map<te::GeoId, te::TractOwnershipProfile> profiles;
    profiles.emplace(*g, p);

    te::StressParams params{0.1, {0, 0.2, 0.25, 0.0, 0.5}};
    std::ostringstream out;
    te::write_stressed_ownership_csv(out, profiles, params);

    std::istringstream lines(out.str());
    std::string header, row;
    std::getline(lines, header);
    CHECK(header ==
          "geoid,share_white,stressed_white,share_black,stressed_black,share_hispanic,"
          "stressed_hispanic,share_asian,stressed_asian,share_other,stressed_other");
    std::getline(lines, row);
    auto fields = te::csv::split_fields(row, ',');
    REQUIRE(fields.size() == 11);
    CHECK(*te::csv::parse_double(fields[2]) == doctest::Approx(0.54));
    CHECK(*te::csv::parse_double(fields[4]) == doctest::Approx(0.25));
    CHECK(*te::csv::parse_double(fields[6]) == doctest::Approx(0.1 / 0.75));
    CHECK(*te::csv::parse_double(fields[8]) == doctest::Approx(0.05));
    CHECK(*te::csv::parse_double(fields[10]) == doctest::Approx(0.1));
}

TEST_CASE("plot data emits scatters for everyone, trends for three or more tracts") {
    Scratch scratch("tract_equity_plot");
    std::vector<te::DisparityRecord> records;
    auto add = [&](const std::string& geo, te::RaceCategory race, double pop, double own) {
        auto g = te::GeoId::parse(geo);
        REQUIRE(g);
        records.push_back(te::DisparityRecord{*g, race, pop, own, own - pop, 1000});
    };
    // White: 4 tracts. Black: 2. Others: none.
    add("36001000100", te::RaceCategory::White, 0.1, 0.3);
    add("36001000200", te::RaceCategory::White, 0.4, 0.5);
    add("36001000300", te::RaceCategory::White, 0.6, 0.65);
    add("36001000400", te::RaceCategory::White, 0.8, 0.75);
    add("36001000100", te::RaceCategory::Black, 0.5, 0.4);
    add("36001000200", te::RaceCategory::Black, 0.3, 0.2);

    auto trends = te::emit_plot_data(records, scratch.dir, te::LowessOptions{});
    REQUIRE(trends.size() == 1);
    CHECK(trends[0] == te::RaceCategory::White);
    for (const char* name : {"scatter_white.csv", "scatter_black.csv", "scatter_hispanic.csv",
                             "scatter_asian.csv", "scatter_other.csv", "trend_white.csv"}) {
        CHECK(fs::exists(scratch.dir / name));
    }
    CHECK_FALSE(fs::exists(scratch.dir / "trend_black.csv"));

    // Scatter rows carry only the matching race.
    std::istringstream scatter(slurp(scratch.dir / "scatter_black.csv"));
    std::string line;
    std::getline(scatter, line);
    int rows = 0;
    while (std::getline(scatter, line)) ++rows;
    CHECK(rows == 2);
}

TEST_CASE("run_pipeline produces a deterministic bundle from a seeded corpus") {
    Scratch scratch("tract_equity_pipeline");
    auto paths = make_corpus(scratch.dir / "corpus");

    te::RunConfig cfg;
    cfg.parcels_path = paths.parcels;
    cfg.tracts_path = paths.tracts;
    cfg.priors_path = paths.surname_priors;
    cfg.ground_truth_path = paths.ground_truth;
    cfg.out_dir = scratch.dir / "out1";
    cfg.min_properties = 10;

    std::string error;
    CHECK(te::run_pipeline(cfg, &error) == te::kExitOk);
    CHECK(error.empty());

    for (const char* name :
         {"rejects.csv", "imputation_rejects.csv", "ground_truth_rejects.csv",
          "predictions.csv", "profiles.csv", "disparity.csv", "majority_profiles.csv",
          "extreme_tracts.csv", "combined_ownership.csv", "urbanization.csv",
          "value_shares.csv", "stressed_ownership.csv", "metrics.json", "manifest.json",
          "scatter_white.csv", "trend_white.csv"}) {
        CHECK(fs::exists(cfg.out_dir / name));
    }

    auto manifest = nlohmann::json::parse(slurp(cfg.out_dir / "manifest.json"));
    CHECK(manifest["tool"] == "tract-equity");
    CHECK(manifest["counts"]["tracts_after_filter"] == 8);
    CHECK(manifest["counts"]["ground_truth_unmatched"] == 0);
    CHECK(manifest["analytics"]["stress_applied"] == true);
    // No absolute paths anywhere in the bundle manifest.
    CHECK(manifest["inputs"]["parcels"] == "parcels.csv");

    auto metrics = nlohmann::json::parse(slurp(cfg.out_dir / "metrics.json"));
    CHECK(metrics["accuracy"].get<double>() > 0.9);
    CHECK(metrics["confusion"]["total"].get<std::size_t>() ==
          manifest["counts"]["ground_truth_pairs"].get<std::size_t>());

    cfg.out_dir = scratch.dir / "out2";
    CHECK(te::run_pipeline(cfg, &error) == te::kExitOk);
    for (const auto& entry : fs::directory_iterator(scratch.dir / "out1")) {
        auto other = scratch.dir / "out2" / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
    }
}

TEST_CASE("run_pipeline with perfect predictions reports perfect accuracy") {
    Scratch scratch("tract_equity_pipeline_pred");
    auto paths = make_corpus(scratch.dir / "corpus");

    te::RunConfig cfg;
    cfg.parcels_path = paths.parcels;
    cfg.tracts_path = paths.tracts;
    cfg.predictions_path = paths.predictions;
    cfg.ground_truth_path = paths.ground_truth;
    cfg.out_dir = scratch.dir / "out";
    cfg.min_properties = 10;

    std::string error;
    REQUIRE(te::run_pipeline(cfg, &error) == te::kExitOk);
    auto metrics = nlohmann::json::parse(slurp(cfg.out_dir / "metrics.json"));
    CHECK(metrics["accuracy"].get<double>() == 1.0);
}

TEST_CASE("run_pipeline exit codes classify the failure") {
    Scratch scratch("tract_equity_pipeline_err");
    auto paths = make_corpus(scratch.dir / "corpus");
    std::string error;

    te::RunConfig cfg;
    cfg.out_dir = scratch.dir / "out";
    // Nothing set: missing parcels is a configuration problem.
    CHECK(te::run_pipeline(cfg, &error) == te::kExitConfig);
    CHECK(error.find("parcels") != std::string::npos);

    cfg.parcels_path = paths.parcels;
    cfg.tracts_path = paths.tracts;
    CHECK(te::run_pipeline(cfg, &error) == te::kExitConfig);  // no priors, no predictions

    cfg.priors_path = paths.surname_priors;
    cfg.predictions_path = paths.predictions;
    CHECK(te::run_pipeline(cfg, &error) == te::kExitConfig);  // both sources
    CHECK(error.find("not both") != std::string::npos);

    cfg.predictions_path.clear();
    cfg.min_properties = 0;
    CHECK(te::run_pipeline(cfg, &error) == te::kExitConfig);
    cfg.min_properties = 10;

    // A parcels file with the wrong header is a parse failure.
    auto bad_parcels = scratch.dir / "bad_parcels.csv";
    std::ofstream(bad_parcels) << "id,tract,value\n1,2,3\n";
    cfg.parcels_path = bad_parcels;
    CHECK(te::run_pipeline(cfg, &error) == te::kExitParse);
    cfg.parcels_path = paths.parcels;

    // Priors without a national row fail during imputation.
    auto bad_priors = scratch.dir / "bad_priors.csv";
    std::ofstream(bad_priors)
        << "surname,p_white,p_black,p_hispanic,p_asian,p_other\nSMITH,1,0,0,0,0\n";
    cfg.priors_path = bad_priors;
    CHECK(te::run_pipeline(cfg, &error) == te::kExitImputation);
    CHECK(error.find("_NATIONAL_") != std::string::npos);
}

TEST_CASE("an over-aggressive property minimum empties the run but succeeds") {
    Scratch scratch("tract_equity_pipeline_empty");
    auto paths = make_corpus(scratch.dir / "corpus");

    te::RunConfig cfg;
    cfg.parcels_path = paths.parcels;
    cfg.tracts_path = paths.tracts;
    cfg.priors_path = paths.surname_priors;
    cfg.out_dir = scratch.dir / "out";
    cfg.min_properties = 100000;

    std::string error;
    CHECK(te::run_pipeline(cfg, &error) == te::kExitOk);
    auto manifest = nlohmann::json::parse(slurp(cfg.out_dir / "manifest.json"));
    CHECK(manifest["counts"]["tracts_after_filter"] == 0);
    CHECK(manifest["counts"]["profiles"] == 0);
    CHECK(manifest["analytics"]["quartile_threshold"].is_null());
}

TEST_CASE("cli entry point honors the exit code contract") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("run-all --help") == 0);
    CHECK(run_cli("") == 2);                  // a subcommand is required
    CHECK(run_cli("no-such-command") == 2);
    CHECK(run_cli("run-all") == 2);           // required flags missing
    CHECK(run_cli("run-all --parcels /nonexistent.csv --tracts /nonexistent.csv "
                  "--priors /nonexistent.csv --out /tmp/tract_equity_cli_test_out") == 2);
}
