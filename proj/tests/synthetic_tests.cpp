#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "tract_equity/csv.hpp"
#include "tract_equity/entity_classifier.hpp"
#include "tract_equity/errors.hpp"
#include "tract_equity/evaluation.hpp"
#include "tract_equity/ingest.hpp"
#include "tract_equity/race_imputer.hpp"
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

te::SyntheticSpec small_spec() {
    te::SyntheticSpec spec;
    spec.n_tracts = 10;
    spec.min_parcels = 30;
    spec.max_parcels = 60;
    return spec;
}

}  // namespace

TEST_CASE("same spec and seed produce byte-identical corpora") {
    Scratch scratch("tract_equity_synth_det");
    auto a = te::generate_synthetic(small_spec(), 99, scratch.dir / "a");
    auto b = te::generate_synthetic(small_spec(), 99, scratch.dir / "b");
    CHECK(slurp(a.parcels) == slurp(b.parcels));
    CHECK(slurp(a.tracts) == slurp(b.tracts));
    CHECK(slurp(a.surname_priors) == slurp(b.surname_priors));
    CHECK(slurp(a.predictions) == slurp(b.predictions));
    CHECK(slurp(a.ground_truth) == slurp(b.ground_truth));
    CHECK(slurp(a.planted_shares) == slurp(b.planted_shares));

    auto c = te::generate_synthetic(small_spec(), 100, scratch.dir / "c");
    CHECK(slurp(a.parcels) != slurp(c.parcels));
}

TEST_CASE("bad specs are refused up front") {
    Scratch scratch("tract_equity_synth_bad");
    auto check_throws = [&](te::SyntheticSpec spec) {
        CHECK_THROWS_AS((void)te::generate_synthetic(spec, 1, scratch.dir), te::InvalidSpecError);
    };
    auto spec = small_spec();
    spec.n_tracts = 0;
    check_throws(spec);
    spec = small_spec();
    spec.min_parcels = 50;
    spec.max_parcels = 10;
    check_throws(spec);
    spec = small_spec();
    spec.min_corporate = 0.8;
    spec.max_corporate = 0.2;
    check_throws(spec);
    spec = small_spec();
    spec.max_corporate = 1.5;
    check_throws(spec);
    spec = small_spec();
    spec.surnames_per_race = 0;
    check_throws(spec);
    spec = small_spec();
    spec.urban_fraction = -0.1;
    check_throws(spec);
}

TEST_CASE("generated corpus parses cleanly and stays self-consistent") {
    Scratch scratch("tract_equity_synth_parse");
    auto paths = te::generate_synthetic(small_spec(), 7, scratch.dir);

    std::ifstream parcels_in(paths.parcels);
    auto parcels = te::parse_parcels(parcels_in);
    CHECK(parcels.rejects.empty());
    CHECK(parcels.records.size() >= 10 * 30);
    CHECK(parcels.records.size() <= 10 * 60);

    std::ifstream tracts_in(paths.tracts);
    auto tracts = te::parse_demographics(tracts_in);
    CHECK(tracts.rejects.empty());
    CHECK(tracts.records.size() == 10);
    for (const auto& t : tracts.records) {
        CHECK(t.pop_share.valid());
        // The generator keeps every group visible in every tract.
        for (double s : t.pop_share.probs) CHECK(s > 0.01);
    }

    std::ifstream priors_in(paths.surname_priors);
    std::vector<te::RejectedRow> prior_rejects;
    auto priors = te::SurnamePriorTable::load(priors_in, &prior_rejects);
    CHECK(prior_rejects.empty());
    CHECK(priors.size() == 5 * 40);

    std::ifstream preds_in(paths.predictions);
    auto preds = te::load_predictions(preds_in);
    CHECK(preds.rejects.empty());

    std::ifstream truth_in(paths.ground_truth);
    auto truth = te::load_ground_truth(truth_in);
    CHECK(truth.rejects.empty());
    CHECK(truth.rows.size() == preds.predictions.size());

    // The planted table, the classifier and the label files must all agree
    // on which parcels are individually owned.
    auto rules = te::EntityRules::defaults();
    std::map<std::string, std::pair<long long, long long>> by_tract;  // {indiv, total}
    std::set<std::string> individual_ids;
    for (const auto& p : parcels.records) {
        auto& [indiv, total] = by_tract[p.geoid.value()];
        ++total;
        if (te::classify_owner(p.owner_name_raw, rules) == te::OwnerClass::Individual) {
            ++indiv;
            individual_ids.insert(p.parcel_id);
        }
    }
    for (const auto& id : individual_ids) {
        CHECK(preds.predictions.count(id) == 1);
    }
    CHECK(individual_ids.size() == preds.predictions.size());

    std::ifstream planted_in(paths.planted_shares);
    te::csv::Reader planted(planted_in);
    auto geo_col = planted.require_column("geoid");
    auto n_col = planted.require_column("n_parcels");
    auto indiv_col = planted.require_column("n_individual");
    te::csv::Row row;
    std::size_t rows = 0;
    while (planted.next(row)) {
        ++rows;
        auto it = by_tract.find(row.fields[geo_col]);
        REQUIRE(it != by_tract.end());
        CHECK(std::to_string(it->second.second) == row.fields[n_col]);
        CHECK(std::to_string(it->second.first) == row.fields[indiv_col]);
    }
    CHECK(rows == 10);

    // Every ground-truth label has a matching prediction row pointing at
    // the same category.
    for (const auto& rec : truth.rows) {
        auto it = preds.predictions.find(rec.record_id);
        REQUIRE(it != preds.predictions.end());
        CHECK(te::argmax_race(it->second) == rec.truth);
    }
}
