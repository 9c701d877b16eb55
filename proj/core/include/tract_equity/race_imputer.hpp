#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "tract_equity/dataset.hpp"
#include "tract_equity/entity_classifier.hpp"
#include "tract_equity/ingest.hpp"
#include "tract_equity/race.hpp"

namespace tract_equity {

// P(race | surname) lookup plus the national P(race) prior. File format:
// surname, p_white, p_black, p_hispanic, p_asian, p_other with one row
// keyed "_NATIONAL_" carrying the national prior.
class SurnamePriorTable {
public:
    static constexpr std::string_view kNationalKey = "_NATIONAL_";

    // Throws Error when the national row is missing or not strictly
    // positive; bad surname rows go to rejects.
    static SurnamePriorTable load(std::istream& in,
                                  std::vector<RejectedRow>* rejects = nullptr);

    void set_national_prior(const RaceDistribution& d);
    void add(std::string surname_upper, const RaceDistribution& d);

    const RaceDistribution* find(std::string_view surname_upper) const;
    const RaceDistribution& national_prior() const { return national_; }
    std::size_t size() const { return priors_.size(); }
    const std::map<std::string, RaceDistribution>& entries() const { return priors_; }

private:
    std::map<std::string, RaceDistribution> priors_;
    RaceDistribution national_ = RaceDistribution::uniform();
};

// P(race | tract), sourced from census population shares.
class GeoPriorTable {
public:
    static GeoPriorTable from_demographics(const std::map<GeoId, TractDemographics>& tracts);

    void add(const GeoId& geoid, const RaceDistribution& d);
    const RaceDistribution* find(const GeoId& geoid) const;
    std::size_t size() const { return priors_.size(); }

private:
    std::map<GeoId, RaceDistribution> priors_;
};

// Which priors actually informed a posterior.
enum class BisgSource {
    SurnameAndGeo,     // full Bayes update
    GeoOnly,           // surname unknown
    SurnameOnly,       // tract unknown
    NationalFallback,  // neither known
};

std::string_view bisg_source_name(BisgSource source);

struct BisgResult {
    RaceDistribution posterior;
    BisgSource source;
};

// posterior_r ∝ P(r|surname) · P(r|tract) / P(r), renormalized. Priors are
// floored at 1e-6 before the product so structurally-zero shares cannot
// produce NaN. Falls back per BisgSource when a table lookup misses.
BisgResult bisg_posterior(std::string_view surname_upper, const GeoId& geoid,
                          const SurnamePriorTable& priors, const GeoPriorTable& geo);

struct PredictionsResult {
    std::map<std::string, RaceDistribution> predictions;  // keyed by parcel_id
    std::vector<RejectedRow> rejects;
};

// Columns: parcel_id, p_white, p_black, p_hispanic, p_asian, p_other.
// Rows whose probabilities fall outside [0,1] or sum outside 1 ± 1e-6 are
// rejected (InvalidDistribution); duplicate parcel_ids keep the first row
// and reject the rest.
PredictionsResult load_predictions(std::istream& in);

// Per-parcel imputation outcome. race is empty for non-individual owners;
// they never receive a race ("NonIndividual" marker).
struct ParcelImputation {
    std::optional<RaceCategory> race;
    RaceDistribution distribution = RaceDistribution::uniform();
    BisgSource source = BisgSource::SurnameAndGeo;

    bool individual() const { return race.has_value(); }
};

using ImputationMap = std::map<std::string, ParcelImputation>;

// Both imputers require owner_type to be filled in (run the entity
// classifier first); they throw Error otherwise.
ImputationMap impute_with_bisg(const Dataset& ds, const SurnamePriorTable& priors,
                               const GeoPriorTable& geo, const EntityRules& rules);

// Throws MissingPredictionError when an individual parcel has no row in
// the predictions map.
ImputationMap impute_with_predictions(
    const Dataset& ds, const std::map<std::string, RaceDistribution>& predictions);

// Emits individual-owner rows in load_predictions format plus
// predicted_race and source columns.
void write_predictions_csv(std::ostream& out, const ImputationMap& imputations);

}  // namespace tract_equity
