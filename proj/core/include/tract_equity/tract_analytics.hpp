#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "tract_equity/dataset.hpp"
#include "tract_equity/race.hpp"
#include "tract_equity/race_imputer.hpp"

namespace tract_equity {

// Per-tract ownership rollup. Race shares are over individual owners only;
// corporate_share is over all properties. value_total covers every parcel
// in the tract, owner_value_by_race only individually-owned ones.
struct TractOwnershipProfile {
    GeoId geoid;
    std::size_t n_properties = 0;
    std::size_t n_individual = 0;
    std::size_t n_corporate_like = 0;  // owner class corporate/government/trust
    std::array<std::size_t, kRaceCount> owner_count_by_race{};
    std::array<double, kRaceCount> owner_value_by_race{};
    double corporate_share = 0.0;
    // All zero when n_individual == 0 (shares undefined without owners).
    std::array<double, kRaceCount> indiv_share_by_race{};
    double value_total = 0.0;
};

// Throws EmptyInputError on an empty span, MixedGeoidsError when parcels
// span tracts, MissingPredictionError when an individual parcel has no
// imputation entry. Owners are counted under their argmax race.
TractOwnershipProfile aggregate_tract(std::span<const ParcelRecord> parcels,
                                      const ImputationMap& imputations);

// Groups parcels by geoid and aggregates each tract.
std::map<GeoId, TractOwnershipProfile> aggregate_dataset(const Dataset& ds,
                                                         const ImputationMap& imputations);

struct DisparityRecord {
    GeoId geoid;
    RaceCategory race;
    double pop_share = 0.0;
    double owner_share = 0.0;  // of individual owners
    double disparity = 0.0;    // owner_share - pop_share
    long long weight = 0;      // tract total population
};

// Five records in canonical race order. Throws GeoidMismatchError.
std::vector<DisparityRecord> disparity(const TractOwnershipProfile& profile,
                                       const TractDemographics& demo);

enum class MajorityGroup { White = 0, Black, Hispanic, Asian, Mixed };
inline constexpr std::size_t kMajorityGroupCount = 5;

std::string_view majority_group_name(MajorityGroup g);

// Strict majority: group g iff pop_share(g) > 0.5 among the four named
// groups; anything else (including majority-Other tracts) is Mixed.
MajorityGroup classify_majority(const TractDemographics& demo);

// Plurality variant: the largest of the four named shares wins with no
// 50% requirement; exact ties are Mixed.
MajorityGroup classify_dominant(const TractDemographics& demo);

enum class GroupingMode { Majority, Dominant };
enum class TableWeighting { Unweighted, PopulationWeighted };

struct GroupProfileRow {
    MajorityGroup group;
    std::size_t tract_count = 0;
    std::array<double, kRaceCount> mean_pop_share{};
    std::array<double, kRaceCount> mean_owner_share{};
};

// Mean population and individual-owner shares per tract group, over the
// inner join of profiles and demographics. Always returns five rows in
// MajorityGroup order. Tracts with no individual owners contribute to
// population means and tract_count but not to owner-share means.
std::vector<GroupProfileRow> majority_profile_table(
    const std::map<GeoId, TractOwnershipProfile>& profiles,
    const std::map<GeoId, TractDemographics>& tracts,
    GroupingMode mode = GroupingMode::Majority,
    TableWeighting weighting = TableWeighting::Unweighted);

enum class ExtremeOwnershipMode { IndividualOnly, CombinedWithCorp };

struct ExtremeDisparityRow {
    GeoId geoid;
    double white_pop_share = 0.0;
    double white_owner_share = 0.0;  // individual share or combined, per mode
    double gap = 0.0;                // owner_share - pop_share
};

// Tracts where White population share < white_pop_max and the White
// ownership measure >= white_owner_min, sorted by gap descending (geoid
// ascending on ties).
std::vector<ExtremeDisparityRow> find_extreme_disparity(
    const std::map<GeoId, TractOwnershipProfile>& profiles,
    const std::map<GeoId, TractDemographics>& tracts, double white_pop_max = 0.5,
    double white_owner_min = 0.40,
    ExtremeOwnershipMode mode = ExtremeOwnershipMode::IndividualOnly);

// corporate_share + (1 - corporate_share) * White individual share.
double combined_white_corp(const TractOwnershipProfile& profile);

// (1 - corporate_share) * individual share of the race: the race's share
// of ALL properties in the tract.
double race_share_of_all(const TractOwnershipProfile& profile, RaceCategory race);

enum class UrbanClass { UrbanCore = 0, SuburbanUrban, Rural };

std::string_view urban_class_name(UrbanClass c);

// 75th-percentile property count across profiles (linear interpolation
// between order statistics). Throws EmptyInputError.
double property_count_quartile_threshold(
    const std::map<GeoId, TractOwnershipProfile>& profiles);

// Rural iff not census_urban; UrbanCore iff census_urban and
// n_properties >= quartile_threshold; SuburbanUrban otherwise.
UrbanClass classify_urbanization(const TractOwnershipProfile& profile,
                                 const TractDemographics& demo, double quartile_threshold);

// Share of total individually-owned assessed value held by each race.
// Throws EmptyInputError on empty input, ZeroTotalValueError when no
// individually-owned value exists.
std::array<double, kRaceCount> value_share_by_race(
    const std::map<GeoId, TractOwnershipProfile>& profiles);

void write_profiles_csv(std::ostream& out,
                        const std::map<GeoId, TractOwnershipProfile>& profiles);
void write_disparity_csv(std::ostream& out, const std::vector<DisparityRecord>& records);

struct ProfilesLoadResult {
    std::map<GeoId, TractOwnershipProfile> profiles;
    std::vector<RejectedRow> rejects;
};

// Reads the write_profiles_csv layout back; bad rows are rejected, not
// fatal. Values round-trip exactly.
ProfilesLoadResult load_profiles(std::istream& in);

}  // namespace tract_equity
