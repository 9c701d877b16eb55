#include "tract_equity/tract_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "tract_equity/csv.hpp"
#include "tract_equity/errors.hpp"

namespace tract_equity {

namespace {

OwnerClass owner_type_or_throw(const ParcelRecord& p) {
    if (!p.owner_type) {
        throw Error("parcel " + p.parcel_id +
                    " has no owner classification; run the entity classifier first");
    }
    return *p.owner_type;
}

}  // namespace

TractOwnershipProfile aggregate_tract(std::span<const ParcelRecord> parcels,
                                      const ImputationMap& imputations) {
    if (parcels.empty()) throw EmptyInputError("aggregate_tract: no parcels");

    TractOwnershipProfile profile{parcels.front().geoid};
    for (const ParcelRecord& p : parcels) {
        if (p.geoid != profile.geoid) {
            throw MixedGeoidsError("aggregate_tract: parcels span " + profile.geoid.value() +
                                   " and " + p.geoid.value());
        }
        ++profile.n_properties;
        profile.value_total += p.assessed_value;
        if (owner_type_or_throw(p) == OwnerClass::Individual) {
            auto it = imputations.find(p.parcel_id);
            if (it == imputations.end() || !it->second.individual()) {
                throw MissingPredictionError(p.parcel_id);
            }
            ++profile.n_individual;
            auto race = static_cast<std::size_t>(*it->second.race);
            ++profile.owner_count_by_race[race];
            profile.owner_value_by_race[race] += p.assessed_value;
        } else {
            ++profile.n_corporate_like;
        }
    }
    profile.corporate_share =
        static_cast<double>(profile.n_corporate_like) / static_cast<double>(profile.n_properties);
    if (profile.n_individual > 0) {
        for (std::size_t i = 0; i < kRaceCount; ++i) {
            profile.indiv_share_by_race[i] = static_cast<double>(profile.owner_count_by_race[i]) /
                                             static_cast<double>(profile.n_individual);
        }
    }
    return profile;
}

std::map<GeoId, TractOwnershipProfile> aggregate_dataset(const Dataset& ds,
                                                         const ImputationMap& imputations) {
    std::map<GeoId, std::vector<ParcelRecord>> by_tract;
    for (const ParcelRecord& p : ds.parcels) by_tract[p.geoid].push_back(p);

    std::map<GeoId, TractOwnershipProfile> profiles;
    for (const auto& [geoid, parcels] : by_tract) {
        profiles.emplace(geoid, aggregate_tract(parcels, imputations));
    }
    return profiles;
}

std::vector<DisparityRecord> disparity(const TractOwnershipProfile& profile,
                                       const TractDemographics& demo) {
    if (profile.geoid != demo.geoid) {
        throw GeoidMismatchError("disparity: profile " + profile.geoid.value() +
                                 " does not match demographics " + demo.geoid.value());
    }
    std::vector<DisparityRecord> records;
    records.reserve(kRaceCount);
    for (RaceCategory race : kAllRaces) {
        double pop = demo.pop_share[race];
        double own = profile.indiv_share_by_race[static_cast<std::size_t>(race)];
        records.push_back(
            DisparityRecord{profile.geoid, race, pop, own, own - pop, demo.total_population});
    }
    return records;
}

std::string_view majority_group_name(MajorityGroup g) {
    switch (g) {
        case MajorityGroup::White: return "white";
        case MajorityGroup::Black: return "black";
        case MajorityGroup::Hispanic: return "hispanic";
        case MajorityGroup::Asian: return "asian";
        case MajorityGroup::Mixed: return "mixed";
    }
    return "unknown";
}

MajorityGroup classify_majority(const TractDemographics& demo) {
    static constexpr std::array<std::pair<RaceCategory, MajorityGroup>, 4> kNamed = {{
        {RaceCategory::White, MajorityGroup::White},
        {RaceCategory::Black, MajorityGroup::Black},
        {RaceCategory::Hispanic, MajorityGroup::Hispanic},
        {RaceCategory::Asian, MajorityGroup::Asian},
    }};
    for (auto [race, group] : kNamed) {
        if (demo.pop_share[race] > 0.5) return group;
    }
    return MajorityGroup::Mixed;
}

MajorityGroup classify_dominant(const TractDemographics& demo) {
    static constexpr std::array<std::pair<RaceCategory, MajorityGroup>, 4> kNamed = {{
        {RaceCategory::White, MajorityGroup::White},
        {RaceCategory::Black, MajorityGroup::Black},
        {RaceCategory::Hispanic, MajorityGroup::Hispanic},
        {RaceCategory::Asian, MajorityGroup::Asian},
    }};
    MajorityGroup best = MajorityGroup::Mixed;
    double best_share = -1.0;
    bool tied = false;
    for (auto [race, group] : kNamed) {
        double share = demo.pop_share[race];
        if (share > best_share) {
            best_share = share;
            best = group;
            tied = false;
        } else if (share == best_share) {
            tied = true;
        }
    }
    return tied ? MajorityGroup::Mixed : best;
}

std::vector<GroupProfileRow> majority_profile_table(
    const std::map<GeoId, TractOwnershipProfile>& profiles,
    const std::map<GeoId, TractDemographics>& tracts, GroupingMode mode,
    TableWeighting weighting) {
    std::array<GroupProfileRow, kMajorityGroupCount> rows{};
    std::array<double, kMajorityGroupCount> pop_weight_sum{};
    std::array<double, kMajorityGroupCount> owner_weight_sum{};
    for (std::size_t g = 0; g < kMajorityGroupCount; ++g) {
        rows[g].group = static_cast<MajorityGroup>(g);
    }

    for (const auto& [geoid, profile] : profiles) {
        auto it = tracts.find(geoid);
        if (it == tracts.end()) continue;
        const TractDemographics& demo = it->second;
        MajorityGroup group = mode == GroupingMode::Majority ? classify_majority(demo)
                                                             : classify_dominant(demo);
        auto g = static_cast<std::size_t>(group);
        double w = weighting == TableWeighting::Unweighted
                       ? 1.0
                       : static_cast<double>(demo.total_population);
        if (w <= 0.0) w = 0.0;

        ++rows[g].tract_count;
        pop_weight_sum[g] += w;
        for (std::size_t r = 0; r < kRaceCount; ++r) {
            rows[g].mean_pop_share[r] += w * demo.pop_share.probs[r];
        }
        if (profile.n_individual > 0) {
            owner_weight_sum[g] += w;
            for (std::size_t r = 0; r < kRaceCount; ++r) {
                rows[g].mean_owner_share[r] += w * profile.indiv_share_by_race[r];
            }
        }
    }

    for (std::size_t g = 0; g < kMajorityGroupCount; ++g) {
        if (pop_weight_sum[g] > 0.0) {
            for (double& v : rows[g].mean_pop_share) v /= pop_weight_sum[g];
        }
        if (owner_weight_sum[g] > 0.0) {
            for (double& v : rows[g].mean_owner_share) v /= owner_weight_sum[g];
        }
    }
    return std::vector<GroupProfileRow>(rows.begin(), rows.end());
}

double combined_white_corp(const TractOwnershipProfile& profile) {
    return profile.corporate_share +
           (1.0 - profile.corporate_share) *
               profile.indiv_share_by_race[static_cast<std::size_t>(RaceCategory::White)];
}

double race_share_of_all(const TractOwnershipProfile& profile, RaceCategory race) {
    return (1.0 - profile.corporate_share) *
           profile.indiv_share_by_race[static_cast<std::size_t>(race)];
}

std::vector<ExtremeDisparityRow> find_extreme_disparity(
    const std::map<GeoId, TractOwnershipProfile>& profiles,
    const std::map<GeoId, TractDemographics>& tracts, double white_pop_max,
    double white_owner_min, ExtremeOwnershipMode mode) {
    std::vector<ExtremeDisparityRow> rows;
    for (const auto& [geoid, profile] : profiles) {
        auto it = tracts.find(geoid);
        if (it == tracts.end()) continue;
        double pop = it->second.pop_share[RaceCategory::White];
        double own = mode == ExtremeOwnershipMode::IndividualOnly
                         ? profile.indiv_share_by_race[static_cast<std::size_t>(RaceCategory::White)]
                         : combined_white_corp(profile);
        if (pop < white_pop_max && own >= white_owner_min) {
            rows.push_back(ExtremeDisparityRow{geoid, pop, own, own - pop});
        }
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
        if (a.gap != b.gap) return a.gap > b.gap;
        return a.geoid < b.geoid;
    });
    return rows;
}

std::string_view urban_class_name(UrbanClass c) {
    switch (c) {
        case UrbanClass::UrbanCore: return "urban_core";
        case UrbanClass::SuburbanUrban: return "suburban_urban";
        case UrbanClass::Rural: return "rural";
    }
    return "unknown";
}

double property_count_quartile_threshold(
    const std::map<GeoId, TractOwnershipProfile>& profiles) {
    if (profiles.empty()) throw EmptyInputError("quartile threshold of empty profile set");
    std::vector<double> counts;
    counts.reserve(profiles.size());
    for (const auto& [geoid, p] : profiles) counts.push_back(static_cast<double>(p.n_properties));
    std::sort(counts.begin(), counts.end());
    // Linear interpolation between order statistics at quantile 0.75.
    double pos = 0.75 * static_cast<double>(counts.size() - 1);
    auto lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= counts.size()) return counts.back();
    return counts[lo] + frac * (counts[lo + 1] - counts[lo]);
}

UrbanClass classify_urbanization(const TractOwnershipProfile& profile,
                                 const TractDemographics& demo, double quartile_threshold) {
    if (!demo.census_urban) return UrbanClass::Rural;
    if (static_cast<double>(profile.n_properties) >= quartile_threshold) {
        return UrbanClass::UrbanCore;
    }
    return UrbanClass::SuburbanUrban;
}

std::array<double, kRaceCount> value_share_by_race(
    const std::map<GeoId, TractOwnershipProfile>& profiles) {
    if (profiles.empty()) throw EmptyInputError("value shares of empty profile set");
    std::array<double, kRaceCount> totals{};
    double grand = 0.0;
    for (const auto& [geoid, p] : profiles) {
        for (std::size_t r = 0; r < kRaceCount; ++r) {
            totals[r] += p.owner_value_by_race[r];
            grand += p.owner_value_by_race[r];
        }
    }
    if (grand <= 0.0) throw ZeroTotalValueError();
    for (double& v : totals) v /= grand;
    return totals;
}

void write_profiles_csv(std::ostream& out,
                        const std::map<GeoId, TractOwnershipProfile>& profiles) {
    csv::Writer w(out);
    w.write_row({"geoid", "n_properties", "n_individual", "n_corporate_like", "corporate_share",
                 "count_white", "count_black", "count_hispanic", "count_asian", "count_other",
                 "share_white", "share_black", "share_hispanic", "share_asian", "share_other",
                 "value_white", "value_black", "value_hispanic", "value_asian", "value_other",
                 "value_total"});
    for (const auto& [geoid, p] : profiles) {
        std::vector<std::string> fields = {geoid.value(), std::to_string(p.n_properties),
                                           std::to_string(p.n_individual),
                                           std::to_string(p.n_corporate_like),
                                           csv::format_double(p.corporate_share)};
        for (std::size_t r = 0; r < kRaceCount; ++r)
            fields.push_back(std::to_string(p.owner_count_by_race[r]));
        for (std::size_t r = 0; r < kRaceCount; ++r)
            fields.push_back(csv::format_double(p.indiv_share_by_race[r]));
        for (std::size_t r = 0; r < kRaceCount; ++r)
            fields.push_back(csv::format_double(p.owner_value_by_race[r]));
        fields.push_back(csv::format_double(p.value_total));
        w.write_row(fields);
    }
}

void write_disparity_csv(std::ostream& out, const std::vector<DisparityRecord>& records) {
    csv::Writer w(out);
    w.write_row({"geoid", "race", "pop_share", "owner_share", "disparity", "weight"});
    for (const DisparityRecord& rec : records) {
        w.write_row({rec.geoid.value(), std::string(race_name(rec.race)),
                     csv::format_double(rec.pop_share), csv::format_double(rec.owner_share),
                     csv::format_double(rec.disparity), std::to_string(rec.weight)});
    }
}

ProfilesLoadResult load_profiles(std::istream& in) {
    csv::Reader reader(in);
    const std::size_t geo_col = reader.require_column("geoid");
    const std::size_t props_col = reader.require_column("n_properties");
    const std::size_t indiv_col = reader.require_column("n_individual");
    const std::size_t corp_col = reader.require_column("n_corporate_like");
    const std::size_t corp_share_col = reader.require_column("corporate_share");
    std::array<std::size_t, kRaceCount> count_cols{}, share_cols{}, value_cols{};
    for (RaceCategory r : kAllRaces) {
        auto i = static_cast<std::size_t>(r);
        std::string suffix(race_name(r));
        count_cols[i] = reader.require_column("count_" + suffix);
        share_cols[i] = reader.require_column("share_" + suffix);
        value_cols[i] = reader.require_column("value_" + suffix);
    }
    const std::size_t total_col = reader.require_column("value_total");
    const std::size_t width = reader.header().size();

    ProfilesLoadResult result;
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
        auto geoid = GeoId::parse(row.fields[geo_col]);
        if (!geoid) {
            fail(RejectReason::MalformedGeoId, row.fields[geo_col]);
            continue;
        }
        TractOwnershipProfile p{*geoid};
        bool bad = false;
        auto read_count = [&](std::size_t col, std::size_t& out) {
            auto v = csv::parse_int(csv::trim(row.fields[col]));
            if (!v || *v < 0) {
                fail(RejectReason::BadNumber, row.fields[col]);
                bad = true;
                return;
            }
            out = static_cast<std::size_t>(*v);
        };
        auto read_double = [&](std::size_t col, double& out) {
            auto v = csv::parse_double(csv::trim(row.fields[col]));
            if (!v || !std::isfinite(*v)) {
                fail(RejectReason::BadNumber, row.fields[col]);
                bad = true;
                return;
            }
            out = *v;
        };
        read_count(props_col, p.n_properties);
        if (!bad) read_count(indiv_col, p.n_individual);
        if (!bad) read_count(corp_col, p.n_corporate_like);
        if (!bad) read_double(corp_share_col, p.corporate_share);
        for (std::size_t r = 0; !bad && r < kRaceCount; ++r) {
            read_count(count_cols[r], p.owner_count_by_race[r]);
            if (!bad) read_double(share_cols[r], p.indiv_share_by_race[r]);
            if (!bad) read_double(value_cols[r], p.owner_value_by_race[r]);
        }
        if (!bad) read_double(total_col, p.value_total);
        if (bad) continue;
        if (!result.profiles.emplace(*geoid, std::move(p)).second) {
            fail(RejectReason::DuplicateGeoId, geoid->value());
        }
    }
    return result;
}

}  // namespace tract_equity
