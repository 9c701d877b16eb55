#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tract_equity/entity_classifier.hpp"
#include "tract_equity/geoid.hpp"
#include "tract_equity/race.hpp"

namespace tract_equity {

// One property record from an assessment roll or deed registry.
struct ParcelRecord {
    std::string parcel_id;
    GeoId geoid;
    double assessed_value = 0.0;  // USD, >= 0
    std::string owner_name_raw;   // nonempty after trimming
    std::optional<OwnerClass> owner_type;  // filled by entity classification
};

// Per-tract resident demographics from census + ACS extracts.
struct TractDemographics {
    GeoId geoid;
    long long total_population = 0;
    RaceDistribution pop_share;  // sums to 1 when total_population > 0
    std::optional<double> median_income;  // USD
    bool census_urban = false;
};

// Joined view of one study region. Immutable after construction; the tract
// map is ordered so iteration (and therefore every report) is deterministic.
struct Dataset {
    std::vector<ParcelRecord> parcels;
    std::map<GeoId, TractDemographics> tracts;
};

}  // namespace tract_equity
