#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tract_equity/dataset.hpp"

namespace tract_equity {

// Column-name mappings so callers can adapt to whatever layout their
// assessment roll export uses. Defaults match the schemas documented in
// the README.
struct ParcelSchema {
    char delimiter = ',';
    std::string parcel_id = "parcel_id";
    std::string geoid = "geoid";
    std::string assessed_value = "assessed_value";
    std::string owner_name = "owner_name";
    // Optional column; blank cells mean "not yet classified".
    std::string owner_type = "owner_type";
};

struct DemographicsSchema {
    char delimiter = ',';
    std::string geoid = "geoid";
    std::string total_population = "total_pop";
    std::string share_white = "share_white";
    std::string share_black = "share_black";
    std::string share_hispanic = "share_hispanic";
    std::string share_asian = "share_asian";
    // Optional; when the column is absent the other share is derived as
    // max(0, 1 - sum of the four listed shares).
    std::string share_other = "share_other";
    std::string median_income = "median_income";  // optional
    std::string census_urban = "census_urban";    // optional, defaults false
};

enum class RejectReason {
    MissingField,
    MalformedGeoId,
    BadNumber,
    NegativeValue,
    EmptyOwnerName,
    InvalidOwnerType,
    BadBoolean,
    ShareSumOutOfRange,
    DuplicateGeoId,
    UnknownTract,
    DuplicateParcel,
    InvalidDistribution,
    InvalidRace,
};

std::string_view reject_reason_name(RejectReason reason);

// A row that failed validation. Rows are never silently dropped; every
// input row lands either in the accepted records or here.
struct RejectedRow {
    std::size_t row_number = 0;  // physical line number, header is line 1
    RejectReason reason;
    std::string detail;    // human-readable specifics, not serialized
    std::string raw_line;  // the offending line as read
};

struct ParcelParseResult {
    std::vector<ParcelRecord> records;
    std::vector<RejectedRow> rejects;
};

struct DemographicsParseResult {
    std::vector<TractDemographics> records;
    std::vector<RejectedRow> rejects;
};

// Throws MissingColumnError when a required schema column is absent and
// CsvError on malformed streams; per-row problems go to rejects.
ParcelParseResult parse_parcels(std::istream& in, const ParcelSchema& schema = {});
DemographicsParseResult parse_demographics(std::istream& in,
                                           const DemographicsSchema& schema = {});

struct BuildResult {
    Dataset dataset;
    // Parcels whose geoid has no demographics row. Kept out of the dataset
    // so downstream joins never dangle.
    std::vector<ParcelRecord> quarantined;
};

BuildResult build_dataset(std::vector<ParcelRecord> parcels,
                          std::vector<TractDemographics> tracts);

struct FilterResult {
    Dataset dataset;
    std::size_t excluded_tracts = 0;
    std::size_t excluded_parcels = 0;
};

// Drops tracts with fewer than min_properties parcels (exactly
// min_properties is kept) along with their parcels. Idempotent.
FilterResult filter_small_tracts(const Dataset& ds, std::size_t min_properties = 100);

void write_parcels_csv(std::ostream& out, const std::vector<ParcelRecord>& parcels);
void write_demographics_csv(std::ostream& out, const std::vector<TractDemographics>& tracts);
// Columns: row_number, reason, raw_line. A zero row_number means the row
// was synthesized after parsing (e.g. quarantined parcels).
void write_rejects_csv(std::ostream& out, const std::vector<RejectedRow>& rejects);

// Renders a parcel the same way write_parcels_csv would, for reject
// reporting of quarantined records.
std::string parcel_to_line(const ParcelRecord& parcel);

}  // namespace tract_equity
