#include "tract_equity/ingest.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

#include "tract_equity/csv.hpp"
#include "tract_equity/entity_classifier.hpp"
#include "tract_equity/errors.hpp"
#include "tract_equity/log.hpp"

namespace tract_equity {

namespace {

constexpr double kShareSumTolerance = 0.005;  // shares may miss 1.0 by half a percent

std::string field_count_detail(std::size_t expected, std::size_t got) {
    return "expected " + std::to_string(expected) + " fields, got " + std::to_string(got);
}

void reject(std::vector<RejectedRow>& rejects, const csv::Row& row, RejectReason reason,
            std::string detail) {
    rejects.push_back(RejectedRow{row.line_number, reason, std::move(detail), row.raw});
}

}  // namespace

std::string_view reject_reason_name(RejectReason reason) {
    switch (reason) {
        case RejectReason::MissingField: return "MissingField";
        case RejectReason::MalformedGeoId: return "MalformedGeoId";
        case RejectReason::BadNumber: return "BadNumber";
        case RejectReason::NegativeValue: return "NegativeValue";
        case RejectReason::EmptyOwnerName: return "EmptyOwnerName";
        case RejectReason::InvalidOwnerType: return "InvalidOwnerType";
        case RejectReason::BadBoolean: return "BadBoolean";
        case RejectReason::ShareSumOutOfRange: return "ShareSumOutOfRange";
        case RejectReason::DuplicateGeoId: return "DuplicateGeoId";
        case RejectReason::UnknownTract: return "UnknownTract";
        case RejectReason::DuplicateParcel: return "DuplicateParcel";
        case RejectReason::InvalidDistribution: return "InvalidDistribution";
        case RejectReason::InvalidRace: return "InvalidRace";
    }
    return "Unknown";
}

ParcelParseResult parse_parcels(std::istream& in, const ParcelSchema& schema) {
    csv::Reader reader(in, schema.delimiter);
    const std::size_t id_col = reader.require_column(schema.parcel_id);
    const std::size_t geo_col = reader.require_column(schema.geoid);
    const std::size_t value_col = reader.require_column(schema.assessed_value);
    const std::size_t name_col = reader.require_column(schema.owner_name);
    const std::optional<std::size_t> type_col = reader.find_column(schema.owner_type);
    const std::size_t width = reader.header().size();

    ParcelParseResult result;
    csv::Row row;
    while (reader.next(row)) {
        if (row.fields.size() != width) {
            reject(result.rejects, row, RejectReason::MissingField,
                   field_count_detail(width, row.fields.size()));
            continue;
        }
        std::string parcel_id{csv::trim(row.fields[id_col])};
        if (parcel_id.empty()) {
            reject(result.rejects, row, RejectReason::MissingField, "empty parcel_id");
            continue;
        }
        auto geoid = GeoId::parse(row.fields[geo_col]);
        if (!geoid) {
            reject(result.rejects, row, RejectReason::MalformedGeoId, row.fields[geo_col]);
            continue;
        }
        auto value = csv::parse_double(csv::trim(row.fields[value_col]));
        if (!value || !std::isfinite(*value)) {
            reject(result.rejects, row, RejectReason::BadNumber,
                   "assessed_value: " + row.fields[value_col]);
            continue;
        }
        if (*value < 0) {
            reject(result.rejects, row, RejectReason::NegativeValue,
                   "assessed_value: " + row.fields[value_col]);
            continue;
        }
        std::string owner_name{csv::trim(row.fields[name_col])};
        if (owner_name.empty()) {
            reject(result.rejects, row, RejectReason::EmptyOwnerName, "");
            continue;
        }
        std::optional<OwnerClass> owner_type;
        if (type_col) {
            std::string cell = std::string(csv::trim(row.fields[*type_col]));
            if (!cell.empty()) {
                auto code = csv::parse_int(cell);
                auto cls = code ? owner_class_from_code(static_cast<int>(*code)) : std::nullopt;
                if (!cls) {
                    reject(result.rejects, row, RejectReason::InvalidOwnerType, cell);
                    continue;
                }
                owner_type = *cls;
            }
        }
        result.records.push_back(ParcelRecord{std::move(parcel_id), *geoid, *value,
                                              std::move(owner_name), owner_type});
    }
    return result;
}

DemographicsParseResult parse_demographics(std::istream& in, const DemographicsSchema& schema) {
    csv::Reader reader(in, schema.delimiter);
    const std::size_t geo_col = reader.require_column(schema.geoid);
    const std::size_t pop_col = reader.require_column(schema.total_population);
    const std::array<std::size_t, 4> share_cols = {
        reader.require_column(schema.share_white),
        reader.require_column(schema.share_black),
        reader.require_column(schema.share_hispanic),
        reader.require_column(schema.share_asian),
    };
    const std::optional<std::size_t> other_col = reader.find_column(schema.share_other);
    const std::optional<std::size_t> income_col = reader.find_column(schema.median_income);
    const std::optional<std::size_t> urban_col = reader.find_column(schema.census_urban);
    const std::size_t width = reader.header().size();

    DemographicsParseResult result;
    std::set<GeoId> seen;
    csv::Row row;
    while (reader.next(row)) {
        if (row.fields.size() != width) {
            reject(result.rejects, row, RejectReason::MissingField,
                   field_count_detail(width, row.fields.size()));
            continue;
        }
        auto geoid = GeoId::parse(row.fields[geo_col]);
        if (!geoid) {
            reject(result.rejects, row, RejectReason::MalformedGeoId, row.fields[geo_col]);
            continue;
        }
        if (!seen.insert(*geoid).second) {
            reject(result.rejects, row, RejectReason::DuplicateGeoId, geoid->value());
            continue;
        }
        auto pop = csv::parse_int(csv::trim(row.fields[pop_col]));
        if (!pop) {
            reject(result.rejects, row, RejectReason::BadNumber,
                   "total_pop: " + row.fields[pop_col]);
            seen.erase(*geoid);
            continue;
        }
        if (*pop < 0) {
            reject(result.rejects, row, RejectReason::NegativeValue,
                   "total_pop: " + row.fields[pop_col]);
            seen.erase(*geoid);
            continue;
        }
        std::array<double, kRaceCount> shares{};
        bool bad = false;
        for (std::size_t i = 0; i < share_cols.size(); ++i) {
            auto v = csv::parse_double(csv::trim(row.fields[share_cols[i]]));
            if (!v || !std::isfinite(*v)) {
                reject(result.rejects, row, RejectReason::BadNumber,
                       "share: " + row.fields[share_cols[i]]);
                bad = true;
                break;
            }
            if (*v < 0) {
                reject(result.rejects, row, RejectReason::NegativeValue,
                       "share: " + row.fields[share_cols[i]]);
                bad = true;
                break;
            }
            shares[i] = *v;
        }
        if (bad) {
            seen.erase(*geoid);
            continue;
        }
        double sum4 = shares[0] + shares[1] + shares[2] + shares[3];
        if (other_col) {
            auto v = csv::parse_double(csv::trim(row.fields[*other_col]));
            if (!v || !std::isfinite(*v) || *v < 0) {
                reject(result.rejects, row,
                       (v && std::isfinite(*v)) ? RejectReason::NegativeValue
                                                : RejectReason::BadNumber,
                       "share_other: " + row.fields[*other_col]);
                seen.erase(*geoid);
                continue;
            }
            shares[4] = *v;
        } else {
            shares[4] = std::max(0.0, 1.0 - sum4);
        }
        double sum = sum4 + shares[4];
        RaceDistribution pop_share = RaceDistribution::uniform();
        if (std::abs(sum - 1.0) <= kShareSumTolerance) {
            for (double& s : shares) s /= sum;
            pop_share = RaceDistribution{shares};
        } else if (*pop == 0) {
            // Shares of an empty tract carry no information; keep the row
            // with the flat distribution so invariants hold downstream.
        } else {
            std::ostringstream detail;
            detail << "shares sum to " << sum;
            reject(result.rejects, row, RejectReason::ShareSumOutOfRange, detail.str());
            seen.erase(*geoid);
            continue;
        }

        std::optional<double> median_income;
        if (income_col) {
            std::string_view cell = csv::trim(row.fields[*income_col]);
            if (!cell.empty()) {
                auto v = csv::parse_double(cell);
                if (!v || !std::isfinite(*v)) {
                    reject(result.rejects, row, RejectReason::BadNumber,
                           "median_income: " + row.fields[*income_col]);
                    seen.erase(*geoid);
                    continue;
                }
                if (*v < 0) {
                    reject(result.rejects, row, RejectReason::NegativeValue,
                           "median_income: " + row.fields[*income_col]);
                    seen.erase(*geoid);
                    continue;
                }
                median_income = *v;
            }
        }
        bool census_urban = false;
        if (urban_col) {
            std::string_view cell = csv::trim(row.fields[*urban_col]);
            if (!cell.empty()) {
                auto v = csv::parse_bool(cell);
                if (!v) {
                    reject(result.rejects, row, RejectReason::BadBoolean,
                           "census_urban: " + row.fields[*urban_col]);
                    seen.erase(*geoid);
                    continue;
                }
                census_urban = *v;
            }
        }
        result.records.push_back(
            TractDemographics{*geoid, *pop, pop_share, median_income, census_urban});
    }
    return result;
}

BuildResult build_dataset(std::vector<ParcelRecord> parcels,
                          std::vector<TractDemographics> tracts) {
    BuildResult result;
    for (TractDemographics& t : tracts) {
        result.dataset.tracts.emplace(t.geoid, std::move(t));
    }
    for (ParcelRecord& p : parcels) {
        if (result.dataset.tracts.count(p.geoid) > 0) {
            result.dataset.parcels.push_back(std::move(p));
        } else {
            result.quarantined.push_back(std::move(p));
        }
    }
    if (!result.quarantined.empty() && log::enabled(log::Level::Warn)) {
        log::warn(std::to_string(result.quarantined.size()) +
                  " parcels reference tracts with no demographics row");
    }
    return result;
}

FilterResult filter_small_tracts(const Dataset& ds, std::size_t min_properties) {
    std::map<GeoId, std::size_t> counts;
    for (const ParcelRecord& p : ds.parcels) ++counts[p.geoid];

    FilterResult result;
    for (const auto& [geoid, demo] : ds.tracts) {
        auto it = counts.find(geoid);
        std::size_t n = it == counts.end() ? 0 : it->second;
        if (n >= min_properties) {
            result.dataset.tracts.emplace(geoid, demo);
        } else {
            ++result.excluded_tracts;
            result.excluded_parcels += n;
        }
    }
    for (const ParcelRecord& p : ds.parcels) {
        if (result.dataset.tracts.count(p.geoid) > 0) result.dataset.parcels.push_back(p);
    }
    return result;
}

namespace {

void write_parcel_row(csv::Writer& w, const ParcelRecord& p) {
    w.write_row({p.parcel_id, p.geoid.value(), csv::format_double(p.assessed_value),
                 p.owner_name_raw,
                 p.owner_type ? std::to_string(static_cast<int>(*p.owner_type)) : ""});
}

}  // namespace

void write_parcels_csv(std::ostream& out, const std::vector<ParcelRecord>& parcels) {
    csv::Writer w(out);
    w.write_row({"parcel_id", "geoid", "assessed_value", "owner_name", "owner_type"});
    for (const ParcelRecord& p : parcels) write_parcel_row(w, p);
}

void write_demographics_csv(std::ostream& out, const std::vector<TractDemographics>& tracts) {
    csv::Writer w(out);
    w.write_row({"geoid", "total_pop", "share_white", "share_black", "share_hispanic",
                 "share_asian", "share_other", "median_income", "census_urban"});
    for (const TractDemographics& t : tracts) {
        w.write_row({t.geoid.value(), std::to_string(t.total_population),
                     csv::format_double(t.pop_share[RaceCategory::White]),
                     csv::format_double(t.pop_share[RaceCategory::Black]),
                     csv::format_double(t.pop_share[RaceCategory::Hispanic]),
                     csv::format_double(t.pop_share[RaceCategory::Asian]),
                     csv::format_double(t.pop_share[RaceCategory::Other]),
                     t.median_income ? csv::format_double(*t.median_income) : "",
                     t.census_urban ? "1" : "0"});
    }
}

void write_rejects_csv(std::ostream& out, const std::vector<RejectedRow>& rejects) {
    csv::Writer w(out);
    w.write_row({"row_number", "reason", "raw_line"});
    for (const RejectedRow& r : rejects) {
        w.write_row({std::to_string(r.row_number), std::string(reject_reason_name(r.reason)),
                     r.raw_line});
    }
}

std::string parcel_to_line(const ParcelRecord& parcel) {
    std::ostringstream out;
    csv::Writer w(out);
    write_parcel_row(w, parcel);
    std::string line = out.str();
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r')) line.pop_back();
    return line;
}

}  // namespace tract_equity
