#include "tract_equity/race_imputer.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "tract_equity/csv.hpp"
#include "tract_equity/errors.hpp"
#include "tract_equity/log.hpp"

namespace tract_equity {

namespace {

constexpr double kPriorFloor = 1e-6;
constexpr double kPredictionSumTolerance = 1e-6;

// Parses five probability cells starting at the given column indices.
// Returns false (with a reject reason in *why) when any entry is not a
// finite number in [0,1].
bool parse_probs(const csv::Row& row, const std::array<std::size_t, kRaceCount>& cols,
                 std::array<double, kRaceCount>& out, std::string& why) {
    for (std::size_t i = 0; i < kRaceCount; ++i) {
        auto v = csv::parse_double(csv::trim(row.fields[cols[i]]));
        if (!v || !std::isfinite(*v) || *v < 0.0 || *v > 1.0) {
            why = "probability out of range: " + row.fields[cols[i]];
            return false;
        }
        out[i] = *v;
    }
    return true;
}

}  // namespace

SurnamePriorTable SurnamePriorTable::load(std::istream& in,
                                          std::vector<RejectedRow>* rejects) {
    csv::Reader reader(in);
    const std::size_t name_col = reader.require_column("surname");
    const std::array<std::size_t, kRaceCount> prob_cols = {
        reader.require_column("p_white"),    reader.require_column("p_black"),
        reader.require_column("p_hispanic"), reader.require_column("p_asian"),
        reader.require_column("p_other"),
    };
    const std::size_t width = reader.header().size();

    SurnamePriorTable table;
    bool have_national = false;
    csv::Row row;
    while (reader.next(row)) {
        auto fail = [&](RejectReason reason, std::string detail) {
            if (rejects != nullptr) {
                rejects->push_back(
                    RejectedRow{row.line_number, reason, std::move(detail), row.raw});
            }
        };
        if (row.fields.size() != width) {
            fail(RejectReason::MissingField, "wrong field count");
            continue;
        }
        std::string surname;
        for (char c : csv::trim(row.fields[name_col])) {
            surname.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
        if (surname.empty()) {
            fail(RejectReason::MissingField, "empty surname");
            continue;
        }
        std::array<double, kRaceCount> probs{};
        std::string why;
        if (!parse_probs(row, prob_cols, probs, why)) {
            fail(RejectReason::InvalidDistribution, why);
            continue;
        }
        double sum = 0.0;
        for (double p : probs) sum += p;
        if (std::abs(sum - 1.0) > kPredictionSumTolerance) {
            fail(RejectReason::InvalidDistribution, "probabilities sum to " + std::to_string(sum));
            continue;
        }
        for (double& p : probs) p /= sum;
        if (surname == kNationalKey) {
            RaceDistribution national{probs};
            for (double p : national.probs) {
                if (p <= 0.0) throw Error("national prior must be strictly positive");
            }
            table.set_national_prior(national);
            have_national = true;
        } else {
            table.add(std::move(surname), RaceDistribution{probs});
        }
    }
    if (!have_national) throw Error("surname priors: missing _NATIONAL_ row");
    return table;
}

void SurnamePriorTable::set_national_prior(const RaceDistribution& d) { national_ = d; }

void SurnamePriorTable::add(std::string surname_upper, const RaceDistribution& d) {
    priors_.insert_or_assign(std::move(surname_upper), d);
}

const RaceDistribution* SurnamePriorTable::find(std::string_view surname_upper) const {
    auto it = priors_.find(std::string(surname_upper));
    return it == priors_.end() ? nullptr : &it->second;
}

GeoPriorTable GeoPriorTable::from_demographics(
    const std::map<GeoId, TractDemographics>& tracts) {
    GeoPriorTable table;
    for (const auto& [geoid, demo] : tracts) table.add(geoid, demo.pop_share);
    return table;
}

void GeoPriorTable::add(const GeoId& geoid, const RaceDistribution& d) {
    priors_.insert_or_assign(geoid, d);
}

const RaceDistribution* GeoPriorTable::find(const GeoId& geoid) const {
    auto it = priors_.find(geoid);
    return it == priors_.end() ? nullptr : &it->second;
}

std::string_view bisg_source_name(BisgSource source) {
    switch (source) {
        case BisgSource::SurnameAndGeo: return "surname_geo";
        case BisgSource::GeoOnly: return "geo_only";
        case BisgSource::SurnameOnly: return "surname_only";
        case BisgSource::NationalFallback: return "national";
    }
    return "unknown";
}

BisgResult bisg_posterior(std::string_view surname_upper, const GeoId& geoid,
                          const SurnamePriorTable& priors, const GeoPriorTable& geo) {
    const RaceDistribution* s = surname_upper.empty() ? nullptr : priors.find(surname_upper);
    const RaceDistribution* g = geo.find(geoid);

    if (s == nullptr && g == nullptr) {
        return BisgResult{priors.national_prior(), BisgSource::NationalFallback};
    }
    if (s == nullptr) return BisgResult{*g, BisgSource::GeoOnly};
    if (g == nullptr) return BisgResult{*s, BisgSource::SurnameOnly};

    const RaceDistribution& n = priors.national_prior();
    std::array<double, kRaceCount> post{};
    double sum = 0.0;
    for (std::size_t i = 0; i < kRaceCount; ++i) {
        double sp = std::max(s->probs[i], kPriorFloor);
        double gp = std::max(g->probs[i], kPriorFloor);
        double np = std::max(n.probs[i], kPriorFloor);
        post[i] = sp * gp / np;
        sum += post[i];
    }
    for (double& p : post) p /= sum;
    return BisgResult{RaceDistribution{post}, BisgSource::SurnameAndGeo};
}

PredictionsResult load_predictions(std::istream& in) {
    csv::Reader reader(in);
    const std::size_t id_col = reader.require_column("parcel_id");
    const std::array<std::size_t, kRaceCount> prob_cols = {
        reader.require_column("p_white"),    reader.require_column("p_black"),
        reader.require_column("p_hispanic"), reader.require_column("p_asian"),
        reader.require_column("p_other"),
    };
    const std::size_t width = reader.header().size();

    PredictionsResult result;
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
        std::string id = std::string(csv::trim(row.fields[id_col]));
        if (id.empty()) {
            fail(RejectReason::MissingField, "empty parcel_id");
            continue;
        }
        std::array<double, kRaceCount> probs{};
        std::string why;
        if (!parse_probs(row, prob_cols, probs, why)) {
            fail(RejectReason::InvalidDistribution, why);
            continue;
        }
        double sum = 0.0;
        for (double p : probs) sum += p;
        if (std::abs(sum - 1.0) > kPredictionSumTolerance) {
            fail(RejectReason::InvalidDistribution, "probabilities sum to " + std::to_string(sum));
            continue;
        }
        for (double& p : probs) p /= sum;
        if (!result.predictions.emplace(std::move(id), RaceDistribution{probs}).second) {
            fail(RejectReason::DuplicateParcel, std::string(csv::trim(row.fields[id_col])));
        }
    }
    return result;
}

namespace {

OwnerClass required_owner_type(const ParcelRecord& p) {
    if (!p.owner_type) {
        throw Error("parcel " + p.parcel_id +
                    " has no owner classification; run the entity classifier first");
    }
    return *p.owner_type;
}

}  // namespace

ImputationMap impute_with_bisg(const Dataset& ds, const SurnamePriorTable& priors,
                               const GeoPriorTable& geo, const EntityRules& rules) {
    ImputationMap out;
    for (const ParcelRecord& p : ds.parcels) {
        ParcelImputation imp;
        if (required_owner_type(p) == OwnerClass::Individual) {
            SurnameResult surname = extract_surname(p.owner_name_raw, rules);
            std::string_view key =
                surname.ok() ? std::string_view(surname.extraction->surname) : std::string_view();
            BisgResult bisg = bisg_posterior(key, p.geoid, priors, geo);
            imp.race = argmax_race(bisg.posterior);
            imp.distribution = bisg.posterior;
            imp.source = bisg.source;
        }
        out.emplace(p.parcel_id, std::move(imp));
    }
    return out;
}

ImputationMap impute_with_predictions(
    const Dataset& ds, const std::map<std::string, RaceDistribution>& predictions) {
    ImputationMap out;
    for (const ParcelRecord& p : ds.parcels) {
        ParcelImputation imp;
        if (required_owner_type(p) == OwnerClass::Individual) {
            auto it = predictions.find(p.parcel_id);
            if (it == predictions.end()) throw MissingPredictionError(p.parcel_id);
            imp.race = argmax_race(it->second);
            imp.distribution = it->second;
            imp.source = BisgSource::SurnameAndGeo;
        }
        out.emplace(p.parcel_id, std::move(imp));
    }
    return out;
}

void write_predictions_csv(std::ostream& out, const ImputationMap& imputations) {
    csv::Writer w(out);
    w.write_row({"parcel_id", "p_white", "p_black", "p_hispanic", "p_asian", "p_other",
                 "predicted_race", "source"});
    for (const auto& [id, imp] : imputations) {
        if (!imp.individual()) continue;
        w.write_row({id, csv::format_double(imp.distribution[RaceCategory::White]),
                     csv::format_double(imp.distribution[RaceCategory::Black]),
                     csv::format_double(imp.distribution[RaceCategory::Hispanic]),
                     csv::format_double(imp.distribution[RaceCategory::Asian]),
                     csv::format_double(imp.distribution[RaceCategory::Other]),
                     std::string(race_name(*imp.race)),
                     std::string(bisg_source_name(imp.source))});
    }
}

}  // namespace tract_equity
