#include "tract_equity/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <vector>

#include "tract_equity/csv.hpp"
#include "tract_equity/errors.hpp"
#include "tract_equity/race.hpp"

namespace tract_equity {

namespace {

// Hand-rolled draws over mt19937_64 so output bytes do not depend on the
// standard library's distribution implementations.
std::uint64_t uniform_u64(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t span = hi - lo + 1;
    if (span == 0) return rng();  // full range
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return lo + r % span;
}

double uniform_unit(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
}

double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform_unit(rng);
}

std::string make_word(std::mt19937_64& rng) {
    static constexpr char kConsonants[] = "BDFGKLMNPRSTVZ";
    static constexpr char kVowels[] = "AEIOU";
    std::string w;
    for (int s = 0; s < 3; ++s) {
        w.push_back(kConsonants[uniform_u64(rng, 0, 13)]);
        w.push_back(kVowels[uniform_u64(rng, 0, 4)]);
    }
    if (uniform_unit(rng) < 0.5) w.push_back(kConsonants[uniform_u64(rng, 0, 13)]);
    return w;
}

std::string unique_word(std::mt19937_64& rng, std::set<std::string>& used) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
        std::string w = make_word(rng);
        if (used.insert(w).second) return w;
    }
    throw Error("synthetic word pool exhausted");
}

constexpr std::array<double, kRaceCount> kNationalPrior = {0.6, 0.14, 0.16, 0.07, 0.03};

constexpr std::array<const char*, 20> kFirstNames = {
    "JAMES",   "MARY",   "ROBERT",  "PATRICIA", "JOHN",    "JENNIFER", "MICHAEL",
    "LINDA",   "DAVID",  "ELIZABETH", "WILLIAM", "BARBARA", "RICHARD", "SUSAN",
    "JOSEPH",  "JESSICA", "THOMAS",  "KAREN",   "CHARLES", "NANCY"};

// Race mix around one dominant category; the remainder is spread over the
// other categories with a floor so no share collapses to zero.
std::array<double, kRaceCount> sample_mix(std::mt19937_64& rng, std::size_t archetype) {
    std::array<double, kRaceCount> mix{};
    if (archetype < 4) {
        double dominant = uniform_real(rng, 0.55, 0.85);
        double rest = 1.0 - dominant;
        std::array<double, kRaceCount> e{};
        double esum = 0.0;
        for (std::size_t r = 0; r < kRaceCount; ++r) {
            if (r == archetype) continue;
            e[r] = 0.25 - std::log(1.0 - uniform_unit(rng));
            esum += e[r];
        }
        for (std::size_t r = 0; r < kRaceCount; ++r) {
            mix[r] = r == archetype ? dominant : rest * e[r] / esum;
        }
    } else {
        double esum = 0.0;
        for (double& v : mix) {
            v = 0.25 - std::log(1.0 - uniform_unit(rng));
            esum += v;
        }
        for (double& v : mix) v /= esum;
    }
    return mix;
}

// Largest-remainder rounding of mix*n into integer counts summing to n.
std::array<std::size_t, kRaceCount> quota_counts(const std::array<double, kRaceCount>& mix,
                                                 std::size_t n) {
    std::array<std::size_t, kRaceCount> counts{};
    std::array<std::pair<double, std::size_t>, kRaceCount> remainders;
    std::size_t used = 0;
    for (std::size_t r = 0; r < kRaceCount; ++r) {
        double q = mix[r] * static_cast<double>(n);
        counts[r] = static_cast<std::size_t>(q);
        remainders[r] = {q - static_cast<double>(counts[r]), r};
        used += counts[r];
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t k = 0; used < n; ++k, ++used) {
        ++counts[remainders[k % kRaceCount].second];
    }
    return counts;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

std::string pad(std::uint64_t v, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%0*llu", width, static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

SyntheticPaths generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed,
                                  const std::filesystem::path& out_dir) {
    if (spec.n_tracts == 0) throw InvalidSpecError("n_tracts must be positive");
    if (spec.min_parcels == 0 || spec.min_parcels > spec.max_parcels) {
        throw InvalidSpecError("parcel range must satisfy 1 <= min <= max");
    }
    if (spec.min_corporate < 0.0 || spec.max_corporate > 1.0 ||
        spec.min_corporate > spec.max_corporate) {
        throw InvalidSpecError("corporate share range must satisfy 0 <= min <= max <= 1");
    }
    if (spec.surnames_per_race == 0) throw InvalidSpecError("surnames_per_race must be positive");
    if (spec.urban_fraction < 0.0 || spec.urban_fraction > 1.0) {
        throw InvalidSpecError("urban_fraction must be in [0, 1]");
    }

    std::filesystem::create_directories(out_dir);
    SyntheticPaths paths{
        out_dir / "parcels.csv",       out_dir / "tracts.csv",
        out_dir / "surname_priors.csv", out_dir / "predictions_perfect.csv",
        out_dir / "ground_truth.csv",  out_dir / "planted_shares.csv",
    };

    std::mt19937_64 rng(seed);
    std::set<std::string> used_words;

    std::array<std::vector<std::string>, kRaceCount> surname_pool;
    for (std::size_t r = 0; r < kRaceCount; ++r) {
        surname_pool[r].reserve(spec.surnames_per_race);
        for (std::size_t i = 0; i < spec.surnames_per_race; ++i) {
            surname_pool[r].push_back(unique_word(rng, used_words));
        }
    }
    std::vector<std::string> corp_roots;
    for (int i = 0; i < 60; ++i) corp_roots.push_back(unique_word(rng, used_words));

    {
        std::ofstream out = open_out(paths.surname_priors);
        csv::Writer w(out);
        w.write_row({"surname", "p_white", "p_black", "p_hispanic", "p_asian", "p_other"});
        std::vector<std::string> national = {"_NATIONAL_"};
        for (double p : kNationalPrior) national.push_back(csv::format_double(p));
        w.write_row(national);
        // Off-diagonal mass follows the national mix, the way real surname
        // lists behave; the 0.99 diagonal keeps the posterior argmax decisive
        // for every tract mix the generator can produce.
        for (std::size_t r = 0; r < kRaceCount; ++r) {
            for (const std::string& s : surname_pool[r]) {
                std::vector<std::string> fields = {s};
                for (std::size_t c = 0; c < kRaceCount; ++c) {
                    double p = c == r ? 0.99
                                      : 0.01 * kNationalPrior[c] / (1.0 - kNationalPrior[r]);
                    fields.push_back(csv::format_double(p));
                }
                w.write_row(fields);
            }
        }
    }

    std::ofstream parcels_out = open_out(paths.parcels);
    std::ofstream tracts_out = open_out(paths.tracts);
    std::ofstream pred_out = open_out(paths.predictions);
    std::ofstream truth_out = open_out(paths.ground_truth);
    std::ofstream planted_out = open_out(paths.planted_shares);
    csv::Writer parcels(parcels_out);
    csv::Writer tracts(tracts_out);
    csv::Writer preds(pred_out);
    csv::Writer truth(truth_out);
    csv::Writer planted(planted_out);

    parcels.write_row({"parcel_id", "geoid", "assessed_value", "owner_name"});
    tracts.write_row({"geoid", "total_pop", "share_white", "share_black", "share_hispanic",
                      "share_asian", "share_other", "median_income", "census_urban"});
    preds.write_row({"parcel_id", "p_white", "p_black", "p_hispanic", "p_asian", "p_other"});
    truth.write_row({"record_id", "true_race", "median_income"});
    planted.write_row({"geoid", "n_parcels", "n_individual", "corporate_share",
                       "owner_share_white", "owner_share_black", "owner_share_hispanic",
                       "owner_share_asian", "owner_share_other", "pop_share_white",
                       "pop_share_black", "pop_share_hispanic", "pop_share_asian",
                       "pop_share_other"});

    std::uint64_t parcel_seq = 0;
    for (std::size_t i = 0; i < spec.n_tracts; ++i) {
        std::string geoid = "36" + pad(1 + i / 500, 3) + pad((i % 500 + 1) * 100 + 1, 6);
        std::size_t archetype = i % 5;
        std::array<double, kRaceCount> owner_mix = sample_mix(rng, archetype);
        std::array<double, kRaceCount> pop_mix = sample_mix(rng, archetype);
        // Keep every share above 2% so the geography prior never starves a class.
        for (double& v : owner_mix) v = 0.9 * v + 0.02;
        for (double& v : pop_mix) v = 0.9 * v + 0.02;

        std::size_t n_parcels = uniform_u64(rng, spec.min_parcels, spec.max_parcels);
        double corp_target = uniform_real(rng, spec.min_corporate, spec.max_corporate);
        auto n_corp = static_cast<std::size_t>(
            std::llround(corp_target * static_cast<double>(n_parcels)));
        n_corp = std::min(n_corp, n_parcels);
        std::size_t n_indiv = n_parcels - n_corp;
        std::array<std::size_t, kRaceCount> owner_counts = quota_counts(owner_mix, n_indiv);

        std::uint64_t population = uniform_u64(rng, 1200, 6000);
        bool has_income = i % 25 != 24;
        double income_noise = uniform_real(rng, 0.0, 22000.0);
        auto income = static_cast<std::uint64_t>(
            std::llround(28000.0 + 95000.0 * pop_mix[0] + income_noise));
        bool urban = uniform_unit(rng) < spec.urban_fraction;

        tracts.write_row({geoid, std::to_string(population), csv::format_double(pop_mix[0]),
                          csv::format_double(pop_mix[1]), csv::format_double(pop_mix[2]),
                          csv::format_double(pop_mix[3]), csv::format_double(pop_mix[4]),
                          has_income ? std::to_string(income) : "", urban ? "1" : "0"});

        auto emit_parcel = [&](const std::string& name) -> std::string {
            std::string id = "P" + pad(++parcel_seq, 7);
            std::uint64_t value = uniform_u64(rng, 45, 950) * 1000;
            parcels.write_row({id, geoid, std::to_string(value), name});
            return id;
        };

        for (std::size_t c = 0; c < n_corp; ++c) {
            const std::string& root = corp_roots[uniform_u64(rng, 0, corp_roots.size() - 1)];
            double kind = uniform_unit(rng);
            std::string name;
            if (kind < 0.75) {
                switch (uniform_u64(rng, 0, 3)) {
                    case 0: name = root + " HOLDINGS LLC"; break;
                    case 1: name = root + " PROPERTIES INC"; break;
                    case 2: name = root + " REALTY CORP"; break;
                    default: name = root + " VENTURES LTD"; break;
                }
            } else if (kind < 0.85) {
                switch (uniform_u64(rng, 0, 2)) {
                    case 0: name = "CITY OF " + root; break;
                    case 1: name = root + " HOUSING AUTHORITY"; break;
                    default: name = "COUNTY OF " + root; break;
                }
            } else {
                switch (uniform_u64(rng, 0, 2)) {
                    case 0: name = root + " FAMILY TRUST"; break;
                    case 1:
                        name = "ESTATE OF " +
                               std::string(kFirstNames[uniform_u64(rng, 0, 19)]) + " " + root;
                        break;
                    default: name = root + " COMMUNITY CHURCH"; break;
                }
            }
            emit_parcel(name);
        }

        for (std::size_t r = 0; r < kRaceCount; ++r) {
            for (std::size_t k = 0; k < owner_counts[r]; ++k) {
                // 2% of owners carry a surname from another pool, so name-based
                // inference sees real noise instead of a perfectly separable toy.
                std::size_t pool = r;
                if (uniform_unit(rng) < 0.02) {
                    pool = (r + uniform_u64(rng, 1, kRaceCount - 1)) % kRaceCount;
                }
                const std::string& surname =
                    surname_pool[pool][uniform_u64(rng, 0, surname_pool[pool].size() - 1)];
                std::string first = kFirstNames[uniform_u64(rng, 0, 19)];
                std::string name;
                std::uint64_t style = uniform_u64(rng, 0, 9);
                if (style < 6) {
                    name = surname + " " + first;
                } else if (style < 8) {
                    name = surname + ", " + first;
                } else if (style == 8) {
                    name = surname + " " + first + " & " + surname + " " +
                           kFirstNames[uniform_u64(rng, 0, 19)];
                } else {
                    name = surname + " " + first + " " +
                           std::string(1, static_cast<char>('A' + uniform_u64(rng, 0, 25)));
                }
                std::string id = emit_parcel(name);

                std::vector<std::string> prow = {id};
                for (std::size_t c = 0; c < kRaceCount; ++c) {
                    prow.push_back(c == r ? "1" : "0");
                }
                preds.write_row(prow);
                truth.write_row({id, std::string(race_name(static_cast<RaceCategory>(r))),
                                 has_income ? std::to_string(income) : ""});
            }
        }

        double corp_share = n_parcels == 0
                                ? 0.0
                                : static_cast<double>(n_corp) / static_cast<double>(n_parcels);
        std::vector<std::string> planted_row = {geoid, std::to_string(n_parcels),
                                                std::to_string(n_indiv),
                                                csv::format_double(corp_share)};
        for (std::size_t r = 0; r < kRaceCount; ++r) {
            double share = n_indiv == 0 ? 0.0
                                        : static_cast<double>(owner_counts[r]) /
                                              static_cast<double>(n_indiv);
            planted_row.push_back(csv::format_double(share));
        }
        for (std::size_t r = 0; r < kRaceCount; ++r) {
            planted_row.push_back(csv::format_double(pop_mix[r]));
        }
        planted.write_row(planted_row);
    }
    return paths;
}

}  // namespace tract_equity
