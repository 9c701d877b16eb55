#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

namespace tract_equity {

// Desk-scale synthetic corpus: tract demographics, parcels with owner
// names drawn from race-labeled surname pools, surname priors matching
// those pools, perfect predictions, ground-truth labels, and the planted
// per-tract mixes. Everything is derived from the seed; the same spec and
// seed always produce byte-identical files.
struct SyntheticSpec {
    std::size_t n_tracts = 50;
    std::size_t min_parcels = 120;
    std::size_t max_parcels = 280;
    double min_corporate = 0.05;
    double max_corporate = 0.45;
    std::size_t surnames_per_race = 40;
    double urban_fraction = 0.6;
};

struct SyntheticPaths {
    std::filesystem::path parcels;
    std::filesystem::path tracts;
    std::filesystem::path surname_priors;
    std::filesystem::path predictions;  // point-mass on the true race
    std::filesystem::path ground_truth;
    std::filesystem::path planted_shares;
};

// planted_shares.csv records the REALIZED per-tract corporate share and
// individual-owner race mix (integer counts over parcels), so a perfect
// classifier reproduces them exactly. Throws InvalidSpecError on bad
// ranges and std::runtime_error on I/O failure.
SyntheticPaths generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed,
                                  const std::filesystem::path& out_dir);

}  // namespace tract_equity
