#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace tract_equity {

// The five race/ethnicity categories, in canonical order. The order is part
// of the contract: probability vectors are indexed by it and argmax ties are
// broken toward the lower index.
enum class RaceCategory : int { White = 0, Black = 1, Hispanic = 2, Asian = 3, Other = 4 };

inline constexpr std::size_t kRaceCount = 5;

inline constexpr std::array<RaceCategory, kRaceCount> kAllRaces = {
    RaceCategory::White, RaceCategory::Black, RaceCategory::Hispanic,
    RaceCategory::Asian, RaceCategory::Other};

std::string_view race_name(RaceCategory r);
std::optional<RaceCategory> race_from_name(std::string_view name);

// Probability vector over the five categories. A valid distribution has every
// entry in [0,1] and sums to 1 within 1e-9.
struct RaceDistribution {
    std::array<double, kRaceCount> probs{};

    static constexpr double kSumTolerance = 1e-9;

    double& operator[](RaceCategory r) { return probs[static_cast<std::size_t>(r)]; }
    double operator[](RaceCategory r) const { return probs[static_cast<std::size_t>(r)]; }

    double sum() const;
    bool valid() const;

    // Divides by the current sum. Precondition: sum() > 0.
    RaceDistribution normalized() const;

    static RaceDistribution uniform();
    static RaceDistribution point_mass(RaceCategory r);

    bool operator==(const RaceDistribution&) const = default;
};

// Category with the highest probability; ties break toward the canonical
// order (White first).
RaceCategory argmax_race(const RaceDistribution& d);

}  // namespace tract_equity
