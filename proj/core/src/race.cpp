#include "tract_equity/race.hpp"

#include <cmath>

namespace tract_equity {

std::string_view race_name(RaceCategory r) {
    switch (r) {
        case RaceCategory::White: return "white";
        case RaceCategory::Black: return "black";
        case RaceCategory::Hispanic: return "hispanic";
        case RaceCategory::Asian: return "asian";
        case RaceCategory::Other: return "other";
    }
    return "unknown";
}

std::optional<RaceCategory> race_from_name(std::string_view name) {
    for (RaceCategory r : kAllRaces) {
        if (name == race_name(r)) return r;
    }
    return std::nullopt;
}

double RaceDistribution::sum() const {
    double total = 0.0;
    for (double p : probs) total += p;
    return total;
}

bool RaceDistribution::valid() const {
    for (double p : probs) {
        if (!(p >= 0.0 && p <= 1.0)) return false;  // also rejects NaN
    }
    return std::abs(sum() - 1.0) <= kSumTolerance;
}

RaceDistribution RaceDistribution::normalized() const {
    RaceDistribution out = *this;
    double total = sum();
    for (double& p : out.probs) p /= total;
    return out;
}

RaceDistribution RaceDistribution::uniform() {
    RaceDistribution d;
    d.probs.fill(1.0 / kRaceCount);
    return d;
}

RaceDistribution RaceDistribution::point_mass(RaceCategory r) {
    RaceDistribution d;
    d[r] = 1.0;
    return d;
}

RaceCategory argmax_race(const RaceDistribution& d) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < kRaceCount; ++i) {
        if (d.probs[i] > d.probs[best]) best = i;
    }
    return static_cast<RaceCategory>(best);
}

}  // namespace tract_equity
