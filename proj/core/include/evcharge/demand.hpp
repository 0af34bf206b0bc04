#pragma once

#include <cstdint>
#include <vector>

#include "evcharge/model.hpp"

namespace evcharge {

// Draws exactly `n` requests sorted by arrival. Arrival times follow the hourly intensity of
// `profile` clipped to its horizon, origins are uniform over the region and trip lengths are
// lognormal with the profile's mean and variance. Identical (profile, n, seed) give identical
// output.
std::vector<Request> generate_demand(const DemandProfile& profile, std::size_t n,
                                     std::uint64_t seed);

}  // namespace evcharge
