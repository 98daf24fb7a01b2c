#pragma once

// Synthetic approval elections: the (p, phi)-resampling model and the
// (r, d)-Euclidean model on the unit cube. Both draw from an Rng seeded
// with derive_seed(seed, 0).

#include "propvote/core.hpp"

#include <cstdint>

namespace propvote {

/// A central ballot of floor(p*m) uniformly chosen candidates; each voter
/// keeps each candidate's central membership with probability 1 - phi and
/// otherwise approves it independently with probability p.
Election gen_resampling(int num_voters, int num_candidates, int committee_size, double p, double phi,
                        std::uint64_t seed);

/// Candidates, then voters, are uniform points in [0,1]^dim (dim 1 or 2);
/// a voter approves every candidate within Euclidean distance `radius`.
Election gen_euclidean(int num_voters, int num_candidates, int committee_size, double radius, int dim,
                       std::uint64_t seed);

}  // namespace propvote
