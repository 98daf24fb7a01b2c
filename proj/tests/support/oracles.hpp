#pragma once

// Reference implementations used only by tests. They work straight from
// the definitions on bitmasks and share no code with the library beyond
// the Election container.

#include "propvote/core.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using propvote::CandidateSet;
using propvote::Election;
using propvote::Rational;

using Mask = std::uint32_t;

Mask to_mask(const CandidateSet& set);
CandidateSet from_mask(Mask mask);

/// Every k-subset of {0..m-1}, by scanning all 2^m masks.
std::vector<Mask> committees(int m, int k);

/// t-EJR+ by trying every voter subset N' (n <= 20).
bool satisfies_t_ejrp(const Election& e, Mask committee, int t);
inline bool satisfies_jr(const Election& e, Mask w) { return satisfies_t_ejrp(e, w, 1); }
inline bool satisfies_ejrp(const Election& e, Mask w) { return satisfies_t_ejrp(e, w, e.committee_size()); }

/// Committees satisfying t-EJR+.
std::vector<Mask> axiom_committees(const Election& e, int t);

/// Mean of |W1 \ W2| over all ordered pairs of k-subsets of m candidates.
Rational expected_distance(int m, int k);

/// Largest |W1 \ W2| over pairs (possibly equal) from `set`; -1 if empty.
int max_distance(const std::vector<Mask>& set);

struct RandomElectionOptions {
  int min_voters = 1;
  int max_voters = 7;
  int min_candidates = 1;
  int max_candidates = 9;
};

/// Random profile with a random approval density; k uniform in [1, m].
Election random_election(std::mt19937_64& rng, const RandomElectionOptions& options);

/// Same profile as random_election but with a caller-chosen k.
Election random_election_with_k(std::mt19937_64& rng, const RandomElectionOptions& options, int k);

/// The ten-voter, nine-candidate profile used across tests, k = 5.
Election ten_voters();

}  // namespace oracle
