#pragma once

// Exact committee counting: exhaustive enumeration, and the dynamic program
// over equivalence classes that counts JR committees in time exponential
// only in the number of distinct approver sets.

#include "propvote/axioms.hpp"
#include "propvote/core.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace propvote {

inline constexpr std::uint64_t kDefaultSubsetCap = 50'000'000;

/// Number of size-k committees that satisfy `axiom` and contain
/// `must_contain`, by enumeration.
BigInt count_brute_force(const Election& election, const Axiom& axiom, const CandidateSet& must_contain = {},
                         std::uint64_t cap = kDefaultEnumerationCap);

/// Number of JR committees containing `must_contain`, by iterating subsets
/// of the quotient of C \ must_contain and counting completions. Throws
/// CapExceeded if the number of class subsets to visit exceeds `subset_cap`.
BigInt count_jr_fpt(const Election& election, const CandidateSet& must_contain = {},
                    std::uint64_t subset_cap = kDefaultSubsetCap);

/// Completion table T for classes of sizes a_1..a_j: T[j'][k'] is the
/// number of k'-sets drawn from the first j' classes that use every one of
/// them. Row 0 is the empty product (T[0][0] = 1).
std::vector<std::vector<BigInt>> completion_table(std::span<const int> class_sizes, int max_size);

/// |axiom set| / C(m, k). JR uses the class-subset DP when it fits under
/// the subset cap, enumeration otherwise.
Rational axiom_fraction_exact(const Election& election, const Axiom& axiom,
                              std::uint64_t cap = kDefaultEnumerationCap);

/// Everything the importance measures need, from one pass over all
/// committees: the axiom count, per-candidate containment counts and
/// per-candidate "pivotal" counts (W \ {c} fails the axiom).
struct AxiomCensus {
  BigInt total_committees;
  BigInt satisfying;
  std::vector<BigInt> containing;
  std::vector<BigInt> pivotal;

  Rational fraction() const;
  Rational prevalence(CandidateId c) const;
  /// pivotal[c] / satisfying: the sampled power-index scale.
  Rational power_fraction(CandidateId c) const;
};

AxiomCensus census_brute_force(const Election& election, const Axiom& axiom,
                               std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace propvote
