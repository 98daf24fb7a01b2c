#pragma once

// Proportional approval rules and score-based selections. All arithmetic
// is exact; ties go to the candidate ranked first by the tie order, which
// defaults to the smallest id.

#include "propvote/core.hpp"

#include <span>
#include <vector>

namespace propvote {

/// Permutation of candidate ids; earlier entries win ties. Empty means
/// "by id".
using TieOrder = std::vector<CandidateId>;

/// Method of Equal Shares (unit costs, budget k/n per voter), completed by
/// seq-Phragmén with the equal-shares winners seated at zero load.
Committee mes_with_phragmen_completion(const Election& election, const TieOrder& ties = {});

/// The equal-shares phase alone; may return fewer than k candidates.
Committee method_of_equal_shares(const Election& election, const TieOrder& ties = {});

/// Sequential Phragmén: each round adds the candidate whose supporters end
/// with the smallest load. Candidates without approvers come last.
Committee seq_phragmen(const Election& election, const TieOrder& ties = {});

/// seq-Phragmén that starts from a partial committee (seated at zero load)
/// and fills it up to k seats.
Committee seq_phragmen_from(const Election& election, const CandidateSet& seated, const TieOrder& ties = {});

/// Greedy PAV: each round adds the candidate with the largest marginal
/// harmonic score sum_i 1/(|A_i ∩ W| + 1).
Committee seq_pav(const Election& election, const TieOrder& ties = {});

/// The k candidates with the highest scores, ties by id.
Committee top_k_by_score(const Election& election, std::span<const Rational> scores);
Committee top_k_by_score(const Election& election, std::span<const double> scores);

/// |W1 ∩ W2| / k for equal-size sets.
Rational relative_overlap(const CandidateSet& first, const CandidateSet& second);

}  // namespace propvote
