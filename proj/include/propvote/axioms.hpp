#pragma once

// Justified representation (JR), t-EJR+ and EJR+ checks with violation
// witnesses.
//
// A set W violates t-EJR+ if some candidate c outside W and some
// l in [1, t] admit a group N' of approvers of c with |N'| >= l*n/k in
// which every voter approves fewer than l members of W. JR is 1-EJR+ and
// EJR+ is k-EJR+. All threshold comparisons are done in integers
// (|N'| * k >= l * n), never in floating point.

#include "propvote/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace propvote {

/// Which proportionality axiom a computation refers to.
class Axiom {
 public:
  enum class Kind { jr, ejr_plus, t_ejr_plus };

  static Axiom jr() { return Axiom(Kind::jr, 1); }
  static Axiom ejr_plus() { return Axiom(Kind::ejr_plus, 0); }
  static Axiom t_ejr_plus(int t);

  /// Accepts "jr", "ejrp", "ejr+" and "t:<T>".
  static Axiom parse(const std::string& text);

  Kind kind() const { return kind_; }
  /// The t of t-EJR+ for an election with committee size k.
  int level(int committee_size) const;
  std::string name() const;

  bool operator==(const Axiom&) const = default;

 private:
  Axiom(Kind kind, int t) : kind_(kind), t_(t) {}
  Kind kind_;
  int t_;
};

struct Violation {
  CandidateId candidate;
  int ell;
  std::vector<VoterId> group;  // every approver of `candidate` with fewer than `ell` members of W
};

struct AxiomReport {
  bool satisfied = true;
  std::optional<Violation> witness;  // present iff !satisfied
};

/// Checks t-EJR+ for an arbitrary W ⊆ C (|W| need not equal k; the
/// threshold uses the election's k). The witness is the smallest l, then the
/// smallest candidate, with the maximal deficient group.
AxiomReport check_t_ejrp(const Election& election, const CandidateSet& committee, int t);
AxiomReport check_jr(const Election& election, const CandidateSet& committee);
AxiomReport check_ejrp(const Election& election, const CandidateSet& committee);
AxiomReport check(const Election& election, const CandidateSet& committee, const Axiom& axiom);

/// Verdict only; same semantics as check().
bool satisfies(const Election& election, const CandidateSet& committee, const Axiom& axiom);

/// Re-validates a witness against the definition: c ∉ W, N' ⊆ N_c,
/// |N'| * k >= l * n and every member of N' has fewer than l members of W.
bool witness_is_valid(const Election& election, const CandidateSet& committee, const Violation& witness);

/// A committee of size k satisfying EJR+ (Method of Equal Shares with
/// seq-Phragmén completion). Throws std::logic_error if the post-check fails.
Committee construct_ejrp_committee(const Election& election);

}  // namespace propvote
