#pragma once

// Election data model shared by every module: ballots, approver index,
// candidate sets, equivalence classes of candidates and committee streams.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace propvote {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

using CandidateId = int;
using VoterId = int;

/// Raised when an exhaustive procedure would exceed its configured work cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-size set of small integers packed into 64-bit words.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(int size);

  int size() const { return size_; }
  void set(int i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(int i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  bool test(int i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  bool none() const;
  int count() const;
  /// |this ∩ other|
  int count_and(const Bitset& other) const;
  /// |this \ other|
  int count_and_not(const Bitset& other) const;

  Bitset& operator|=(const Bitset& other);
  Bitset& operator&=(const Bitset& other);
  bool operator==(const Bitset& other) const = default;
  auto operator<=>(const Bitset& other) const = default;

  std::vector<int> members() const;
  std::span<const std::uint64_t> words() const { return words_; }

 private:
  int size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Sorted, duplicate-free list of candidate ids. A committee is a
/// CandidateSet whose size equals the election's committee size.
class CandidateSet {
 public:
  CandidateSet() = default;
  CandidateSet(std::initializer_list<CandidateId> ids);
  /// Sorts `ids`; throws std::invalid_argument on negative or repeated ids.
  explicit CandidateSet(std::vector<CandidateId> ids);

  /// {0, 1, ..., count-1}
  static CandidateSet first(int count);

  int size() const { return static_cast<int>(ids_.size()); }
  bool empty() const { return ids_.empty(); }
  bool contains(CandidateId c) const;
  const std::vector<CandidateId>& ids() const { return ids_; }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }

  CandidateSet with(CandidateId c) const;
  CandidateSet without(CandidateId c) const;
  Bitset to_bitset(int num_candidates) const;

  bool operator==(const CandidateSet&) const = default;
  auto operator<=>(const CandidateSet&) const = default;

 private:
  std::vector<CandidateId> ids_;
};

using Committee = CandidateSet;

/// Optional labels carried along from data files. Ids stay dense integers;
/// labels are only used when reporting.
struct ElectionInfo {
  std::string name;
  std::vector<std::string> candidate_labels;
  std::vector<std::string> voter_labels;
};

/// Approval-based multiwinner election (N, C, A, k). Immutable once built.
class Election {
 public:
  /// Throws std::invalid_argument if a ballot names an id outside
  /// [0, num_candidates), if there are no voters or candidates, or if
  /// committee_size is outside [1, num_candidates].
  Election(int num_candidates, std::vector<std::vector<CandidateId>> ballots, int committee_size,
           ElectionInfo info = {});

  int num_voters() const { return static_cast<int>(ballots_.size()); }
  int num_candidates() const { return num_candidates_; }
  int committee_size() const { return committee_size_; }

  const std::vector<CandidateId>& ballot(VoterId i) const { return ballots_[i]; }
  const Bitset& ballot_set(VoterId i) const { return ballot_sets_[i]; }
  /// N_c as a bitset over voters.
  const Bitset& approvers(CandidateId c) const { return approvers_[c]; }
  int approval_score(CandidateId c) const { return approval_scores_[c]; }

  /// Same profile, different k.
  Election with_committee_size(int committee_size) const;

  const ElectionInfo& info() const { return info_; }
  std::string candidate_label(CandidateId c) const;

  /// Throws std::invalid_argument unless every id in `set` is a candidate.
  void validate(const CandidateSet& set) const;

 private:
  int num_candidates_;
  int committee_size_;
  std::vector<std::vector<CandidateId>> ballots_;
  std::vector<Bitset> ballot_sets_;
  std::vector<Bitset> approvers_;
  std::vector<int> approval_scores_;
  ElectionInfo info_;
};

Election build_election(std::vector<std::vector<CandidateId>> ballots, int num_candidates, int committee_size);

/// d(W1, W2) = |W1 \ W2|. Throws std::invalid_argument if the sizes differ.
int committee_distance(const CandidateSet& first, const CandidateSet& second);

/// Expected |W1 \ W2| for independent uniform k-subsets of m candidates,
/// k(m-k)/m.
Rational expected_random_distance(int num_candidates, int committee_size);

/// Candidates grouped by identical approver sets.
struct EquivalenceClass {
  CandidateId representative;  // smallest member
  std::vector<CandidateId> members;
  Bitset approvers;

  int size() const { return static_cast<int>(members.size()); }
};

struct QuotientStructure {
  std::vector<EquivalenceClass> classes;  // ordered by representative
  std::vector<int> class_of;              // -1 for excluded candidates

  int size() const { return static_cast<int>(classes.size()); }
};

/// Partition of C \ excluded into equivalence classes.
QuotientStructure build_quotient(const Election& election, const CandidateSet& excluded = {});

/// Exact binomial coefficient; zero when r < 0 or r > n.
BigInt binomial(int n, int r);

/// Pascal triangle of binomial coefficients up to a fixed row.
class BinomialTable {
 public:
  explicit BinomialTable(int max_n);
  const BigInt& operator()(int n, int r) const;
  int max_n() const { return max_n_; }

 private:
  int max_n_;
  std::vector<std::vector<BigInt>> rows_;
  BigInt zero_{0};
};

/// Lexicographic stream of all size-r subsets of a candidate pool, each
/// emitted together with a fixed set of extra candidates. Single consumer.
class CombinationStream {
 public:
  CombinationStream(std::vector<CandidateId> pool, int r, CandidateSet fixed = {});

  /// Writes the next subset into `out`; false once exhausted.
  bool next(CandidateSet& out);

 private:
  std::vector<CandidateId> pool_;
  CandidateSet fixed_;
  std::vector<int> index_;
  bool started_ = false;
  bool done_ = false;
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

/// Every committee of the election in lexicographic order. Throws
/// CapExceeded if C(m, k) > cap.
CombinationStream enumerate_committees(const Election& election, std::uint64_t cap = kDefaultEnumerationCap);

/// Committees of size k containing `required`, lexicographic in the
/// remaining candidates. Throws CapExceeded if their number exceeds cap.
CombinationStream enumerate_committees_containing(const Election& election, const CandidateSet& required,
                                                  std::uint64_t cap = kDefaultEnumerationCap);

/// Throws CapExceeded if `count` > cap, naming `what` in the message.
void require_within_cap(const BigInt& count, std::uint64_t cap, const std::string& what);

double to_double(const Rational& value);
std::string to_string(const Rational& value);

}  // namespace propvote
