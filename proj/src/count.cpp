#include "propvote/count.hpp"

#include <algorithm>

namespace propvote {

BigInt count_brute_force(const Election& election, const Axiom& axiom, const CandidateSet& must_contain,
                         std::uint64_t cap) {
  auto stream = enumerate_committees_containing(election, must_contain, cap);
  BigInt count = 0;
  Committee committee;
  while (stream.next(committee))
    if (satisfies(election, committee, axiom)) ++count;
  return count;
}

std::vector<std::vector<BigInt>> completion_table(std::span<const int> class_sizes, int max_size) {
  const int j = static_cast<int>(class_sizes.size());
  std::vector<std::vector<BigInt>> table(j + 1, std::vector<BigInt>(max_size + 1, 0));
  table[0][0] = 1;
  for (int row = 1; row <= j; ++row) {
    const int a = class_sizes[row - 1];
    for (int size = row; size <= max_size; ++size) {
      // i members from class `row`, the rest from the first row-1 classes.
      BigInt total = 0;
      for (int i = 1; i <= std::min(a, size - row + 1); ++i) total += binomial(a, i) * table[row - 1][size - i];
      table[row][size] = std::move(total);
    }
  }
  return table;
}

namespace {

// Depth-first walk over class subsets. Each level keeps the voters covered
// by the chosen classes and the DP row for them, so a subset costs one
// coverage update and one row of the completion recurrence.
class JrSubsetCounter {
 public:
  JrSubsetCounter(const Election& election, const QuotientStructure& quotient, const CandidateSet& fixed)
      : election_(election), quotient_(quotient), seats_(election.committee_size() - fixed.size()) {
    const int n = election.num_voters();
    Bitset base(n);
    for (auto c : fixed) base |= election.approvers(c);
    covered_.assign(seats_ + 1, base);
    rows_.assign(seats_ + 1, std::vector<BigInt>(seats_ + 1, 0));
    rows_[0][0] = 1;
    in_subset_.assign(quotient.size(), false);
    const int largest = std::max(1, election.num_candidates());
    binomials_ = BinomialTable(largest);
  }

  BigInt run() {
    total_ = 0;
    visit(0, 0);
    return total_;
  }

 private:
  // JR depends only on which approver sets are covered, which is the same
  // for every member of a class, so representatives decide it.
  bool satisfies_jr(const Bitset& covered) const {
    const long long n = election_.num_voters();
    const long long k = election_.committee_size();
    for (int q = 0; q < quotient_.size(); ++q) {
      if (in_subset_[q]) continue;
      const long long uncovered = quotient_.classes[q].approvers.count_and_not(covered);
      if (uncovered * k >= n) return false;
    }
    return true;
  }

  void visit(int next_class, int depth) {
    if (satisfies_jr(covered_[depth])) total_ += rows_[depth][seats_];
    if (depth == seats_) return;
    for (int q = next_class; q < quotient_.size(); ++q) {
      const auto& cls = quotient_.classes[q];
      covered_[depth + 1] = covered_[depth];
      covered_[depth + 1] |= cls.approvers;
      auto& row = rows_[depth + 1];
      const auto& prev = rows_[depth];
      for (int size = 0; size <= seats_; ++size) {
        BigInt value = 0;
        for (int i = 1; i <= std::min(cls.size(), size); ++i)
          if (!prev[size - i].is_zero()) value += binomials_(cls.size(), i) * prev[size - i];
        row[size] = std::move(value);
      }
      in_subset_[q] = true;
      visit(q + 1, depth + 1);
      in_subset_[q] = false;
    }
  }

  const Election& election_;
  const QuotientStructure& quotient_;
  int seats_;
  std::vector<Bitset> covered_;
  std::vector<std::vector<BigInt>> rows_;
  std::vector<bool> in_subset_;
  BinomialTable binomials_{0};
  BigInt total_;
};

}  // namespace

BigInt count_jr_fpt(const Election& election, const CandidateSet& must_contain, std::uint64_t subset_cap) {
  election.validate(must_contain);
  const int seats = election.committee_size() - must_contain.size();
  if (seats < 0) return 0;
  const auto quotient = build_quotient(election, must_contain);

  BigInt subsets = 0;
  for (int j = 0; j <= std::min(seats, quotient.size()); ++j) subsets += binomial(quotient.size(), j);
  require_within_cap(subsets, subset_cap, "class subset enumeration");

  return JrSubsetCounter(election, quotient, must_contain).run();
}

Rational axiom_fraction_exact(const Election& election, const Axiom& axiom, std::uint64_t cap) {
  const BigInt all = binomial(election.num_candidates(), election.committee_size());
  if (axiom.level(election.committee_size()) == 1) {
    try {
      return Rational(count_jr_fpt(election, {}, kDefaultSubsetCap), all);
    } catch (const CapExceeded&) {
      // fall through to enumeration
    }
  }
  return Rational(count_brute_force(election, axiom, {}, cap), all);
}

Rational AxiomCensus::fraction() const { return Rational(satisfying, total_committees); }

Rational AxiomCensus::prevalence(CandidateId c) const {
  if (satisfying.is_zero()) return 0;
  return Rational(containing[c], satisfying);
}

Rational AxiomCensus::power_fraction(CandidateId c) const {
  if (satisfying.is_zero()) return 0;
  return Rational(pivotal[c], satisfying);
}

AxiomCensus census_brute_force(const Election& election, const Axiom& axiom, std::uint64_t cap) {
  const int m = election.num_candidates();
  AxiomCensus census;
  census.containing.assign(m, 0);
  census.pivotal.assign(m, 0);
  auto stream = enumerate_committees(election, cap);
  Committee committee;
  while (stream.next(committee)) {
    ++census.total_committees;
    if (!satisfies(election, committee, axiom)) continue;
    ++census.satisfying;
    for (auto c : committee) {
      ++census.containing[c];
      if (!satisfies(election, committee.without(c), axiom)) ++census.pivotal[c];
    }
  }
  return census;
}

}  // namespace propvote
