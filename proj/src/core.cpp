#include "propvote/core.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <sstream>

namespace propvote {

// ---------------------------------------------------------------- Bitset

Bitset::Bitset(int size) : size_(size), words_((size + 63) / 64, 0) {}

bool Bitset::none() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

int Bitset::count() const {
  int total = 0;
  for (auto w : words_) total += std::popcount(w);
  return total;
}

int Bitset::count_and(const Bitset& other) const {
  int total = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) total += std::popcount(words_[i] & other.words_[i]);
  return total;
}

int Bitset::count_and_not(const Bitset& other) const {
  int total = 0;
  for (std::size_t i = 0; i < words_.size(); ++i) total += std::popcount(words_[i] & ~other.words_[i]);
  return total;
}

Bitset& Bitset::operator|=(const Bitset& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

Bitset& Bitset::operator&=(const Bitset& other) {
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

std::vector<int> Bitset::members() const {
  std::vector<int> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    auto word = words_[w];
    while (word != 0) {
      out.push_back(static_cast<int>(w * 64 + std::countr_zero(word)));
      word &= word - 1;
    }
  }
  return out;
}

// ---------------------------------------------------------- CandidateSet

CandidateSet::CandidateSet(std::initializer_list<CandidateId> ids)
    : CandidateSet(std::vector<CandidateId>(ids)) {}

CandidateSet::CandidateSet(std::vector<CandidateId> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  if (!ids_.empty() && ids_.front() < 0) throw std::invalid_argument("negative candidate id");
  if (std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end())
    throw std::invalid_argument("candidate set contains a repeated id");
}

CandidateSet CandidateSet::first(int count) {
  CandidateSet out;
  out.ids_.resize(count);
  for (int i = 0; i < count; ++i) out.ids_[i] = i;
  return out;
}

bool CandidateSet::contains(CandidateId c) const { return std::binary_search(ids_.begin(), ids_.end(), c); }

CandidateSet CandidateSet::with(CandidateId c) const {
  CandidateSet out = *this;
  auto it = std::lower_bound(out.ids_.begin(), out.ids_.end(), c);
  if (it == out.ids_.end() || *it != c) out.ids_.insert(it, c);
  return out;
}

CandidateSet CandidateSet::without(CandidateId c) const {
  CandidateSet out = *this;
  auto it = std::lower_bound(out.ids_.begin(), out.ids_.end(), c);
  if (it != out.ids_.end() && *it == c) out.ids_.erase(it);
  return out;
}

Bitset CandidateSet::to_bitset(int num_candidates) const {
  Bitset bits(num_candidates);
  for (auto c : ids_) bits.set(c);
  return bits;
}

// -------------------------------------------------------------- Election

Election::Election(int num_candidates, std::vector<std::vector<CandidateId>> ballots, int committee_size,
                   ElectionInfo info)
    : num_candidates_(num_candidates),
      committee_size_(committee_size),
      ballots_(std::move(ballots)),
      info_(std::move(info)) {
  if (num_candidates_ < 1) throw std::invalid_argument("election needs at least one candidate");
  if (ballots_.empty()) throw std::invalid_argument("election needs at least one voter");
  if (committee_size_ < 1 || committee_size_ > num_candidates_)
    throw std::invalid_argument("committee size " + std::to_string(committee_size_) + " outside [1, " +
                                std::to_string(num_candidates_) + "]");

  const int n = num_voters();
  approvers_.assign(num_candidates_, Bitset(n));
  approval_scores_.assign(num_candidates_, 0);
  ballot_sets_.reserve(n);
  for (int i = 0; i < n; ++i) {
    auto& ballot = ballots_[i];
    std::sort(ballot.begin(), ballot.end());
    ballot.erase(std::unique(ballot.begin(), ballot.end()), ballot.end());
    Bitset set(num_candidates_);
    for (auto c : ballot) {
      if (c < 0 || c >= num_candidates_)
        throw std::invalid_argument("ballot of voter " + std::to_string(i) + " names candidate " +
                                    std::to_string(c) + " outside [0, " + std::to_string(num_candidates_) + ")");
      set.set(c);
      approvers_[c].set(i);
      ++approval_scores_[c];
    }
    ballot_sets_.push_back(std::move(set));
  }
}

Election Election::with_committee_size(int committee_size) const {
  return Election(num_candidates_, ballots_, committee_size, info_);
}

std::string Election::candidate_label(CandidateId c) const {
  if (c >= 0 && c < static_cast<int>(info_.candidate_labels.size())) return info_.candidate_labels[c];
  return "c" + std::to_string(c + 1);
}

void Election::validate(const CandidateSet& set) const {
  if (!set.empty() && set.ids().back() >= num_candidates_)
    throw std::invalid_argument("candidate " + std::to_string(set.ids().back()) + " is not part of the election");
}

Election build_election(std::vector<std::vector<CandidateId>> ballots, int num_candidates, int committee_size) {
  return Election(num_candidates, std::move(ballots), committee_size);
}

// ------------------------------------------------------------- distances

int committee_distance(const CandidateSet& first, const CandidateSet& second) {
  if (first.size() != second.size()) throw std::invalid_argument("committee distance needs equal-size sets");
  int shared = 0;
  auto a = first.begin();
  auto b = second.begin();
  while (a != first.end() && b != second.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++shared;
      ++a;
      ++b;
    }
  }
  return first.size() - shared;
}

Rational expected_random_distance(int num_candidates, int committee_size) {
  if (num_candidates < 1 || committee_size < 1 || committee_size > num_candidates)
    throw std::invalid_argument("committee size outside [1, m]");
  // Each member of W1 misses W2 with probability (m-k)/m.
  return Rational(committee_size * (num_candidates - committee_size), num_candidates);
}

// -------------------------------------------------------------- quotient

QuotientStructure build_quotient(const Election& election, const CandidateSet& excluded) {
  election.validate(excluded);
  QuotientStructure q;
  q.class_of.assign(election.num_candidates(), -1);
  std::map<Bitset, int> index;
  for (CandidateId c = 0; c < election.num_candidates(); ++c) {
    if (excluded.contains(c)) continue;
    auto [it, inserted] = index.try_emplace(election.approvers(c), q.size());
    if (inserted) q.classes.push_back(EquivalenceClass{c, {}, election.approvers(c)});
    q.classes[it->second].members.push_back(c);
    q.class_of[c] = it->second;
  }
  return q;
}

// ------------------------------------------------------------- binomials

BigInt binomial(int n, int r) {
  if (r < 0 || n < 0 || r > n) return 0;
  r = std::min(r, n - r);
  BigInt value = 1;
  for (int i = 1; i <= r; ++i) {
    value *= n - r + i;
    value /= i;
  }
  return value;
}

BinomialTable::BinomialTable(int max_n) : max_n_(max_n), rows_(max_n + 1) {
  for (int n = 0; n <= max_n; ++n) {
    rows_[n].resize(n + 1);
    rows_[n][0] = rows_[n][n] = 1;
    for (int r = 1; r < n; ++r) rows_[n][r] = rows_[n - 1][r - 1] + rows_[n - 1][r];
  }
}

const BigInt& BinomialTable::operator()(int n, int r) const {
  if (n > max_n_) throw std::out_of_range("binomial table too small");
  if (n < 0 || r < 0 || r > n) return zero_;
  return rows_[n][r];
}

// ----------------------------------------------------------- enumeration

CombinationStream::CombinationStream(std::vector<CandidateId> pool, int r, CandidateSet fixed)
    : pool_(std::move(pool)), fixed_(std::move(fixed)), index_(std::max(r, 0)) {
  if (r < 0 || r > static_cast<int>(pool_.size())) done_ = true;
  for (int i = 0; i < static_cast<int>(index_.size()); ++i) index_[i] = i;
}

bool CombinationStream::next(CandidateSet& out) {
  if (done_) return false;
  const int r = static_cast<int>(index_.size());
  const int size = static_cast<int>(pool_.size());
  if (started_) {
    int i = r - 1;
    while (i >= 0 && index_[i] == size - r + i) --i;
    if (i < 0) {
      done_ = true;
      return false;
    }
    ++index_[i];
    for (int j = i + 1; j < r; ++j) index_[j] = index_[j - 1] + 1;
  }
  started_ = true;
  std::vector<CandidateId> ids = fixed_.ids();
  for (int i : index_) ids.push_back(pool_[i]);
  out = CandidateSet(std::move(ids));
  return true;
}

void require_within_cap(const BigInt& count, std::uint64_t cap, const std::string& what) {
  if (count > cap) {
    std::ostringstream msg;
    msg << what << ": " << count << " exceeds the cap of " << cap;
    throw CapExceeded(msg.str());
  }
}

CombinationStream enumerate_committees(const Election& election, std::uint64_t cap) {
  return enumerate_committees_containing(election, {}, cap);
}

CombinationStream enumerate_committees_containing(const Election& election, const CandidateSet& required,
                                                  std::uint64_t cap) {
  election.validate(required);
  const int m = election.num_candidates();
  const int k = election.committee_size();
  std::vector<CandidateId> pool;
  for (CandidateId c = 0; c < m; ++c)
    if (!required.contains(c)) pool.push_back(c);
  const int r = k - required.size();
  require_within_cap(binomial(static_cast<int>(pool.size()), r), cap, "committee enumeration");
  return CombinationStream(std::move(pool), r, required);
}

double to_double(const Rational& value) { return value.convert_to<double>(); }

std::string to_string(const Rational& value) {
  std::ostringstream out;
  out << numerator(value);
  if (denominator(value) != 1) out << '/' << denominator(value);
  return out.str();
}

}  // namespace propvote
