#include "propvote/rules.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace propvote {

namespace {

// rank[c] = position of c in the tie order.
std::vector<int> tie_ranks(const Election& election, const TieOrder& ties) {
  const int m = election.num_candidates();
  std::vector<int> rank(m);
  if (ties.empty()) {
    std::iota(rank.begin(), rank.end(), 0);
    return rank;
  }
  if (static_cast<int>(ties.size()) != m) throw std::invalid_argument("tie order must list every candidate");
  std::vector<bool> seen(m, false);
  for (int pos = 0; pos < m; ++pos) {
    const auto c = ties[pos];
    if (c < 0 || c >= m || seen[c]) throw std::invalid_argument("tie order is not a permutation");
    seen[c] = true;
    rank[c] = pos;
  }
  return rank;
}

// Candidates in tie order.
std::vector<CandidateId> by_rank(const std::vector<int>& rank) {
  std::vector<CandidateId> order(rank.size());
  for (CandidateId c = 0; c < static_cast<int>(rank.size()); ++c) order[rank[c]] = c;
  return order;
}

// Smallest rho with sum_i min(budget_i, rho) = 1, or nullopt if the
// supporters cannot afford the candidate.
std::optional<Rational> equal_share_price(std::vector<Rational> budgets) {
  std::sort(budgets.begin(), budgets.end());
  Rational remaining = 1;
  auto payers = static_cast<long long>(budgets.size());
  for (const auto& b : budgets) {
    if (b * payers >= remaining) return remaining / payers;
    remaining -= b;
    --payers;
  }
  return std::nullopt;
}

}  // namespace

Committee method_of_equal_shares(const Election& election, const TieOrder& ties) {
  const int n = election.num_voters();
  const int m = election.num_candidates();
  const int k = election.committee_size();
  const auto order = by_rank(tie_ranks(election, ties));

  std::vector<Rational> budget(n, Rational(k, n));
  std::vector<bool> chosen(m, false);
  std::vector<CandidateId> winners;
  while (static_cast<int>(winners.size()) < k) {
    std::optional<Rational> best_price;
    CandidateId best = -1;
    for (auto c : order) {
      if (chosen[c] || election.approval_score(c) == 0) continue;
      std::vector<Rational> budgets;
      for (auto i : election.approvers(c).members()) budgets.push_back(budget[i]);
      auto price = equal_share_price(std::move(budgets));
      if (price && (!best_price || *price < *best_price)) {
        best_price = price;
        best = c;
      }
    }
    if (best < 0) break;
    for (auto i : election.approvers(best).members()) budget[i] -= std::min(budget[i], *best_price);
    chosen[best] = true;
    winners.push_back(best);
  }
  return CandidateSet(std::move(winners));
}

Committee seq_phragmen_from(const Election& election, const CandidateSet& seated, const TieOrder& ties) {
  election.validate(seated);
  const int m = election.num_candidates();
  const int k = election.committee_size();
  if (seated.size() > k) throw std::invalid_argument("more seated candidates than seats");
  const auto order = by_rank(tie_ranks(election, ties));

  std::vector<Rational> load(election.num_voters(), Rational(0));
  std::vector<bool> chosen(m, false);
  std::vector<CandidateId> winners(seated.begin(), seated.end());
  for (auto c : seated) chosen[c] = true;

  while (static_cast<int>(winners.size()) < k) {
    std::optional<Rational> best_load;
    CandidateId best = -1;
    for (auto c : order) {
      if (chosen[c] || election.approval_score(c) == 0) continue;
      Rational total = 1;
      for (auto i : election.approvers(c).members()) total += load[i];
      Rational candidate_load = total / election.approval_score(c);
      if (!best_load || candidate_load < *best_load) {
        best_load = std::move(candidate_load);
        best = c;
      }
    }
    if (best < 0) {
      // Only unsupported candidates remain.
      for (auto c : order) {
        if (static_cast<int>(winners.size()) == k) break;
        if (!chosen[c]) {
          chosen[c] = true;
          winners.push_back(c);
        }
      }
      break;
    }
    for (auto i : election.approvers(best).members()) load[i] = *best_load;
    chosen[best] = true;
    winners.push_back(best);
  }
  return CandidateSet(std::move(winners));
}

Committee seq_phragmen(const Election& election, const TieOrder& ties) {
  return seq_phragmen_from(election, {}, ties);
}

Committee mes_with_phragmen_completion(const Election& election, const TieOrder& ties) {
  return seq_phragmen_from(election, method_of_equal_shares(election, ties), ties);
}

Committee seq_pav(const Election& election, const TieOrder& ties) {
  const int n = election.num_voters();
  const int m = election.num_candidates();
  const int k = election.committee_size();
  const auto order = by_rank(tie_ranks(election, ties));

  std::vector<int> rep(n, 0);
  std::vector<bool> chosen(m, false);
  std::vector<CandidateId> winners;
  while (static_cast<int>(winners.size()) < k) {
    std::optional<Rational> best_gain;
    CandidateId best = -1;
    for (auto c : order) {
      if (chosen[c]) continue;
      Rational gain = 0;
      for (auto i : election.approvers(c).members()) gain += Rational(1, rep[i] + 1);
      if (!best_gain || gain > *best_gain) {
        best_gain = std::move(gain);
        best = c;
      }
    }
    for (auto i : election.approvers(best).members()) ++rep[i];
    chosen[best] = true;
    winners.push_back(best);
  }
  return CandidateSet(std::move(winners));
}

namespace {

template <typename Score>
Committee top_k(const Election& election, std::span<const Score> scores) {
  const int m = election.num_candidates();
  if (static_cast<int>(scores.size()) != m) throw std::invalid_argument("need one score per candidate");
  std::vector<CandidateId> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](CandidateId a, CandidateId b) { return scores[a] > scores[b]; });
  order.resize(election.committee_size());
  return CandidateSet(std::move(order));
}

}  // namespace

Committee top_k_by_score(const Election& election, std::span<const Rational> scores) {
  return top_k(election, scores);
}

Committee top_k_by_score(const Election& election, std::span<const double> scores) {
  return top_k(election, scores);
}

Rational relative_overlap(const CandidateSet& first, const CandidateSet& second) {
  if (first.size() != second.size() || first.empty())
    throw std::invalid_argument("relative overlap needs two non-empty sets of equal size");
  return Rational(first.size() - committee_distance(first, second), first.size());
}

}  // namespace propvote
