#include "propvote/milp.hpp"

#include <algorithm>

namespace propvote {

namespace {

struct ClassSubset {
  std::vector<int> classes;  // ascending
  std::vector<bool> member;  // indexed by class
};

// Class subsets of size <= k whose representatives satisfy JR.
std::vector<ClassSubset> justifying_subsets(const Election& e, const QuotientStructure& q, std::uint64_t cap) {
  const int k = e.committee_size();
  BigInt visits = 0;
  for (int j = 0; j <= std::min(k, q.size()); ++j) visits += binomial(q.size(), j);
  require_within_cap(visits, cap, "class subsets");

  std::vector<ClassSubset> out;
  std::vector<int> chosen;
  auto visit = [&](auto&& self, int next) -> void {
    std::vector<CandidateId> reps;
    for (int c : chosen) reps.push_back(q.classes[c].representative);
    if (check_jr(e, CandidateSet(reps)).satisfied) {
      ClassSubset s{chosen, std::vector<bool>(q.size(), false)};
      for (int c : chosen) s.member[c] = true;
      out.push_back(std::move(s));
    }
    if (static_cast<int>(chosen.size()) == k) return;
    for (int c = next; c < q.size(); ++c) {
      chosen.push_back(c);
      self(self, c + 1);
      chosen.pop_back();
    }
  };
  visit(visit, 0);
  return out;
}

// Two committees extending the pair at distance min(k - k_c, m - k): shared
// classes with a spare member use different members, free candidates are
// split between the committees, and any seats left over are filled from
// the other committee.
std::pair<Committee, Committee> realise(const Election& e, const QuotientStructure& q, const ClassSubset& x1,
                                        const ClassSubset& x2) {
  const int m = e.num_candidates();
  const int k = e.committee_size();
  std::vector<bool> in1(m, false), in2(m, false);
  for (int c : x1.classes) in1[q.classes[c].members[0]] = true;
  for (int c : x2.classes) {
    const auto& members = q.classes[c].members;
    in2[x1.member[c] && members.size() >= 2 ? members[1] : members[0]] = true;
  }
  int need1 = k - static_cast<int>(x1.classes.size());
  int need2 = k - static_cast<int>(x2.classes.size());
  for (CandidateId c = 0; c < m; ++c) {
    if (in1[c] || in2[c]) continue;
    if (need1 > 0) {
      in1[c] = true;
      --need1;
    } else if (need2 > 0) {
      in2[c] = true;
      --need2;
    }
  }
  for (CandidateId c = 0; c < m && need1 > 0; ++c)
    if (!in1[c]) in1[c] = true, --need1;
  for (CandidateId c = 0; c < m && need2 > 0; ++c)
    if (!in2[c]) in2[c] = true, --need2;

  std::vector<CandidateId> w1, w2;
  for (CandidateId c = 0; c < m; ++c) {
    if (in1[c]) w1.push_back(c);
    if (in2[c]) w2.push_back(c);
  }
  return {CandidateSet(std::move(w1)), CandidateSet(std::move(w2))};
}

}  // namespace

DiffCommitteesResult diff_committees_fpt_jr(const Election& election, int target, std::uint64_t subset_cap) {
  const int m = election.num_candidates();
  const int k = election.committee_size();
  const auto q = build_quotient(election);
  const auto justifying = justifying_subsets(election, q, subset_cap);
  if (justifying.empty()) throw std::logic_error("no JR class subset found; JR committees always exist");
  const auto count = static_cast<std::uint64_t>(justifying.size());
  require_within_cap(BigInt(count) * (count + 1) / 2, subset_cap, "JR class subset pairs");

  // Two k-subsets of m candidates differ in at most min(k, m - k) places.
  const int ceiling = std::min(k, m - k);
  int best = -1;
  std::size_t best_i = 0, best_j = 0;
  // Pairs include i == j: a single justifying subset may yield two committees.
  for (std::size_t i = 0; i < justifying.size() && best < ceiling; ++i)
    for (std::size_t j = i; j < justifying.size() && best < ceiling; ++j) {
      int forced_shared = 0;
      for (int c : justifying[i].classes)
        if (justifying[j].member[c] && q.classes[c].size() == 1) ++forced_shared;
      const int d = std::min(k - forced_shared, m - k);
      if (d > best) {
        best = d;
        best_i = i;
        best_j = j;
      }
    }

  DiffCommitteesResult result;
  result.max_distance = best;
  result.yes = target <= best;
  result.witness = realise(election, q, justifying[best_i], justifying[best_j]);
  const auto& [w1, w2] = result.witness;
  if (w1.size() != k || w2.size() != k || !check_jr(election, w1).satisfied || !check_jr(election, w2).satisfied ||
      committee_distance(w1, w2) != best)
    throw std::logic_error("diff-committees witness construction failed");
  return result;
}

}  // namespace propvote
