#include "oracles.hpp"
#include "propvote/axioms.hpp"
#include "propvote/rules.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>

using namespace propvote;

namespace {

using Rule = Committee (*)(const Election&, const TieOrder&);

Election permute_voters(const Election& e, std::mt19937_64& rng) {
  std::vector<std::vector<CandidateId>> ballots;
  for (VoterId i = 0; i < e.num_voters(); ++i) ballots.push_back(e.ballot(i));
  std::shuffle(ballots.begin(), ballots.end(), rng);
  return Election(e.num_candidates(), ballots, e.committee_size());
}

}  // namespace

TEST_SUITE("rules") {
  TEST_CASE("equal shares with completion") {
    CHECK(mes_with_phragmen_completion(Election(2, {{0}, {0}, {0}, {1}}, 2)) == CandidateSet{0, 1});
    CHECK(mes_with_phragmen_completion(Election(5, {{}, {}}, 3)) == CandidateSet{0, 1, 2});
    CHECK(check_ejrp(oracle::ten_voters(), mes_with_phragmen_completion(oracle::ten_voters())).satisfied);
  }

  TEST_CASE("seq-Phragmen examples") {
    CHECK(seq_phragmen(Election(2, {{0}, {0}}, 1)) == CandidateSet{0});
    // c1 first (load 1/2 each); then c2 and c3 both reach load 1, and the id
    // tie-break picks c2.
    CHECK(seq_phragmen(Election(3, {{0, 1}, {0, 1}, {2}}, 2)) == CandidateSet{0, 1});
    CHECK(seq_phragmen(Election(4, {{}, {}}, 2)) == CandidateSet{0, 1});
    CHECK(seq_phragmen_from(Election(3, {{0, 1}, {0, 1}, {2}}, 2), {2}) == CandidateSet{0, 2});
  }

  TEST_CASE("seq-PAV examples") {
    CHECK(seq_pav(Election(3, {{0, 1}, {0, 1}, {2}}, 2)) == CandidateSet{0, 1});
    CHECK(seq_pav(Election(3, {{1}}, 1)) == CandidateSet{1});
    CHECK(seq_pav(Election(4, {{}, {}}, 2)) == CandidateSet{0, 1});
  }

  TEST_CASE("seq-PAV with k = 1 picks the top approval score") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
      const auto e = oracle::random_election_with_k(rng, {1, 7, 1, 8}, 1);
      CandidateId best = 0;
      for (CandidateId c = 1; c < e.num_candidates(); ++c)
        if (e.approval_score(c) > e.approval_score(best)) best = c;
      CHECK(seq_pav(e) == CandidateSet{best});
    }
  }

  TEST_CASE("top-k by score") {
    const auto e = oracle::ten_voters();
    std::vector<Rational> scores;
    for (CandidateId c = 0; c < 9; ++c) scores.push_back(e.approval_score(c));
    CHECK(top_k_by_score(e, scores) == CandidateSet{0, 1, 2, 4, 5});
    const std::vector<double> flat(9, 0.5);
    CHECK(top_k_by_score(e, flat) == CandidateSet::first(5));
    std::vector<double> decreasing(9);
    std::iota(decreasing.rbegin(), decreasing.rend(), 1.0);
    CHECK(top_k_by_score(e, decreasing) == CandidateSet::first(5));
  }

  TEST_CASE("relative overlap") {
    CHECK(relative_overlap({0, 1}, {0, 1}) == 1);
    CHECK(relative_overlap({0, 1}, {2, 3}) == 0);
    CHECK(relative_overlap({0, 1}, {1, 2}) == Rational(1, 2));
  }

  TEST_CASE("equal shares output satisfies EJR+") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 300; ++trial) {
      const auto e = oracle::random_election(rng, {1, 7, 1, 9});
      const auto w = mes_with_phragmen_completion(e);
      CHECK(w.size() == e.committee_size());
      CHECK(oracle::satisfies_ejrp(e, oracle::to_mask(w)));
    }
  }

  TEST_CASE("rules are anonymous and neutral") {
    std::mt19937_64 rng(23);
    const Rule rules[] = {mes_with_phragmen_completion, seq_phragmen, seq_pav};
    for (int trial = 0; trial < 100; ++trial) {
      const auto e = oracle::random_election(rng, {1, 7, 1, 8});
      const auto shuffled = permute_voters(e, rng);
      // Relabel candidates by pi and carry the tie order along, so that the
      // relabelled election breaks ties on the same underlying candidates.
      TieOrder pi(e.num_candidates());
      std::iota(pi.begin(), pi.end(), 0);
      std::shuffle(pi.begin(), pi.end(), rng);
      std::vector<std::vector<CandidateId>> relabelled_ballots;
      for (VoterId i = 0; i < e.num_voters(); ++i) {
        std::vector<CandidateId> b;
        for (CandidateId c : e.ballot(i)) b.push_back(pi[c]);
        relabelled_ballots.push_back(b);
      }
      const Election relabelled(e.num_candidates(), relabelled_ballots, e.committee_size());
      for (Rule rule : rules) {
        const auto w = rule(e, {});
        CHECK(w.size() == e.committee_size());
        CHECK(rule(shuffled, {}) == w);
        std::vector<CandidateId> mapped;
        for (CandidateId c : w) mapped.push_back(pi[c]);
        CHECK(rule(relabelled, pi) == CandidateSet(mapped));
      }
    }
  }
}
