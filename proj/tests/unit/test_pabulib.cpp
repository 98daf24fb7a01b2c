#include "oracles.hpp"
#include "propvote/pabulib.hpp"

#include <doctest.h>

#include <set>

using namespace propvote;

namespace {

const char* kMinimal =
    "META\n"
    "key;value\n"
    "description;\"small; quoted\"\n"
    "vote_type;approval\n"
    "budget;10\n"
    "PROJECTS\n"
    "project_id;cost;name\n"
    "7;4;Park\n"
    "3;6;Library\n"
    "VOTES\n"
    "voter_id;vote\n"
    "a;7,3\n"
    "b;3\n"
    "c;\n";

std::string votes_file(const std::string& vote_type, const std::vector<std::string>& votes, int projects) {
  std::string text = "META\nkey;value\nvote_type;" + vote_type + "\nPROJECTS\nproject_id;cost\n";
  for (int p = 1; p <= projects; ++p) text += std::to_string(p) + ";1\n";
  text += "VOTES\nvoter_id;vote\n";
  for (std::size_t i = 0; i < votes.size(); ++i) text += std::to_string(i) + ";" + votes[i] + "\n";
  return text;
}

}  // namespace

TEST_SUITE("pabulib") {
  TEST_CASE("minimal file round-trips") {
    const auto file = parse_pabulib(kMinimal);
    CHECK(file.meta_value("description") == "small; quoted");
    CHECK(file.project_ids() == std::vector<std::string>{"7", "3"});
    CHECK(file.ballots()[0] == std::vector<std::string>{"7", "3"});
    CHECK(file.ballots()[2].empty());
    CHECK(emit_pabulib(file) == kMinimal);
    const auto again = parse_pabulib(emit_pabulib(file));
    CHECK(again.meta == file.meta);
    CHECK(again.projects.rows == file.projects.rows);
    CHECK(again.votes.rows == file.votes.rows);
  }

  TEST_CASE("conversion keeps file order") {
    const auto e = to_election(parse_pabulib(kMinimal), KExplicit{1});
    CHECK(e.num_candidates() == 2);
    CHECK(e.num_voters() == 3);
    CHECK(e.ballot(0) == std::vector<CandidateId>{0, 1});
    CHECK(e.ballot(1) == std::vector<CandidateId>{1});
    CHECK(e.candidate_label(0) == "7");
  }

  TEST_CASE("malformed files are rejected") {
    CHECK_THROWS_AS(parse_pabulib(votes_file("approval", {"1,9"}, 2)), PabulibError);
    CHECK_THROWS_AS(parse_pabulib("META\nkey;value\nPROJECTS\nproject_id;cost\n1;1\n"), PabulibError);
    CHECK_THROWS_AS(parse_pabulib("PROJECTS\nproject_id;cost\n1;1\n1;2\nVOTES\nvoter_id;vote\n"), PabulibError);
    CHECK_THROWS_AS(parse_pabulib("META\nkey;value\nvote_type;approval\nPROJECTS\nproject_id;cost\n1;1;9\nVOTES\n"
                                  "voter_id;vote\n"),
                    PabulibError);
  }

  TEST_CASE("k policies") {
    std::vector<std::string> votes{"1"};
    CHECK(to_election(parse_pabulib(votes_file("approval", votes, 27)), KHalf{}).committee_size() == 13);
    CHECK(to_election(parse_pabulib(votes_file("approval", votes, 9)), KOver{3}).committee_size() == 3);
    CHECK_THROWS_AS(to_election(parse_pabulib(votes_file("approval", votes, 9)), KExplicit{0}), std::invalid_argument);
    CHECK_THROWS_AS(to_election(parse_pabulib(votes_file("ordinal", votes, 9)), KHalf{}), PabulibError);
    CHECK(to_election(parse_pabulib(kMinimal), KBudgetOverAverageCost{}).committee_size() == 2);
    CHECK(std::holds_alternative<KHalf>(parse_k_policy("half")));
    CHECK(std::get<KOver>(parse_k_policy("over:4")).divisor == 4);
    CHECK(std::get<KExplicit>(parse_k_policy("explicit:7")).k == 7);
    CHECK(std::holds_alternative<KBudgetOverAverageCost>(parse_k_policy("budget-avg-cost")));
    CHECK_THROWS(parse_k_policy("third"));
  }

  TEST_CASE("dataset filter") {
    const auto four = parse_pabulib(votes_file("approval", {"1,2,3,4", "2,3,4,5", "1,3,5,6"}, 6));
    const auto small = parse_pabulib(votes_file("approval", {"1", "1,2", "1,2,3"}, 6));
    const auto ordinal = parse_pabulib(votes_file("ordinal", {"1,2,3,4,5"}, 6));
    const auto decisions = filter_dataset({four, small, ordinal});
    CHECK(decisions[0].included);
    CHECK(decisions[0].reason.empty());
    CHECK(!decisions[1].included);
    CHECK(!decisions[2].included);
    CHECK(!decisions[2].reason.empty());
  }

  TEST_CASE("fixture file matches the built-in profile") {
    const auto file = read_pabulib(std::string(PROPVOTE_TEST_DATA) + "/ten_voters.pb");
    const auto e = to_election(file, KExplicit{5});
    const auto expected = oracle::ten_voters();
    REQUIRE(e.num_voters() == expected.num_voters());
    for (VoterId i = 0; i < e.num_voters(); ++i) CHECK(e.ballot(i) == expected.ballot(i));
    CHECK(e.candidate_label(5) == "c6");
  }

  TEST_CASE("elections survive a trip through the file format") {
    std::mt19937_64 rng(6);
    for (int trial = 0; trial < 50; ++trial) {
      const auto e = oracle::random_election(rng, {1, 8, 1, 9});
      const auto back = to_election(parse_pabulib(emit_pabulib(election_to_pabulib(e))),
                                    KExplicit{e.committee_size()});
      REQUIRE(back.num_voters() == e.num_voters());
      CHECK(back.num_candidates() == e.num_candidates());
      for (VoterId i = 0; i < e.num_voters(); ++i) CHECK(back.ballot(i) == e.ballot(i));
    }
  }
}
