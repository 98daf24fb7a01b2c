#include "propvote/axioms.hpp"

#include "propvote/rules.hpp"

#include <algorithm>
#include <stdexcept>

namespace propvote {

Axiom Axiom::t_ejr_plus(int t) {
  if (t < 1) throw std::invalid_argument("t-EJR+ needs t >= 1");
  return Axiom(Kind::t_ejr_plus, t);
}

Axiom Axiom::parse(const std::string& text) {
  if (text == "jr" || text == "JR") return jr();
  if (text == "ejrp" || text == "ejr+" || text == "EJR+") return ejr_plus();
  if (text.rfind("t:", 0) == 0) return t_ejr_plus(std::stoi(text.substr(2)));
  throw std::invalid_argument("unknown axiom '" + text + "' (expected jr, ejrp or t:<T>)");
}

int Axiom::level(int committee_size) const {
  switch (kind_) {
    case Kind::jr:
      return 1;
    case Kind::ejr_plus:
      return committee_size;
    case Kind::t_ejr_plus:
      return t_;
  }
  return 1;
}

std::string Axiom::name() const {
  switch (kind_) {
    case Kind::jr:
      return "jr";
    case Kind::ejr_plus:
      return "ejrp";
    case Kind::t_ejr_plus:
      return "t:" + std::to_string(t_);
  }
  return "?";
}

namespace {

// Per-voter |A_i ∩ W|.
std::vector<int> representation(const Election& election, const CandidateSet& committee) {
  const auto members = committee.to_bitset(election.num_candidates());
  std::vector<int> rep(election.num_voters());
  for (VoterId i = 0; i < election.num_voters(); ++i) rep[i] = election.ballot_set(i).count_and(members);
  return rep;
}

// Smallest (l, c) violation, or nullopt. With `want_group` the maximal
// deficient group is materialised.
std::optional<Violation> find_violation(const Election& election, const CandidateSet& committee, int t,
                                        bool want_group) {
  const int n = election.num_voters();
  const int m = election.num_candidates();
  const long long k = election.committee_size();
  election.validate(committee);
  if (t < 1 || t > k) throw std::invalid_argument("t must lie in [1, k]");

  int max_score = 0;
  std::vector<CandidateId> outside;
  for (CandidateId c = 0; c < m; ++c) {
    if (committee.contains(c)) continue;
    outside.push_back(c);
    max_score = std::max(max_score, election.approval_score(c));
  }
  if (outside.empty()) return std::nullopt;

  const auto rep = representation(election, committee);
  Bitset deficient(n);
  for (int ell = 1; ell <= t; ++ell) {
    // No group of size >= l*n/k can exist any more.
    if (max_score * k < static_cast<long long>(ell) * n) break;
    for (int i = 0; i < n; ++i)
      if (rep[i] == ell - 1) deficient.set(i);  // grows monotonically with l
    for (auto c : outside) {
      const auto& approvers = election.approvers(c);
      const long long count = approvers.count_and(deficient);
      if (count * k >= static_cast<long long>(ell) * n) {
        Violation v{c, ell, {}};
        if (want_group) {
          Bitset group = approvers;
          group &= deficient;
          v.group = group.members();
        }
        return v;
      }
    }
  }
  return std::nullopt;
}

}  // namespace

AxiomReport check_t_ejrp(const Election& election, const CandidateSet& committee, int t) {
  AxiomReport report;
  report.witness = find_violation(election, committee, t, true);
  report.satisfied = !report.witness.has_value();
  return report;
}

AxiomReport check_jr(const Election& election, const CandidateSet& committee) {
  return check_t_ejrp(election, committee, 1);
}

AxiomReport check_ejrp(const Election& election, const CandidateSet& committee) {
  return check_t_ejrp(election, committee, election.committee_size());
}

AxiomReport check(const Election& election, const CandidateSet& committee, const Axiom& axiom) {
  return check_t_ejrp(election, committee, axiom.level(election.committee_size()));
}

bool satisfies(const Election& election, const CandidateSet& committee, const Axiom& axiom) {
  return !find_violation(election, committee, axiom.level(election.committee_size()), false).has_value();
}

bool witness_is_valid(const Election& election, const CandidateSet& committee, const Violation& witness) {
  const long long n = election.num_voters();
  const long long k = election.committee_size();
  if (witness.candidate < 0 || witness.candidate >= election.num_candidates()) return false;
  if (committee.contains(witness.candidate) || witness.ell < 1) return false;
  if (static_cast<long long>(witness.group.size()) * k < witness.ell * n) return false;
  for (auto i : witness.group) {
    if (i < 0 || i >= n || !election.approvers(witness.candidate).test(i)) return false;
    int rep = 0;
    for (auto c : committee) rep += election.ballot_set(i).test(c) ? 1 : 0;
    if (rep >= witness.ell) return false;
  }
  return true;
}

Committee construct_ejrp_committee(const Election& election) {
  auto committee = mes_with_phragmen_completion(election);
  if (!check_ejrp(election, committee).satisfied)
    throw std::logic_error("equal-shares committee failed the EJR+ post-check");
  return committee;
}

}  // namespace propvote
