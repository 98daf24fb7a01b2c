#include "propvote/milp.hpp"

#include <algorithm>
#include <numeric>

namespace propvote {

namespace {

// Branching tiers for the built-in backend: committee variables first,
// then witness and difference variables, then voter bookkeeping.
constexpr int kCommitteeTier = 0;
constexpr int kWitnessTier = 1;
constexpr int kVoterTier = 2;

void require_supported(const Axiom& axiom) {
  if (!(axiom == Axiom::jr() || axiom == Axiom::ejr_plus()))
    throw std::invalid_argument("integer programs support the jr and ejrp axioms only");
}

std::string idx(const std::string& base, int i) { return base + "_" + std::to_string(i); }
std::string idx(const std::string& base, int i, int j) { return idx(base, i) + "_" + std::to_string(j); }

std::vector<Term> unit_terms(const std::vector<int>& vars) {
  std::vector<Term> terms;
  for (int v : vars) terms.push_back(Term{v, 1});
  return terms;
}

// Approver groups per "unit": a unit is a candidate in plain models and an
// equivalence class in quotient models.
struct Units {
  int count = 0;
  std::vector<int> size;                   // candidates per unit
  std::vector<std::vector<VoterId>> approvers;
  std::vector<std::vector<int>> of_voter;  // units approved by each voter
};

Units plain_units(const Election& e) {
  Units u;
  u.count = e.num_candidates();
  u.size.assign(u.count, 1);
  u.of_voter.resize(e.num_voters());
  for (CandidateId c = 0; c < u.count; ++c) u.approvers.push_back(e.approvers(c).members());
  for (VoterId i = 0; i < e.num_voters(); ++i) u.of_voter[i] = e.ballot(i);
  return u;
}

Units class_units(const Election& e, const QuotientStructure& q) {
  Units u;
  u.count = q.size();
  u.of_voter.resize(e.num_voters());
  for (int j = 0; j < q.size(); ++j) {
    u.size.push_back(q.classes[j].size());
    u.approvers.push_back(q.classes[j].approvers.members());
    for (VoterId i : u.approvers.back()) u.of_voter[i].push_back(j);
  }
  return u;
}

// Voter coverage y_i with y_i = 1 iff voter i approves a present unit, and
// for each unit: sum over approvers of (1 - y_i) < n/k, scaled by k.
std::vector<int> add_jr_block(MilpModel& model, const Election& e, const Units& units, const std::vector<int>& present,
                              const std::string& voter_name, const std::string& tag) {
  const int n = e.num_voters();
  const int k = e.committee_size();
  std::vector<int> y(n);
  for (VoterId i = 0; i < n; ++i) y[i] = model.add_binary(idx(voter_name, i), kVoterTier, true);
  for (VoterId i = 0; i < n; ++i) {
    std::vector<Term> upper{{y[i], 1}};
    for (int j : units.of_voter[i]) {
      model.add_constraint(idx(tag + "_cov", i, j), {{y[i], 1}, {present[j], -1}}, Sense::ge, 0);
      upper.push_back(Term{present[j], -1});
    }
    model.add_constraint(idx(tag + "_rep", i), std::move(upper), Sense::le, 0);
  }
  for (int j = 0; j < units.count; ++j) {
    const auto& nj = units.approvers[j];
    const std::int64_t rhs = static_cast<std::int64_t>(k) * static_cast<std::int64_t>(nj.size()) - n + 1;
    if (rhs <= 0) continue;  // holds for every assignment
    std::vector<Term> terms;
    for (VoterId i : nj) terms.push_back(Term{y[i], k});
    model.add_constraint(idx(tag + "_jr", j), std::move(terms), Sense::ge, rhs);
  }
  return y;
}

// y_{i,l} = 1 only if voter i has at least l committee members (counted by
// `count`), and for each unit and level l: sum over approvers of
// (1 - y_{i,l}) < l*n/k + n*[unit exhausted], scaled by k.
std::vector<int> add_ejrp_block(MilpModel& model, const Election& e, const Units& units, const std::vector<int>& count,
                                const std::vector<int>& exhausted, const std::string& voter_name,
                                const std::string& tag) {
  const int n = e.num_voters();
  const int k = e.committee_size();
  std::vector<int> y(static_cast<std::size_t>(n) * k);
  for (VoterId i = 0; i < n; ++i)
    for (int l = 1; l <= k; ++l) y[i * k + l - 1] = model.add_binary(idx(voter_name, i, l), kVoterTier, true);
  for (VoterId i = 0; i < n; ++i)
    for (int l = 1; l <= k; ++l) {
      std::vector<Term> terms{{y[i * k + l - 1], l}};
      for (int j : units.of_voter[i]) terms.push_back(Term{count[j], -1});
      model.add_constraint(idx(tag + "_lvl", i, l), std::move(terms), Sense::le, 0);
    }
  for (int j = 0; j < units.count; ++j) {
    const auto& nj = units.approvers[j];
    for (int l = 1; l <= k; ++l) {
      const std::int64_t rhs =
          static_cast<std::int64_t>(k) * static_cast<std::int64_t>(nj.size()) - static_cast<std::int64_t>(l) * n + 1;
      if (rhs <= 0) continue;
      std::vector<Term> terms;
      for (VoterId i : nj) terms.push_back(Term{y[i * k + l - 1], k});
      terms.push_back(Term{exhausted[j], static_cast<std::int64_t>(n) * k});
      model.add_constraint(idx(tag + "_ejrp", j, l), std::move(terms), Sense::ge, rhs);
    }
  }
  return y;
}

// Per-unit selection counts; for plain models the count is the binary
// membership variable itself.
std::vector<int> add_counts(MilpModel& model, const Units& units, bool quotient, const std::string& name) {
  std::vector<int> count(units.count);
  for (int j = 0; j < units.count; ++j)
    count[j] = quotient ? model.add_integer(idx(name, j), 0, units.size[j], kCommitteeTier)
                        : model.add_binary(idx(name, j), kCommitteeTier);
  return count;
}

// present_j = 1 iff count_j >= 1.
std::vector<int> add_presence(MilpModel& model, const Units& units, const std::vector<int>& count,
                              const std::string& name) {
  std::vector<int> present(units.count);
  for (int j = 0; j < units.count; ++j) {
    present[j] = model.add_binary(idx(name, j), kCommitteeTier, true);
    model.add_constraint(idx(name + "_lo", j), {{count[j], 1}, {present[j], -1}}, Sense::ge, 0);
    model.add_constraint(idx(name + "_hi", j), {{count[j], 1}, {present[j], -units.size[j]}}, Sense::le, 0);
  }
  return present;
}

// full_j = 1 iff count_j = |class j|.
std::vector<int> add_fullness(MilpModel& model, const Units& units, const std::vector<int>& count,
                              const std::string& name) {
  std::vector<int> full(units.count);
  for (int j = 0; j < units.count; ++j) {
    full[j] = model.add_binary(idx(name, j), kWitnessTier, true);
    model.add_constraint(idx(name + "_if", j), {{count[j], 1}, {full[j], -units.size[j]}}, Sense::ge, 0);
    model.add_constraint(idx(name + "_only", j), {{count[j], 1}, {full[j], -1}}, Sense::le, units.size[j] - 1);
  }
  return full;
}

struct CommitteeVars {
  std::vector<int> count, present, full, voters;
};

// One committee of size k satisfying `axiom`, over plain or class units.
CommitteeVars add_committee(MilpModel& model, const Election& e, const Units& units, bool quotient,
                            const Axiom& axiom, const std::string& count_name, const std::string& voter_name,
                            const std::string& tag) {
  CommitteeVars c;
  c.count = add_counts(model, units, quotient, count_name);
  model.add_constraint(tag + "_size", unit_terms(c.count), Sense::eq, e.committee_size());
  if (axiom == Axiom::jr()) {
    c.present = quotient ? add_presence(model, units, c.count, count_name + "p") : c.count;
    c.voters = add_jr_block(model, e, units, c.present, voter_name, tag);
  } else {
    c.full = quotient ? add_fullness(model, units, c.count, count_name + "h") : c.count;
    c.voters = add_ejrp_block(model, e, units, c.count, c.full, voter_name, tag);
  }
  return c;
}

ProblemBinding make_binding(const Election& e, ProblemSpec spec, bool quotient) {
  ProblemBinding binding;
  binding.spec = std::move(spec);
  binding.election = std::make_shared<const Election>(e);
  binding.layout.quotient = quotient;
  if (quotient) binding.quotient = build_quotient(e);
  return binding;
}

MilpModel jr_not_ejrp_model(const Election& e, bool quotient) {
  auto binding = make_binding(e, ProblemSpec{ProblemKind::jr_not_ejrp, Axiom::jr(), {}}, quotient);
  const Units units = quotient ? class_units(e, binding.quotient) : plain_units(e);
  const int n = e.num_voters();
  const int m = e.num_candidates();
  const int k = e.committee_size();
  MilpModel model(quotient ? "jr-not-ejrp-quotient" : "jr-not-ejrp");
  auto& layout = binding.layout;

  // Plain: x_j membership. Quotient: z_j counts with x_j presence.
  const auto committee = add_committee(model, e, units, quotient, Axiom::jr(), quotient ? "z" : "x", "y", "w");
  layout.x = committee.count;
  if (quotient) layout.x_present = committee.present;
  layout.y = committee.voters;

  // l >= 2; l <= k follows from k * sum(v) >= l * n.
  layout.ell = model.add_integer("ell", 2, std::max(2, k), kWitnessTier);
  for (VoterId i = 0; i < n; ++i) layout.v.push_back(model.add_binary(idx("v", i), kVoterTier, true));
  for (int j = 0; j < units.count; ++j) layout.u.push_back(model.add_binary(idx("u", j), kWitnessTier));
  if (quotient)
    for (int j = 0; j < units.count; ++j)
      layout.t.push_back(model.add_integer(idx("t", j), 0, units.size[j], kWitnessTier));

  std::vector<Term> group;
  for (int v : layout.v) group.push_back(Term{v, k});
  group.push_back(Term{layout.ell, -n});
  model.add_constraint("group_size", std::move(group), Sense::ge, 0);

  if (quotient) {
    model.add_constraint("witness", unit_terms(layout.t), Sense::ge, 1);
    for (int j = 0; j < units.count; ++j) {
      model.add_constraint(idx("witness_lo", j), {{layout.t[j], 1}, {layout.u[j], -1}}, Sense::ge, 0);
      model.add_constraint(idx("witness_hi", j), {{layout.t[j], 1}, {layout.u[j], -units.size[j]}}, Sense::le, 0);
      // Some member of the witness class stays outside the committee.
      model.add_constraint(idx("witness_out", j), {{layout.x[j], 1}, {layout.u[j], 1}}, Sense::le, units.size[j]);
    }
  } else {
    model.add_constraint("witness", unit_terms(layout.u), Sense::eq, 1);
    for (int j = 0; j < units.count; ++j)
      model.add_constraint(idx("witness_out", j), {{layout.u[j], 1}, {layout.x[j], 1}}, Sense::le, 1);
  }

  for (VoterId i = 0; i < n; ++i) {
    std::vector<bool> approved(units.count, false);
    for (int j : units.of_voter[i]) approved[j] = true;
    for (int j = 0; j < units.count; ++j)
      if (!approved[j]) model.add_constraint(idx("cohesive", i, j), {{layout.u[j], 1}, {layout.v[i], 1}}, Sense::le, 1);
    std::vector<Term> deficient;
    for (int j : units.of_voter[i]) deficient.push_back(Term{layout.x[j], 1});
    deficient.push_back(Term{layout.ell, -1});
    deficient.push_back(Term{layout.v[i], m});
    model.add_constraint(idx("deficient", i), std::move(deficient), Sense::le, m - 1);
  }

  model.set_objective(ObjectiveSense::feasibility);
  model.set_binding(std::move(binding));
  return model;
}

MilpModel diff_model(const Election& e, const Axiom& axiom, bool quotient) {
  require_supported(axiom);
  auto binding = make_binding(e, ProblemSpec{ProblemKind::diff_committees, axiom, {}}, quotient);
  const Units units = quotient ? class_units(e, binding.quotient) : plain_units(e);
  MilpModel model(std::string("diff-") + (axiom == Axiom::jr() ? "jr" : "ejrp") + (quotient ? "-quotient" : ""));
  auto& layout = binding.layout;

  const auto first = add_committee(model, e, units, quotient, axiom, "x", "y", "w1");
  const auto second = add_committee(model, e, units, quotient, axiom, "a", "b", "w2");
  layout.x = first.count;
  layout.a = second.count;
  layout.y = first.voters;
  layout.b = second.voters;
  if (quotient && axiom == Axiom::jr()) {
    layout.x_present = first.present;
    layout.a_present = second.present;
  }
  if (quotient && axiom == Axiom::ejr_plus()) {
    layout.x_full = first.full;
    layout.a_full = second.full;
  }

  for (int j = 0; j < units.count; ++j) {
    const int z = units.size[j] == 1 && !quotient ? model.add_binary(idx("z", j), kWitnessTier, true)
                                                  : model.add_integer(idx("z", j), 0, units.size[j], kWitnessTier, true);
    layout.z.push_back(z);
    model.add_constraint(idx("diff_in", j), {{z, 1}, {layout.x[j], -1}}, Sense::le, 0);
    model.add_constraint(idx("diff_out", j), {{z, 1}, {layout.a[j], 1}}, Sense::le, units.size[j]);
  }
  model.set_objective(ObjectiveSense::maximize, unit_terms(layout.z));
  model.set_binding(std::move(binding));
  return model;
}

MilpModel p_candidates_model(const Election& e, const CandidateSet& required, const Axiom& axiom, bool quotient) {
  require_supported(axiom);
  e.validate(required);
  if (required.size() > e.committee_size()) throw std::invalid_argument("more required candidates than seats");
  auto binding = make_binding(e, ProblemSpec{ProblemKind::p_candidates, axiom, required}, quotient);
  const Units units = quotient ? class_units(e, binding.quotient) : plain_units(e);
  MilpModel model(std::string("pcand-") + (axiom == Axiom::jr() ? "jr" : "ejrp") + (quotient ? "-quotient" : ""));
  auto& layout = binding.layout;

  const auto committee = add_committee(model, e, units, quotient, axiom, "x", "y", "w");
  layout.x = committee.count;
  layout.y = committee.voters;
  if (quotient && axiom == Axiom::jr()) layout.x_present = committee.present;
  if (quotient && axiom == Axiom::ejr_plus()) layout.x_full = committee.full;

  if (quotient) {
    std::vector<int> needed(units.count, 0);
    for (CandidateId c : required) ++needed[binding.quotient.class_of[c]];
    for (int j = 0; j < units.count; ++j)
      if (needed[j] > 0) model.add_constraint(idx("require", j), {{layout.x[j], 1}}, Sense::ge, needed[j]);
  } else {
    for (CandidateId c : required) model.add_constraint(idx("require", c), {{layout.x[c], 1}}, Sense::eq, 1);
  }
  model.set_objective(ObjectiveSense::feasibility);
  model.set_binding(std::move(binding));
  return model;
}

const ProblemBinding& require_binding(const MilpModel& model) {
  if (!model.binding()) throw std::invalid_argument("model has no problem binding");
  return *model.binding();
}

// Members chosen for a class count: `preferred` members first (in order),
// then the remaining members from the front or the back of the class.
std::vector<CandidateId> take_members(const EquivalenceClass& cls, std::int64_t count, bool from_back,
                                      const CandidateSet& preferred = {}) {
  std::vector<CandidateId> order;
  for (CandidateId c : cls.members)
    if (preferred.contains(c)) order.push_back(c);
  std::vector<CandidateId> rest;
  for (CandidateId c : cls.members)
    if (!preferred.contains(c)) rest.push_back(c);
  if (from_back) std::reverse(rest.begin(), rest.end());
  order.insert(order.end(), rest.begin(), rest.end());
  order.resize(static_cast<std::size_t>(count));
  return order;
}

Committee committee_from(const ProblemBinding& b, const std::vector<int>& vars, const Assignment& values,
                         bool from_back, const CandidateSet& preferred = {}) {
  std::vector<CandidateId> ids;
  if (!b.layout.quotient) {
    for (std::size_t c = 0; c < vars.size(); ++c)
      if (values[vars[c]] == 1) ids.push_back(static_cast<CandidateId>(c));
  } else {
    for (std::size_t j = 0; j < vars.size(); ++j) {
      const auto members = take_members(b.quotient.classes[j], values[vars[j]], from_back, preferred);
      ids.insert(ids.end(), members.begin(), members.end());
    }
  }
  return CandidateSet(std::move(ids));
}

// Assigns counts, presence, fullness and voter variables for one committee.
void encode_committee(const ProblemBinding& b, const Committee& w, const std::vector<int>& count,
                      const std::vector<int>& present, const std::vector<int>& full, const std::vector<int>& voters,
                      Assignment& out) {
  const Election& e = *b.election;
  const int k = e.committee_size();
  if (!b.layout.quotient) {
    for (CandidateId c = 0; c < e.num_candidates(); ++c) out[count[c]] = w.contains(c) ? 1 : 0;
  } else {
    std::vector<std::int64_t> hits(b.quotient.size(), 0);
    for (CandidateId c : w) ++hits[b.quotient.class_of[c]];
    for (int j = 0; j < b.quotient.size(); ++j) {
      out[count[j]] = hits[j];
      if (!present.empty()) out[present[j]] = hits[j] > 0 ? 1 : 0;
      if (!full.empty()) out[full[j]] = hits[j] == b.quotient.classes[j].size() ? 1 : 0;
    }
  }
  const auto members = w.to_bitset(e.num_candidates());
  const bool per_level = b.spec.kind != ProblemKind::jr_not_ejrp && b.spec.axiom == Axiom::ejr_plus();
  for (VoterId i = 0; i < e.num_voters(); ++i) {
    const int rep = e.ballot_set(i).count_and(members);
    if (per_level)
      for (int l = 1; l <= k; ++l) out[voters[i * k + l - 1]] = rep >= l ? 1 : 0;
    else
      out[voters[i]] = rep > 0 ? 1 : 0;
  }
}

}  // namespace

MilpModel build_jr_not_ejrp(const Election& election) { return jr_not_ejrp_model(election, false); }

MilpModel build_diff_committees(const Election& election, const Axiom& axiom) {
  return diff_model(election, axiom, false);
}

MilpModel build_p_candidates(const Election& election, const CandidateSet& required, const Axiom& axiom) {
  return p_candidates_model(election, required, axiom, false);
}

MilpModel build_quotient_variant(const Election& election, const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemKind::jr_not_ejrp:
      return jr_not_ejrp_model(election, true);
    case ProblemKind::diff_committees:
      return diff_model(election, spec.axiom, true);
    case ProblemKind::p_candidates:
      return p_candidates_model(election, spec.required, spec.axiom, true);
  }
  throw std::invalid_argument("unknown problem kind");
}

MilpModel build_model(const Election& election, const ProblemSpec& spec, bool quotient) {
  if (quotient) return build_quotient_variant(election, spec);
  switch (spec.kind) {
    case ProblemKind::jr_not_ejrp:
      return build_jr_not_ejrp(election);
    case ProblemKind::diff_committees:
      return build_diff_committees(election, spec.axiom);
    case ProblemKind::p_candidates:
      return build_p_candidates(election, spec.required, spec.axiom);
  }
  throw std::invalid_argument("unknown problem kind");
}

DecodedSolution decode(const MilpModel& model, const Assignment& values) {
  const auto& b = require_binding(model);
  const auto& layout = b.layout;
  if (static_cast<int>(values.size()) != model.num_variables())
    throw std::invalid_argument("assignment has the wrong length");
  DecodedSolution out;
  switch (b.spec.kind) {
    case ProblemKind::jr_not_ejrp: {
      out.first = committee_from(b, layout.x, values, false);
      Violation witness{-1, static_cast<int>(values[layout.ell]), {}};
      for (std::size_t j = 0; j < layout.u.size() && witness.candidate < 0; ++j) {
        if (values[layout.u[j]] != 1) continue;
        if (!layout.quotient) {
          witness.candidate = static_cast<CandidateId>(j);
        } else {
          for (CandidateId c : b.quotient.classes[j].members)
            if (!out.first->contains(c)) {
              witness.candidate = c;
              break;
            }
        }
      }
      for (std::size_t i = 0; i < layout.v.size(); ++i)
        if (values[layout.v[i]] == 1) witness.group.push_back(static_cast<VoterId>(i));
      out.witness = std::move(witness);
      break;
    }
    case ProblemKind::diff_committees:
      out.first = committee_from(b, layout.x, values, false);
      out.second = committee_from(b, layout.a, values, true);
      out.distance = committee_distance(*out.first, *out.second);
      break;
    case ProblemKind::p_candidates:
      out.first = committee_from(b, layout.x, values, false, b.spec.required);
      break;
  }
  return out;
}

Assignment encode(const MilpModel& model, const DecodedSolution& solution) {
  const auto& b = require_binding(model);
  const auto& layout = b.layout;
  Assignment out(model.num_variables(), 0);
  if (!solution.first) throw std::invalid_argument("solution has no committee");
  encode_committee(b, *solution.first, layout.x, layout.x_present, layout.x_full, layout.y, out);

  switch (b.spec.kind) {
    case ProblemKind::jr_not_ejrp: {
      if (!solution.witness) throw std::invalid_argument("solution has no witness");
      const auto& w = *solution.witness;
      out[layout.ell] = w.ell;
      for (VoterId i : w.group) out[layout.v[i]] = 1;
      const int unit = layout.quotient ? b.quotient.class_of[w.candidate] : w.candidate;
      out[layout.u[unit]] = 1;
      if (layout.quotient) out[layout.t[unit]] = 1;
      break;
    }
    case ProblemKind::diff_committees: {
      if (!solution.second) throw std::invalid_argument("solution has no second committee");
      encode_committee(b, *solution.second, layout.a, layout.a_present, layout.a_full, layout.b, out);
      for (std::size_t j = 0; j < layout.z.size(); ++j) {
        const std::int64_t size = layout.quotient ? b.quotient.classes[j].size() : 1;
        out[layout.z[j]] = std::min(out[layout.x[j]], size - out[layout.a[j]]);
      }
      break;
    }
    case ProblemKind::p_candidates:
      break;
  }
  return out;
}

std::string verify_decoded(const MilpModel& model, const DecodedSolution& s) {
  const auto& b = require_binding(model);
  const Election& e = *b.election;
  const int k = e.committee_size();
  if (!s.first || s.first->size() != k) return "first committee missing or of the wrong size";
  switch (b.spec.kind) {
    case ProblemKind::jr_not_ejrp:
      if (!check_jr(e, *s.first).satisfied) return "committee violates JR";
      if (!s.witness || !witness_is_valid(e, *s.first, *s.witness)) return "EJR+ witness is invalid";
      break;
    case ProblemKind::diff_committees:
      if (!s.second || s.second->size() != k) return "second committee missing or of the wrong size";
      if (!satisfies(e, *s.first, b.spec.axiom)) return "first committee violates " + b.spec.axiom.name();
      if (!satisfies(e, *s.second, b.spec.axiom)) return "second committee violates " + b.spec.axiom.name();
      break;
    case ProblemKind::p_candidates:
      if (!satisfies(e, *s.first, b.spec.axiom)) return "committee violates " + b.spec.axiom.name();
      for (CandidateId c : b.spec.required)
        if (!s.first->contains(c)) return "committee misses a required candidate";
      break;
  }
  return {};
}

}  // namespace propvote
