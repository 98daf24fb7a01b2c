// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
// criterion fails. Tolerances and runtime budgets are fixed constants below.

#include "oracles.hpp"
#include "propvote/axioms.hpp"
#include "propvote/count.hpp"
#include "propvote/gen.hpp"
#include "propvote/milp.hpp"
#include "propvote/pabulib.hpp"
#include "propvote/rules.hpp"
#include "propvote/sample.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>

using namespace propvote;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void budget(Verdict& v, Clock::time_point start, double limit_seconds) {
  const double used = seconds_since(start);
  if (used > limit_seconds) v.fail("runtime " + std::to_string(used) + " s over budget " + std::to_string(limit_seconds));
}

// ----------------------------------------------------------------------- 1

Verdict ac1() {
  Verdict v;
  const auto e = oracle::ten_voters();
  const CandidateSet w1{0, 2, 3, 4, 6};
  const CandidateSet w2{0, 1, 2, 3, 5};
  double best = 1e9;
  for (int rep = 0; rep < 20; ++rep) {
    const auto start = Clock::now();
    const auto jr = check_jr(e, w1);
    const auto ejrp = check_ejrp(e, w1);
    const auto good = check_ejrp(e, w2);
    best = std::min(best, seconds_since(start));
    if (!jr.satisfied) v.fail("JR reported violated");
    if (ejrp.satisfied || !ejrp.witness) {
      v.fail("EJR+ reported satisfied");
    } else if (ejrp.witness->candidate != 5 || ejrp.witness->ell != 2 ||
               ejrp.witness->group != std::vector<VoterId>{5, 6, 7, 8, 9}) {
      v.fail("unexpected EJR+ witness");
    }
    if (!good.satisfied) v.fail("second committee reported violating EJR+");
  }
  if (best >= 1e-3) v.fail("three checks took " + std::to_string(best * 1e3) + " ms");
  if (v.pass) v.detail = "witness (c6, l=2, v6..v10); three checks in " + std::to_string(best * 1e6) + " us";
  return v;
}

// ----------------------------------------------------------------------- 2

Verdict ac2() {
  Verdict v;
  const auto start = Clock::now();
  std::mt19937_64 rng(20240601);
  int elections = 0, comparisons = 0;
  for (; elections < 500; ++elections) {
    const auto base = oracle::random_election(rng, {1, 8, 1, 12});
    for (int k = 1; k <= base.num_candidates(); ++k) {
      const auto e = base.with_committee_size(k);
      ++comparisons;
      if (count_jr_fpt(e) != count_brute_force(e, Axiom::jr()))
        v.fail("mismatch on election " + std::to_string(elections) + ", k=" + std::to_string(k));
    }
  }
  budget(v, start, 300);
  if (v.pass)
    v.detail = std::to_string(elections) + " elections, " + std::to_string(comparisons) + " (election, k) pairs in " +
               std::to_string(seconds_since(start)) + " s";
  return v;
}

// ----------------------------------------------------------------------- 3

Verdict ac3() {
  Verdict v;
  const auto start = Clock::now();
  constexpr double kEpsilon = 0.05, kDelta = 0.2, kMaxFailureRate = 0.26;
  constexpr int kRuns = 200;
  const auto e = oracle::ten_voters();
  const auto census = census_brute_force(e, Axiom::jr());
  const double fraction = to_double(census.fraction());
  const double prevalence = to_double(census.prevalence(5));
  int fraction_failures = 0, prevalence_failures = 0;
  for (int run = 0; run < kRuns; ++run) {
    const auto seed = derive_seed(777, run);
    if (std::abs(estimate_fraction(e, Axiom::jr(), kEpsilon, kDelta, seed).value() - fraction) > kEpsilon)
      ++fraction_failures;
    if (std::abs(estimate_prevalence(e, 5, Axiom::jr(), kEpsilon, kDelta, seed).value() - prevalence) > kEpsilon)
      ++prevalence_failures;
  }
  const double fraction_rate = static_cast<double>(fraction_failures) / kRuns;
  const double prevalence_rate = static_cast<double>(prevalence_failures) / kRuns;
  if (fraction_rate > kMaxFailureRate) v.fail("fraction failure rate " + std::to_string(fraction_rate));
  if (prevalence_rate > kMaxFailureRate) v.fail("prevalence failure rate " + std::to_string(prevalence_rate));
  budget(v, start, 600);
  if (v.pass)
    v.detail = "failure rates: fraction " + std::to_string(fraction_rate) + ", prevalence(c6) " +
               std::to_string(prevalence_rate) + " (limit 0.26)";
  return v;
}

// ----------------------------------------------------------------------- 4

struct Truth {
  bool jr_not_ejrp = false;
  std::array<int, 2> diff{};  // JR, EJR+
};

Truth exhaustive(const Election& e) {
  Truth truth;
  for (auto w : oracle::committees(e.num_candidates(), e.committee_size()))
    if (oracle::satisfies_jr(e, w) && !oracle::satisfies_ejrp(e, w)) truth.jr_not_ejrp = true;
  truth.diff[0] = oracle::max_distance(oracle::axiom_committees(e, 1));
  truth.diff[1] = oracle::max_distance(oracle::axiom_committees(e, e.committee_size()));
  return truth;
}

bool pcand_truth(const Election& e, const CandidateSet& required, int t) {
  const auto need = oracle::to_mask(required);
  for (auto w : oracle::axiom_committees(e, t))
    if ((w & need) == need) return true;
  return false;
}

bool feasible(SolveStatus s) { return s == SolveStatus::feasible || s == SolveStatus::optimal; }

Verdict ac4() {
  Verdict v;
  const auto start = Clock::now();
  const char* external = std::getenv("SOLVER_CMD");
  const bool use_external = external != nullptr && *external != '\0';
  std::mt19937_64 rng(4242);
  int elections = 0, solves = 0;
  for (; elections < 300 && v.pass; ++elections) {
    const auto e = oracle::random_election(rng, {1, 7, 1, 9});
    const int m = e.num_candidates(), k = e.committee_size();
    const auto truth = exhaustive(e);
    CandidateSet required{static_cast<CandidateId>(rng() % m)};
    if (k >= 2) required = required.with(static_cast<CandidateId>(rng() % m));
    const std::string where = "election " + std::to_string(elections) + ": ";

    std::vector<Backend> backends{Backend::builtin};
    if (use_external) backends.push_back(Backend::external);
    for (Backend backend : backends)
      for (bool quotient : {false, true}) {
        SolverConfig config;
        config.backend = backend;
        const std::string tag = where + to_string(backend) + (quotient ? " quotient " : " plain ");
        auto run = [&](const ProblemSpec& spec) {
          ++solves;
          const auto model = build_model(e, spec, quotient);
          const auto outcome = solve(model, config);
          if (outcome.backend != to_string(backend)) v.fail(tag + "wrong backend reported");
          return outcome;
        };
        if (feasible(run(ProblemSpec::parse("jr-not-ejrp")).status) != truth.jr_not_ejrp)
          v.fail(tag + "jr-not-ejrp verdict");
        for (int a = 0; a < 2; ++a) {
          const Axiom axiom = a == 0 ? Axiom::jr() : Axiom::ejr_plus();
          const auto diff = run({ProblemKind::diff_committees, axiom, {}});
          if (diff.status != SolveStatus::optimal || !diff.objective || *diff.objective != truth.diff[a])
            v.fail(tag + "diff-" + axiom.name() + " optimum");
          const auto pc = run({ProblemKind::p_candidates, axiom, required});
          if (feasible(pc.status) != pcand_truth(e, required, a == 0 ? 1 : k)) v.fail(tag + "pcand-" + axiom.name());
        }
      }
    if (diff_committees_fpt_jr(e, 1).max_distance != truth.diff[0]) v.fail(where + "combinatorial diff-jr optimum");
  }
  budget(v, start, 900);
  if (v.pass)
    v.detail = std::to_string(elections) + " elections, " + std::to_string(solves) + " solves (builtin" +
               (use_external ? std::string(" + external") : std::string(", external not configured")) + ") in " +
               std::to_string(seconds_since(start)) + " s";
  return v;
}

// ----------------------------------------------------------------------- 5

Verdict ac5() {
  Verdict v;
  const auto start = Clock::now();
  Rng rng(derive_seed(5, 0));
  int elections = 0;
  for (; elections < 1000; ++elections) {
    const int n = 1 + static_cast<int>(rng.below(150));
    const int m = 1 + static_cast<int>(rng.below(50));
    const int k = 1 + static_cast<int>(rng.below(m));
    const auto seed = derive_seed(55, elections);
    Election e = [&] {
      switch (elections % 3) {
        case 0:
          return gen_resampling(n, m, k, 0.05 + 0.5 * rng.uniform(), rng.uniform(), seed);
        case 1:
          return gen_euclidean(n, m, k, 0.05 + 0.4 * rng.uniform(), 1 + static_cast<int>(rng.below(2)), seed);
        default: {
          std::vector<std::vector<CandidateId>> ballots(n);
          const double density = 0.02 + 0.3 * rng.uniform();
          for (auto& b : ballots)
            for (CandidateId c = 0; c < m; ++c)
              if (rng.bernoulli(density)) b.push_back(c);
          return Election(m, ballots, k);
        }
      }
    }();
    const auto w = mes_with_phragmen_completion(e);
    if (w.size() != k || !check_ejrp(e, w).satisfied) v.fail("violation on election " + std::to_string(elections));
  }
  budget(v, start, 600);
  if (v.pass)
    v.detail = std::to_string(elections) + " elections (n <= 150, m <= 50) in " + std::to_string(seconds_since(start)) +
               " s";
  return v;
}

// ----------------------------------------------------------------------- 6

Verdict ac6() {
  Verdict v;
  std::mt19937_64 rng(66);
  int triples = 0, counted = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto e = oracle::random_election(rng, {1, 8, 1, 10});
    const int k = e.committee_size();
    Rng draws(derive_seed(66, trial));
    for (int pick = 0; pick < 5; ++pick) {
      const auto w = sample_committee_uniform(e, draws);
      for (int t = 1; t <= k; ++t) {
        if (!check_t_ejrp(e, w, t).satisfied) continue;
        for (int lower = 1; lower < t; ++lower) {
          ++triples;
          if (!check_t_ejrp(e, w, lower).satisfied) v.fail("t-monotonicity broken on trial " + std::to_string(trial));
        }
      }
    }
    ++counted;
    if (count_brute_force(e, Axiom::ejr_plus()) > count_brute_force(e, Axiom::jr()))
      v.fail("EJR+ count exceeds JR count on trial " + std::to_string(trial));
  }
  if (v.pass)
    v.detail = std::to_string(triples) + " (election, committee, t) implications; " + std::to_string(counted) +
               " counted instances";
  return v;
}

// ----------------------------------------------------------------------- 7

Verdict ac7() {
  Verdict v;
  for (int m = 1; m <= 8; ++m)
    for (int k = 1; k <= m; ++k)
      if (expected_random_distance(m, k) != oracle::expected_distance(m, k))
        v.fail("closed form differs at m=" + std::to_string(m) + ", k=" + std::to_string(k));
  const Election empty(6, std::vector<std::vector<CandidateId>>(5), 3);
  const auto result = estimate_avg_distance(empty, Axiom::jr(), 2000, 7);
  if (std::abs(result.value() - 1.0) > 0.05) v.fail("normalized distance " + std::to_string(result.value()));
  if (v.pass) v.detail = "closed form exact for m <= 8; normalized distance " + std::to_string(result.value());
  return v;
}

// ----------------------------------------------------------------------- 8

struct SweepRow {
  int k;
  std::string axiom;
  double fraction;
  double exact;
  std::string status;
};

std::vector<SweepRow> run_ksweep(const fs::path& input, std::uint64_t accept, std::string& error) {
  const std::string cmd = std::string(PROPVOTE_CLI) + " ksweep --input " + input.string() +
                          " --accept " + std::to_string(accept) + " --seed 8 --timeout 120";
  std::vector<SweepRow> rows;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) {
    error = "cannot run " + cmd;
    return rows;
  }
  std::string text;
  std::array<char, 4096> buffer;
  while (std::fgets(buffer.data(), buffer.size(), pipe.get())) text += buffer.data();
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> f;
    std::stringstream fields(line);
    for (std::string cell; std::getline(fields, cell, ',');) f.push_back(cell);
    if (f.size() < 8 || f[3].empty() || f[6].empty()) {
      error = "incomplete row: " + line;
      continue;
    }
    rows.push_back({std::stoi(f[1]), f[2], std::stod(f[3]), std::stod(f[6]), f[7]});
  }
  return rows;
}

// Analytic preconditions for a fraction of exactly 1 at the extremes.
bool nobody_unanimous(const Election& e) {
  for (CandidateId c = 0; c < e.num_candidates(); ++c)
    if (e.approval_score(c) == e.num_voters()) return false;
  return true;
}

Verdict ac8() {
  Verdict v;
  const auto start = Clock::now();
  constexpr double kEpsilon = 0.05;
  constexpr std::uint64_t kAccept = 2000;
  const fs::path dir = fs::temp_directory_path() / "propvote-acceptance";
  fs::create_directories(dir);
  const auto stand_in = gen_resampling(40, 14, 7, 0.3, 0.6, 8);
  const fs::path generated = dir / "resampling_m14.pb";
  std::ofstream(generated) << emit_pabulib(election_to_pabulib(stand_in, "stand-in"));

  int rows_checked = 0, extremes = 0;
  for (const fs::path& input : {fs::path(PROPVOTE_TEST_DATA) / "ten_voters.pb", generated}) {
    const auto e = to_election(read_pabulib(input), KExplicit{1});
    std::string error;
    const auto rows = run_ksweep(input, kAccept, error);
    if (!error.empty()) v.fail(input.filename().string() + ": " + error);
    if (static_cast<int>(rows.size()) != 2 * e.num_candidates()) {
      v.fail(input.filename().string() + ": expected a row per k and axiom");
      continue;
    }
    for (const auto& row : rows) {
      ++rows_checked;
      if (row.status != "ok") v.fail("k=" + std::to_string(row.k) + " " + row.axiom + " status " + row.status);
      if (std::abs(row.fraction - row.exact) > kEpsilon)
        v.fail(input.filename().string() + " k=" + std::to_string(row.k) + " " + row.axiom + ": sampled " +
               std::to_string(row.fraction) + " vs exact " + std::to_string(row.exact));
      const auto exact = to_double(axiom_fraction_exact(e.with_committee_size(row.k), Axiom::parse(row.axiom)));
      if (std::abs(exact - row.exact) > 1e-9) v.fail("exact column disagrees with the count module");
      const bool at_one = (row.k == 1 && nobody_unanimous(e)) || row.k == e.num_candidates();
      if (at_one && row.axiom == "jr") {
        ++extremes;
        if (row.exact != 1.0 || row.fraction != 1.0) v.fail("extreme k=" + std::to_string(row.k) + " not at 1");
      }
    }
  }
  budget(v, start, 600);
  if (v.pass)
    v.detail = std::to_string(rows_checked) + " rows within " + std::to_string(kEpsilon) + "; " +
               std::to_string(extremes) + " extreme-k rows at fraction 1";
  return v;
}

// ----------------------------------------------------------------------- 9

bool same_profile(const Election& a, const Election& b) {
  if (a.num_voters() != b.num_voters() || a.num_candidates() != b.num_candidates()) return false;
  for (VoterId i = 0; i < a.num_voters(); ++i)
    if (a.ballot(i) != b.ballot(i)) return false;
  return true;
}

Verdict ac9() {
  Verdict v;
  const int n = 3000, m = 40;
  for (double p : {0.1, 0.3, 0.5}) {
    const auto e = gen_resampling(n, m, 10, p, 1.0, 90);
    double approvals = 0;
    for (VoterId i = 0; i < n; ++i) approvals += static_cast<double>(e.ballot(i).size());
    const double rate = approvals / (static_cast<double>(n) * m);
    const double sigma = std::sqrt(p * (1 - p) / (static_cast<double>(n) * m));
    if (std::abs(rate - p) > 3 * sigma) v.fail("resampling rate " + std::to_string(rate) + " for p=" + std::to_string(p));
  }
  for (int dim : {1, 2}) {
    const auto e = gen_euclidean(200, 30, 5, std::sqrt(static_cast<double>(dim)), dim, 91);
    for (VoterId i = 0; i < e.num_voters(); ++i)
      if (static_cast<int>(e.ballot(i).size()) != 30) v.fail("incomplete ballot at r = sqrt(d)");
  }
  if (!same_profile(gen_resampling(100, 20, 5, 0.3, 0.4, 92), gen_resampling(100, 20, 5, 0.3, 0.4, 92)) ||
      !same_profile(gen_euclidean(100, 20, 5, 0.2, 2, 92), gen_euclidean(100, 20, 5, 0.2, 2, 92)))
    v.fail("generator not deterministic");
  if (v.pass) v.detail = "rates within 3 sigma; full ballots at r = sqrt(d); deterministic";
  return v;
}

}  // namespace

// Optional arguments name the criteria to run, e.g. "acceptance AC4".
int main(int argc, char** argv) {
  const std::vector<std::string> only(argv + 1, argv + argc);
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
    Verdict verdict;
    try {
      verdict = run();
    } catch (const std::exception& error) {
      verdict.fail(std::string("exception: ") + error.what());
    }
    if (!verdict.pass) ++failures;
    std::cout << name << " " << (verdict.pass ? "PASS" : "FAIL") << " " << verdict.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
