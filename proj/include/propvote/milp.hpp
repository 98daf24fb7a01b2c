#pragma once

// Integer programs for the committee decision and optimization problems,
// their quotient (equivalence-class) variants, and the solver backends.
//
// Every coefficient and right-hand side is an integer: strict inequalities
// of the form "lhs < p/q" are multiplied by q and tightened by one before
// they reach a model. Whatever a backend returns is re-checked against the
// model in exact integer arithmetic and, for problem models, decoded and
// re-checked against the axioms module.

#include "propvote/axioms.hpp"
#include "propvote/core.hpp"

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace propvote {

enum class VarKind { binary, integer };

struct Variable {
  std::string name;
  VarKind kind = VarKind::binary;
  std::int64_t lower = 0;
  std::int64_t upper = 1;
  /// Search hints for the built-in backend: lower priority values are
  /// branched on first; `prefer_high` tries the upper bound first.
  int priority = 1;
  bool prefer_high = false;
};

enum class Sense { le, ge, eq };

struct Term {
  int var;
  std::int64_t coef;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense;
  std::int64_t rhs;
};

enum class ObjectiveSense { feasibility, maximize };

enum class ProblemKind { jr_not_ejrp, diff_committees, p_candidates };

/// The decision or optimization question a model encodes.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::jr_not_ejrp;
  Axiom axiom = Axiom::jr();  // diff_committees and p_candidates only
  CandidateSet required;      // p_candidates only

  /// "jr-not-ejrp", "diff-jr", "diff-ejrp", "pcand-jr", "pcand-ejrp".
  std::string id() const;
  /// Inverse of id(); `required` is left empty.
  static ProblemSpec parse(const std::string& id);
};

/// Variable indices of a problem model, by role. Plain models index by
/// candidate, quotient models by equivalence class; unused roles are empty.
/// Voter-by-level families are flattened as [voter * k + (level - 1)].
struct ModelLayout {
  bool quotient = false;
  std::vector<int> x, a, z;             // first committee, second committee, difference
  std::vector<int> x_present, a_present;  // quotient JR presence indicators
  std::vector<int> x_full, a_full;      // quotient EJR+ "class fully selected"
  std::vector<int> y, b;                // per voter, or per voter and level
  std::vector<int> v, u, t;             // violation group, witness, witness count
  int ell = -1;
};

/// Present on models produced by the builders; lets the fallback backend
/// solve the underlying problem directly and lets results be decoded.
struct ProblemBinding {
  ProblemSpec spec;
  std::shared_ptr<const Election> election;
  QuotientStructure quotient;  // classes used by a quotient layout
  ModelLayout layout;
};

class MilpModel {
 public:
  explicit MilpModel(std::string name = {}) : name_(std::move(name)) {}

  int add_variable(Variable var);
  int add_binary(std::string name, int priority = 1, bool prefer_high = false);
  int add_integer(std::string name, std::int64_t lower, std::int64_t upper, int priority = 1,
                  bool prefer_high = false);
  /// Throws std::invalid_argument on an undeclared variable.
  void add_constraint(std::string name, std::vector<Term> terms, Sense sense, std::int64_t rhs);
  void set_objective(ObjectiveSense sense, std::vector<Term> terms = {});

  const std::string& name() const { return name_; }
  const std::vector<Variable>& variables() const { return variables_; }
  Variable& variable(int index) { return variables_.at(index); }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  ObjectiveSense objective_sense() const { return objective_sense_; }
  const std::vector<Term>& objective() const { return objective_; }
  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  /// Index of the named variable or -1.
  int find_variable(const std::string& name) const;

  const std::optional<ProblemBinding>& binding() const { return binding_; }
  void set_binding(ProblemBinding binding) { binding_ = std::move(binding); }

 private:
  std::string name_;
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  ObjectiveSense objective_sense_ = ObjectiveSense::feasibility;
  std::vector<Term> objective_;
  std::optional<ProblemBinding> binding_;
};

using Assignment = std::vector<std::int64_t>;

/// Empty on success, otherwise the first violated bound or constraint.
std::string first_violation(const MilpModel& model, const Assignment& assignment);
std::int64_t objective_value(const MilpModel& model, const Assignment& assignment);

// Builders. JR and EJR+ are the supported axioms; anything else throws
// std::invalid_argument.

/// Feasible iff some committee satisfies JR but violates EJR+ (witness l >= 2).
MilpModel build_jr_not_ejrp(const Election& election);
/// Maximizes |W1 \ W2| over pairs of committees satisfying `axiom`.
MilpModel build_diff_committees(const Election& election, const Axiom& axiom);
/// Feasible iff a committee satisfying `axiom` contains `required`.
/// Throws std::invalid_argument if |required| > k.
MilpModel build_p_candidates(const Election& election, const CandidateSet& required, const Axiom& axiom);
/// Same question as the plain builder for `spec`, with variables per
/// equivalence class instead of per candidate.
MilpModel build_quotient_variant(const Election& election, const ProblemSpec& spec);
MilpModel build_model(const Election& election, const ProblemSpec& spec, bool quotient);

/// A problem-level solution read off an assignment.
struct DecodedSolution {
  std::optional<Committee> first;
  std::optional<Committee> second;    // diff_committees
  std::optional<Violation> witness;   // jr_not_ejrp
  std::optional<int> distance;        // diff_committees: |first \ second|
};

/// Requires a bound model. Throws std::invalid_argument otherwise.
DecodedSolution decode(const MilpModel& model, const Assignment& assignment);
/// Inverse direction: an assignment of `model` realising `solution`.
Assignment encode(const MilpModel& model, const DecodedSolution& solution);
/// Empty if the decoded solution answers the model's question (axiom
/// checks, witness validity, containment), otherwise the reason.
std::string verify_decoded(const MilpModel& model, const DecodedSolution& solution);

enum class SolveStatus { feasible, infeasible, optimal, timeout };
std::string to_string(SolveStatus status);

struct SolveOutcome {
  SolveStatus status = SolveStatus::infeasible;
  std::string backend;
  double wall_seconds = 0;
  /// Present for feasible and optimal, and for a timeout with an incumbent.
  std::optional<Assignment> assignment;
  std::optional<std::int64_t> objective;
};

/// Raised when a backend fails outright or returns an assignment that does
/// not survive exact re-validation.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Backend {
  builtin,    // exact depth-first search with bound propagation over the model
  enumerate,  // exhaustive search over committees using the problem binding
  external,   // subprocess, see SolverConfig::command
};

std::string to_string(Backend backend);
Backend parse_backend(const std::string& name);

struct SolverConfig {
  Backend backend = Backend::builtin;
  /// Limit on wall time; zero yields an immediate timeout.
  std::optional<std::chrono::duration<double>> time_limit;
  /// Committee (or committee pair) cap for the enumerate backend.
  std::uint64_t enumeration_cap = kDefaultEnumerationCap;
  /// External command template. "{model}", "{solution}" and "{timeout}"
  /// are substituted; an empty command falls back to $SOLVER_CMD.
  std::string command;
};

/// Throws SolverError as described above and CapExceeded from the
/// enumerate backend.
SolveOutcome solve(const MilpModel& model, const SolverConfig& config = {});

/// The built-in backend on its own, for the LP adapter.
SolveOutcome solve_builtin(const MilpModel& model, std::optional<std::chrono::duration<double>> time_limit);

// LP interchange format, see docs/lp_format.md.
void write_lp(const MilpModel& model, std::ostream& out);
std::string to_lp(const MilpModel& model);
/// Throws std::runtime_error on malformed input. The result has no binding.
MilpModel parse_lp(const std::string& text);

/// Solution file: "status <s>", optional "objective <v>", then one
/// "<name> <value>" line per variable.
void write_solution(const MilpModel& model, const SolveOutcome& outcome, std::ostream& out);
SolveOutcome parse_solution(const MilpModel& model, const std::string& text);

/// Combinatorial maximum-distance search over JR class subsets.
struct DiffCommitteesResult {
  bool yes = false;  // max_distance >= target
  int max_distance = 0;
  std::pair<Committee, Committee> witness;  // a pair attaining max_distance
};

/// Throws CapExceeded if more than `subset_cap` class subsets or JR subset
/// pairs would be visited.
DiffCommitteesResult diff_committees_fpt_jr(const Election& election, int target,
                                            std::uint64_t subset_cap = kDefaultEnumerationCap);

}  // namespace propvote
