#include "propvote/milp.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <fstream>
#include <numeric>
#include <sstream>

namespace propvote {

namespace {

using Clock = std::chrono::steady_clock;

std::optional<Clock::time_point> deadline_after(std::optional<std::chrono::duration<double>> limit) {
  if (!limit) return std::nullopt;
  return Clock::now() + std::chrono::duration_cast<Clock::duration>(*limit);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct TimedOut {};

// Depth-first search over integer domains with bound propagation on linear
// rows. Every row is kept as sum(a * x) <= rhs. Complete: returns the first
// solution for feasibility models and a proven optimum for maximization.
class PropagationSearch {
 public:
  PropagationSearch(const MilpModel& model, std::optional<Clock::time_point> deadline)
      : model_(model), deadline_(deadline) {
    const int nv = model.num_variables();
    lb_.resize(nv);
    ub_.resize(nv);
    for (int v = 0; v < nv; ++v) {
      lb_[v] = model.variables()[v].lower;
      ub_[v] = model.variables()[v].upper;
    }
    var_rows_.resize(nv);
    for (const auto& c : model.constraints()) {
      if (c.sense != Sense::ge) add_row(c.terms, c.rhs, false);
      if (c.sense != Sense::le) add_row(c.terms, c.rhs, true);
    }
    if (model.objective_sense() == ObjectiveSense::maximize) {
      objective_row_ = static_cast<int>(rows_.size());
      // -objective <= -(best + 1); inactive until an incumbent exists.
      add_row(model.objective(), 0, true);
      rows_[objective_row_].rhs = std::numeric_limits<std::int64_t>::max() / 4;
    }
    order_.resize(nv);
    std::iota(order_.begin(), order_.end(), 0);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return model.variables()[a].priority < model.variables()[b].priority;
    });
    in_queue_.assign(rows_.size(), false);
  }

  // Returns the best assignment found; `complete` tells whether the search
  // space was exhausted.
  std::optional<Assignment> run(bool& complete) {
    complete = false;
    try {
      for (int r = 0; r < static_cast<int>(rows_.size()); ++r) enqueue(r);
      if (bounds_consistent() && propagate()) dfs(0);
      complete = true;
    } catch (const TimedOut&) {
    }
    return incumbent_;
  }

 private:
  struct Row {
    std::vector<Term> terms;
    std::int64_t rhs;
  };
  struct TrailEntry {
    int var;
    std::int64_t value;
    bool lower;
  };

  void add_row(const std::vector<Term>& terms, std::int64_t rhs, bool negate) {
    Row row;
    for (const auto& t : terms)
      if (t.coef != 0) row.terms.push_back(Term{t.var, negate ? -t.coef : t.coef});
    row.rhs = negate ? -rhs : rhs;
    const int r = static_cast<int>(rows_.size());
    for (const auto& t : row.terms) var_rows_[t.var].push_back(r);
    rows_.push_back(std::move(row));
  }

  bool bounds_consistent() const {
    for (std::size_t v = 0; v < lb_.size(); ++v)
      if (lb_[v] > ub_[v]) return false;
    return true;
  }

  void enqueue(int r) {
    if (!in_queue_[r]) {
      in_queue_[r] = true;
      queue_.push_back(r);
    }
  }

  void set_lower(int v, std::int64_t value) {
    trail_.push_back({v, lb_[v], true});
    lb_[v] = value;
    for (int r : var_rows_[v]) enqueue(r);
  }

  void set_upper(int v, std::int64_t value) {
    trail_.push_back({v, ub_[v], false});
    ub_[v] = value;
    for (int r : var_rows_[v]) enqueue(r);
  }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      const auto& e = trail_.back();
      (e.lower ? lb_ : ub_)[e.var] = e.value;
      trail_.pop_back();
    }
  }

  void clear_queue() {
    for (int r : queue_) in_queue_[r] = false;
    queue_.clear();
  }

  bool propagate() {
    std::size_t head = 0;
    while (head < queue_.size()) {
      const int r = queue_[head++];
      in_queue_[r] = false;
      if (!propagate_row(rows_[r])) {
        for (std::size_t i = head; i < queue_.size(); ++i) in_queue_[queue_[i]] = false;
        queue_.clear();
        return false;
      }
      // Compact occasionally so the queue does not grow without bound.
      if (head > 4096) {
        queue_.erase(queue_.begin(), queue_.begin() + static_cast<std::ptrdiff_t>(head));
        head = 0;
      }
    }
    queue_.clear();
    return true;
  }

  bool propagate_row(const Row& row) {
    __int128 min_activity = 0;
    for (const auto& t : row.terms) min_activity += static_cast<__int128>(t.coef) * (t.coef > 0 ? lb_[t.var] : ub_[t.var]);
    const __int128 slack = static_cast<__int128>(row.rhs) - min_activity;
    if (slack < 0) return false;
    for (const auto& t : row.terms) {
      const std::int64_t range = ub_[t.var] - lb_[t.var];
      if (range == 0) continue;
      const __int128 magnitude = t.coef > 0 ? t.coef : -static_cast<__int128>(t.coef);
      if (magnitude * range <= slack) continue;
      const auto step = static_cast<std::int64_t>(slack / magnitude);
      if (t.coef > 0)
        set_upper(t.var, lb_[t.var] + step);
      else
        set_lower(t.var, ub_[t.var] - step);
    }
    return true;
  }

  void check_clock() {
    if (deadline_ && (++nodes_ & 1023) == 0 && Clock::now() > *deadline_) throw TimedOut{};
  }

  // Returns true when the search should stop (feasibility model solved).
  bool dfs(std::size_t from) {
    check_clock();
    std::size_t pos = from;
    while (pos < order_.size() && lb_[order_[pos]] == ub_[order_[pos]]) ++pos;
    if (pos == order_.size()) return record();

    const int v = order_[pos];
    const auto& var = model_.variables()[v];
    const std::int64_t lo = lb_[v];
    const std::int64_t hi = ub_[v];
    for (std::int64_t step = 0; step <= hi - lo; ++step) {
      const std::int64_t value = var.prefer_high ? hi - step : lo + step;
      const std::size_t mark = trail_.size();
      if (value != lb_[v]) set_lower(v, value);
      if (value != ub_[v]) set_upper(v, value);
      if (objective_row_ >= 0) enqueue(objective_row_);
      const bool ok = propagate();
      if (ok && dfs(pos + 1)) return true;
      if (!ok) clear_queue();
      undo(mark);
    }
    return false;
  }

  bool record() {
    Assignment values(lb_.begin(), lb_.end());
    if (objective_row_ < 0) {
      incumbent_ = std::move(values);
      return true;
    }
    const auto value = objective_value(model_, values);
    if (!incumbent_ || value > best_) {
      best_ = value;
      incumbent_ = std::move(values);
      rows_[objective_row_].rhs = -(best_ + 1);
    }
    return false;
  }

  const MilpModel& model_;
  std::optional<Clock::time_point> deadline_;
  std::vector<std::int64_t> lb_, ub_;
  std::vector<Row> rows_;
  std::vector<std::vector<int>> var_rows_;
  std::vector<int> order_;
  std::vector<TrailEntry> trail_;
  std::vector<int> queue_;
  std::vector<bool> in_queue_;
  int objective_row_ = -1;
  std::optional<Assignment> incumbent_;
  std::int64_t best_ = 0;
  std::uint64_t nodes_ = 0;
};

// Exhaustive search over committees, answering the bound problem directly.
SolveOutcome solve_by_enumeration(const MilpModel& model, const SolverConfig& config,
                                  std::optional<Clock::time_point> deadline) {
  if (!model.binding()) throw std::invalid_argument("the enumerate backend needs a model built for a problem");
  const auto& b = *model.binding();
  const Election& e = *b.election;
  SolveOutcome outcome;
  std::uint64_t steps = 0;
  auto tick = [&] {
    if (deadline && (++steps & 255) == 0 && Clock::now() > *deadline) throw TimedOut{};
  };

  DecodedSolution found;
  bool have = false;
  switch (b.spec.kind) {
    case ProblemKind::jr_not_ejrp: {
      auto stream = enumerate_committees(e, config.enumeration_cap);
      Committee w;
      while (!have && stream.next(w)) {
        tick();
        if (!check_jr(e, w).satisfied) continue;
        auto report = check_ejrp(e, w);
        if (report.satisfied) continue;
        found.first = w;
        found.witness = std::move(report.witness);
        have = true;
      }
      break;
    }
    case ProblemKind::p_candidates: {
      auto stream = enumerate_committees_containing(e, b.spec.required, config.enumeration_cap);
      Committee w;
      while (!have && stream.next(w)) {
        tick();
        if (satisfies(e, w, b.spec.axiom)) {
          found.first = w;
          have = true;
        }
      }
      break;
    }
    case ProblemKind::diff_committees: {
      std::vector<Committee> qualifying;
      auto stream = enumerate_committees(e, config.enumeration_cap);
      Committee w;
      while (stream.next(w)) {
        tick();
        if (satisfies(e, w, b.spec.axiom)) qualifying.push_back(w);
      }
      const auto count = static_cast<std::uint64_t>(qualifying.size());
      require_within_cap(BigInt(count) * (count + 1) / 2, config.enumeration_cap, "committee pairs");
      const int ceiling = std::min(e.committee_size(), e.num_candidates() - e.committee_size());
      int best = -1;
      for (std::size_t i = 0; i < qualifying.size() && best < ceiling; ++i)
        for (std::size_t j = i; j < qualifying.size() && best < ceiling; ++j) {
          tick();
          const int d = committee_distance(qualifying[i], qualifying[j]);
          if (d > best) {
            best = d;
            found.first = qualifying[i];
            found.second = qualifying[j];
            found.distance = d;
          }
        }
      have = best >= 0;
      break;
    }
  }
  if (!have) {
    outcome.status = SolveStatus::infeasible;
    return outcome;
  }
  outcome.status = model.objective_sense() == ObjectiveSense::maximize ? SolveStatus::optimal : SolveStatus::feasible;
  outcome.assignment = encode(model, found);
  return outcome;
}

std::string replace_all(std::string text, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = text.find(from, pos)) != std::string::npos; pos += to.size())
    text.replace(pos, from.size(), to);
  return text;
}

SolveOutcome solve_external(const MilpModel& model, const SolverConfig& config) {
  std::string command = config.command;
  if (command.empty())
    if (const char* env = std::getenv("SOLVER_CMD")) command = env;
  if (command.empty()) throw SolverError("no external solver command configured (set SOLVER_CMD)");

  namespace fs = std::filesystem;
  static std::atomic<unsigned> counter{0};
  const fs::path dir = fs::temp_directory_path() /
                       ("propvote-" + std::to_string(::getpid()) + "-" + std::to_string(counter.fetch_add(1)));
  fs::create_directories(dir);
  const fs::path model_path = dir / "model.lp";
  const fs::path solution_path = dir / "solution.sol";
  {
    std::ofstream out(model_path);
    write_lp(model, out);
  }
  const double limit = config.time_limit ? config.time_limit->count() : 0;
  command = replace_all(command, "{model}", model_path.string());
  command = replace_all(command, "{solution}", solution_path.string());
  command = replace_all(command, "{timeout}", config.time_limit ? std::to_string(limit) : "none");

  const int raw = std::system(command.c_str());
  const int code = raw == -1 ? -1 : WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  SolveOutcome outcome;
  std::string text;
  if (std::ifstream in(solution_path); in) {
    std::ostringstream buffer;
    buffer << in.rdbuf();
    text = buffer.str();
  }
  std::error_code ignored;
  fs::remove_all(dir, ignored);

  switch (code) {
    case 0:
      outcome = parse_solution(model, text);
      break;
    case 3:
      // A timed-out solver may still report an incumbent.
      if (!text.empty()) outcome = parse_solution(model, text);
      outcome.status = SolveStatus::timeout;
      break;
    case 4:
      outcome.status = SolveStatus::infeasible;
      break;
    default:
      throw SolverError("external solver exited with status " + std::to_string(code));
  }
  return outcome;
}

}  // namespace

SolveOutcome solve_builtin(const MilpModel& model, std::optional<std::chrono::duration<double>> time_limit) {
  const auto start = Clock::now();
  SolveOutcome outcome;
  outcome.backend = to_string(Backend::builtin);
  if (time_limit && time_limit->count() <= 0) {
    outcome.status = SolveStatus::timeout;
    return outcome;
  }
  PropagationSearch search(model, deadline_after(time_limit));
  bool complete = false;
  outcome.assignment = search.run(complete);
  if (!complete)
    outcome.status = SolveStatus::timeout;
  else if (!outcome.assignment)
    outcome.status = SolveStatus::infeasible;
  else
    outcome.status = model.objective_sense() == ObjectiveSense::maximize ? SolveStatus::optimal : SolveStatus::feasible;
  if (outcome.assignment) outcome.objective = objective_value(model, *outcome.assignment);
  outcome.wall_seconds = seconds_since(start);
  return outcome;
}

SolveOutcome solve(const MilpModel& model, const SolverConfig& config) {
  const auto start = Clock::now();
  SolveOutcome outcome;
  switch (config.backend) {
    case Backend::builtin:
      outcome = solve_builtin(model, config.time_limit);
      break;
    case Backend::enumerate:
      if (config.time_limit && config.time_limit->count() <= 0) {
        outcome.status = SolveStatus::timeout;
        break;
      }
      try {
        outcome = solve_by_enumeration(model, config, deadline_after(config.time_limit));
      } catch (const TimedOut&) {
        outcome = SolveOutcome{};
        outcome.status = SolveStatus::timeout;
      }
      break;
    case Backend::external:
      outcome = solve_external(model, config);
      break;
  }
  outcome.backend = to_string(config.backend);
  outcome.wall_seconds = seconds_since(start);

  if (outcome.assignment) {
    if (const auto why = first_violation(model, *outcome.assignment); !why.empty())
      throw SolverError(outcome.backend + " backend returned an invalid assignment: " + why);
    if (model.objective_sense() == ObjectiveSense::maximize)
      outcome.objective = objective_value(model, *outcome.assignment);
    else
      outcome.objective.reset();
    if (model.binding()) {
      const auto decoded = decode(model, *outcome.assignment);
      if (const auto why = verify_decoded(model, decoded); !why.empty())
        throw SolverError(outcome.backend + " backend solution fails the axiom re-check: " + why);
    }
  } else {
    outcome.objective.reset();
    if (outcome.status == SolveStatus::feasible || outcome.status == SolveStatus::optimal)
      throw SolverError(outcome.backend + " backend reported a solution without an assignment");
  }
  return outcome;
}

}  // namespace propvote
