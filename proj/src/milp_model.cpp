#include "propvote/milp.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace propvote {

std::string ProblemSpec::id() const {
  switch (kind) {
    case ProblemKind::jr_not_ejrp:
      return "jr-not-ejrp";
    case ProblemKind::diff_committees:
      return axiom == Axiom::jr() ? "diff-jr" : "diff-ejrp";
    case ProblemKind::p_candidates:
      return axiom == Axiom::jr() ? "pcand-jr" : "pcand-ejrp";
  }
  return {};
}

ProblemSpec ProblemSpec::parse(const std::string& id) {
  if (id == "jr-not-ejrp") return {ProblemKind::jr_not_ejrp, Axiom::jr(), {}};
  if (id == "diff-jr") return {ProblemKind::diff_committees, Axiom::jr(), {}};
  if (id == "diff-ejrp") return {ProblemKind::diff_committees, Axiom::ejr_plus(), {}};
  if (id == "pcand-jr") return {ProblemKind::p_candidates, Axiom::jr(), {}};
  if (id == "pcand-ejrp") return {ProblemKind::p_candidates, Axiom::ejr_plus(), {}};
  throw std::invalid_argument("unknown problem '" + id + "'");
}

int MilpModel::add_variable(Variable var) {
  if (var.kind == VarKind::binary) {
    var.lower = std::max<std::int64_t>(var.lower, 0);
    var.upper = std::min<std::int64_t>(var.upper, 1);
  }
  variables_.push_back(std::move(var));
  return static_cast<int>(variables_.size()) - 1;
}

int MilpModel::add_binary(std::string name, int priority, bool prefer_high) {
  return add_variable(Variable{std::move(name), VarKind::binary, 0, 1, priority, prefer_high});
}

int MilpModel::add_integer(std::string name, std::int64_t lower, std::int64_t upper, int priority,
                           bool prefer_high) {
  return add_variable(Variable{std::move(name), VarKind::integer, lower, upper, priority, prefer_high});
}

void MilpModel::add_constraint(std::string name, std::vector<Term> terms, Sense sense, std::int64_t rhs) {
  for (const auto& t : terms)
    if (t.var < 0 || t.var >= num_variables()) throw std::invalid_argument("constraint references unknown variable");
  if (name.empty()) name = "r" + std::to_string(constraints_.size());
  constraints_.push_back(Constraint{std::move(name), std::move(terms), sense, rhs});
}

void MilpModel::set_objective(ObjectiveSense sense, std::vector<Term> terms) {
  for (const auto& t : terms)
    if (t.var < 0 || t.var >= num_variables()) throw std::invalid_argument("objective references unknown variable");
  objective_sense_ = sense;
  objective_ = std::move(terms);
}

int MilpModel::find_variable(const std::string& name) const {
  for (int i = 0; i < num_variables(); ++i)
    if (variables_[i].name == name) return i;
  return -1;
}

std::string first_violation(const MilpModel& model, const Assignment& assignment) {
  if (static_cast<int>(assignment.size()) != model.num_variables()) return "assignment has the wrong length";
  for (int i = 0; i < model.num_variables(); ++i) {
    const auto& var = model.variables()[i];
    if (assignment[i] < var.lower || assignment[i] > var.upper)
      return "variable " + var.name + " = " + std::to_string(assignment[i]) + " is out of bounds";
  }
  for (const auto& row : model.constraints()) {
    __int128 lhs = 0;
    for (const auto& t : row.terms) lhs += static_cast<__int128>(t.coef) * assignment[t.var];
    const bool ok = row.sense == Sense::le ? lhs <= row.rhs : row.sense == Sense::ge ? lhs >= row.rhs : lhs == row.rhs;
    if (!ok) return "constraint " + row.name + " is violated";
  }
  return {};
}

std::int64_t objective_value(const MilpModel& model, const Assignment& assignment) {
  std::int64_t value = 0;
  for (const auto& t : model.objective()) value += t.coef * assignment.at(t.var);
  return value;
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::feasible:
      return "feasible";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::timeout:
      return "timeout";
  }
  return {};
}

std::string to_string(Backend backend) {
  switch (backend) {
    case Backend::builtin:
      return "builtin";
    case Backend::enumerate:
      return "enumerate";
    case Backend::external:
      return "external";
  }
  return {};
}

Backend parse_backend(const std::string& name) {
  if (name == "builtin") return Backend::builtin;
  if (name == "enumerate") return Backend::enumerate;
  if (name == "external") return Backend::external;
  throw std::invalid_argument("unknown backend '" + name + "'");
}

// LP format ---------------------------------------------------------------

namespace {

bool valid_lp_name(const std::string& name) {
  if (name.empty() || std::isdigit(static_cast<unsigned char>(name[0]))) return false;
  return std::all_of(name.begin(), name.end(),
                     [](unsigned char ch) { return std::isalnum(ch) || ch == '_' || ch == '.'; });
}

void write_terms(const MilpModel& model, const std::vector<Term>& terms, std::ostream& out) {
  bool first = true;
  for (const auto& t : terms) {
    if (first)
      out << (t.coef < 0 ? "- " : "") << (t.coef < 0 ? -t.coef : t.coef);
    else
      out << (t.coef < 0 ? " - " : " + ") << (t.coef < 0 ? -t.coef : t.coef);
    out << ' ' << model.variables()[t.var].name;
    first = false;
  }
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    const char ch = line[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
    } else if (ch == '<' || ch == '>' || ch == '=') {
      std::string op(1, ch);
      if (i + 1 < line.size() && (line[i + 1] == '=' || line[i + 1] == '<' || line[i + 1] == '>')) op += line[++i];
      tokens.push_back(op);
      ++i;
    } else if (ch == '+' || ch == '-' || ch == ':') {
      tokens.emplace_back(1, ch);
      ++i;
    } else {
      std::size_t j = i;
      while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j])) &&
             std::string_view("<>=+-:").find(line[j]) == std::string_view::npos)
        ++j;
      tokens.push_back(line.substr(i, j - i));
      i = j;
    }
  }
  return tokens;
}

bool is_number(const std::string& token) {
  return !token.empty() && (std::isdigit(static_cast<unsigned char>(token[0])) || token[0] == '.');
}

std::int64_t parse_integer(const std::string& token) {
  std::size_t used = 0;
  const long long value = std::stoll(token, &used);
  if (used != token.size()) throw std::runtime_error("LP: expected an integer, got '" + token + "'");
  return value;
}

Sense parse_sense(const std::string& op) {
  if (op == "<=" || op == "=<" || op == "<") return Sense::le;
  if (op == ">=" || op == "=>" || op == ">") return Sense::ge;
  if (op == "=") return Sense::eq;
  throw std::runtime_error("LP: unknown comparison '" + op + "'");
}

struct LpBuilder {
  MilpModel model;
  std::unordered_map<std::string, int> index;
  std::vector<bool> declared_type;
  std::vector<bool> has_upper;

  int var(const std::string& name) {
    if (!valid_lp_name(name)) throw std::runtime_error("LP: bad variable name '" + name + "'");
    if (auto it = index.find(name); it != index.end()) return it->second;
    // Continuous by default until a Binary/General section says otherwise.
    const int id = model.add_variable(Variable{name, VarKind::integer, 0, 0, 1, false});
    index.emplace(name, id);
    declared_type.push_back(false);
    has_upper.push_back(false);
    return id;
  }

  // Parses "[+|-] [coef] name ..." up to an optional comparison.
  std::vector<Term> terms(const std::vector<std::string>& tokens, std::size_t& pos) {
    std::vector<Term> out;
    while (pos < tokens.size()) {
      const auto& tok = tokens[pos];
      if (tok == "<=" || tok == ">=" || tok == "=" || tok == "<" || tok == ">" || tok == "=<" || tok == "=>") break;
      std::int64_t sign = 1;
      while (pos < tokens.size() && (tokens[pos] == "+" || tokens[pos] == "-")) {
        if (tokens[pos] == "-") sign = -sign;
        ++pos;
      }
      if (pos >= tokens.size()) throw std::runtime_error("LP: dangling sign");
      std::int64_t coef = 1;
      if (is_number(tokens[pos])) {
        coef = parse_integer(tokens[pos]);
        ++pos;
        if (pos >= tokens.size()) throw std::runtime_error("LP: coefficient without variable");
      }
      out.push_back(Term{var(tokens[pos]), sign * coef});
      ++pos;
    }
    return out;
  }
};

std::int64_t signed_number(const std::vector<std::string>& tokens, std::size_t& pos) {
  std::int64_t sign = 1;
  while (pos < tokens.size() && (tokens[pos] == "+" || tokens[pos] == "-")) {
    if (tokens[pos] == "-") sign = -sign;
    ++pos;
  }
  if (pos >= tokens.size() || !is_number(tokens[pos])) throw std::runtime_error("LP: expected a number");
  return sign * parse_integer(tokens[pos++]);
}

}  // namespace

void write_lp(const MilpModel& model, std::ostream& out) {
  for (const auto& var : model.variables())
    if (!valid_lp_name(var.name)) throw std::invalid_argument("variable name '" + var.name + "' is not LP-safe");
  for (const auto& row : model.constraints())
    if (!valid_lp_name(row.name)) throw std::invalid_argument("constraint name '" + row.name + "' is not LP-safe");

  out << "\\ " << (model.name().empty() ? "model" : model.name()) << "\n";
  out << "Maximize\n obj:";
  if (model.objective_sense() == ObjectiveSense::maximize && !model.objective().empty()) {
    out << ' ';
    write_terms(model, model.objective(), out);
  } else if (model.num_variables() > 0) {
    out << " 0 " << model.variables()[0].name;
  }
  out << "\nSubject To\n";
  for (const auto& row : model.constraints()) {
    out << ' ' << row.name << ": ";
    if (row.terms.empty())
      out << "0 " << (model.num_variables() > 0 ? model.variables()[0].name : "");
    else
      write_terms(model, row.terms, out);
    out << (row.sense == Sense::le ? " <= " : row.sense == Sense::ge ? " >= " : " = ") << row.rhs << "\n";
  }
  out << "Bounds\n";
  for (const auto& var : model.variables())
    if (var.kind == VarKind::integer) out << ' ' << var.lower << " <= " << var.name << " <= " << var.upper << "\n";
  out << "Binary\n";
  for (const auto& var : model.variables())
    if (var.kind == VarKind::binary) out << ' ' << var.name << "\n";
  out << "General\n";
  for (const auto& var : model.variables())
    if (var.kind == VarKind::integer) out << ' ' << var.name << "\n";
  out << "End\n";
}

std::string to_lp(const MilpModel& model) {
  std::ostringstream out;
  write_lp(model, out);
  return out.str();
}

MilpModel parse_lp(const std::string& text) {
  enum class Section { none, objective, constraints, bounds, binary, general, end };
  LpBuilder lp;
  // A leading "\ name" comment, as written by write_lp, names the model.
  if (text.rfind("\\ ", 0) == 0) {
    const auto name = text.substr(2, text.find('\n') - 2);
    if (!name.empty()) lp.model = MilpModel(name);
  }
  Section section = Section::none;
  bool maximize_seen = false;
  std::vector<Term> objective;
  std::vector<Constraint> rows;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto comment = line.find('\\'); comment != std::string::npos) line.erase(comment);
    const auto trimmed_start = line.find_first_not_of(" \t\r");
    if (trimmed_start == std::string::npos) continue;
    const auto key = lowercase(line.substr(trimmed_start, line.find_last_not_of(" \t\r") - trimmed_start + 1));
    if (key == "maximize" || key == "maximise" || key == "max") {
      section = Section::objective;
      maximize_seen = true;
      continue;
    }
    if (key == "minimize" || key == "minimise" || key == "min")
      throw std::runtime_error("LP: only maximization models are supported");
    if (key == "subject to" || key == "such that" || key == "st" || key == "s.t.") {
      section = Section::constraints;
      continue;
    }
    if (key == "bounds") {
      section = Section::bounds;
      continue;
    }
    if (key == "binary" || key == "binaries" || key == "bin") {
      section = Section::binary;
      continue;
    }
    if (key == "general" || key == "generals" || key == "gen") {
      section = Section::general;
      continue;
    }
    if (key == "end") {
      section = Section::end;
      continue;
    }

    const auto where = " (line " + std::to_string(line_no) + ")";
    auto tokens = tokenize(line);
    std::size_t pos = 0;
    std::string label;
    if (tokens.size() >= 2 && tokens[1] == ":") {
      label = tokens[0];
      pos = 2;
    }
    switch (section) {
      case Section::none:
      case Section::end:
        throw std::runtime_error("LP: content outside a section" + where);
      case Section::objective: {
        auto terms = lp.terms(tokens, pos);
        objective.insert(objective.end(), terms.begin(), terms.end());
        break;
      }
      case Section::constraints: {
        auto terms = lp.terms(tokens, pos);
        if (pos >= tokens.size()) throw std::runtime_error("LP: constraint without comparison" + where);
        const Sense sense = parse_sense(tokens[pos++]);
        const auto rhs = signed_number(tokens, pos);
        if (pos != tokens.size()) throw std::runtime_error("LP: trailing tokens" + where);
        rows.push_back(Constraint{label, std::move(terms), sense, rhs});
        break;
      }
      case Section::bounds: {
        // "lo <= x <= hi", "x <= hi", "x >= lo" or "x = v".
        if (is_number(tokens[pos]) || tokens[pos] == "-" || tokens[pos] == "+") {
          const auto lo = signed_number(tokens, pos);
          if (pos + 1 >= tokens.size() || parse_sense(tokens[pos]) != Sense::le)
            throw std::runtime_error("LP: malformed bound" + where);
          const int v = lp.var(tokens[pos + 1]);
          pos += 2;
          auto& var = lp.model.variable(v);
          var.lower = lo;
          if (pos < tokens.size()) {
            if (parse_sense(tokens[pos++]) != Sense::le) throw std::runtime_error("LP: malformed bound" + where);
            var.upper = signed_number(tokens, pos);
            lp.has_upper[v] = true;
          }
        } else {
          const int v = lp.var(tokens[pos++]);
          if (pos >= tokens.size()) throw std::runtime_error("LP: malformed bound" + where);
          const Sense sense = parse_sense(tokens[pos++]);
          const auto value = signed_number(tokens, pos);
          auto& var = lp.model.variable(v);
          if (sense != Sense::ge) {
            var.upper = value;
            lp.has_upper[v] = true;
          }
          if (sense != Sense::le) var.lower = value;
        }
        if (pos != tokens.size()) throw std::runtime_error("LP: trailing tokens" + where);
        break;
      }
      case Section::binary:
      case Section::general:
        for (; pos < tokens.size(); ++pos) {
          const int v = lp.var(tokens[pos]);
          auto& var = lp.model.variable(v);
          lp.declared_type[v] = true;
          if (section == Section::binary) {
            var.kind = VarKind::binary;
            var.lower = std::max<std::int64_t>(var.lower, 0);
            var.upper = 1;
            lp.has_upper[v] = true;
          } else {
            var.kind = VarKind::integer;
          }
        }
        break;
    }
  }
  if (!maximize_seen) throw std::runtime_error("LP: missing Maximize section");
  for (int v = 0; v < lp.model.num_variables(); ++v) {
    const auto& var = lp.model.variables()[v];
    if (!lp.declared_type[v]) throw std::runtime_error("LP: variable " + var.name + " is not declared integer");
    if (!lp.has_upper[v]) throw std::runtime_error("LP: variable " + var.name + " has no finite upper bound");
  }
  for (auto& row : rows) lp.model.add_constraint(std::move(row.name), std::move(row.terms), row.sense, row.rhs);
  const bool trivial = std::all_of(objective.begin(), objective.end(), [](const Term& t) { return t.coef == 0; });
  lp.model.set_objective(trivial ? ObjectiveSense::feasibility : ObjectiveSense::maximize,
                         trivial ? std::vector<Term>{} : objective);
  return std::move(lp.model);
}

void write_solution(const MilpModel& model, const SolveOutcome& outcome, std::ostream& out) {
  out << "status " << to_string(outcome.status) << "\n";
  if (outcome.objective) out << "objective " << *outcome.objective << "\n";
  if (outcome.assignment)
    for (int i = 0; i < model.num_variables(); ++i)
      out << model.variables()[i].name << ' ' << (*outcome.assignment)[i] << "\n";
}

SolveOutcome parse_solution(const MilpModel& model, const std::string& text) {
  SolveOutcome outcome;
  std::unordered_map<std::string, int> index;
  for (int i = 0; i < model.num_variables(); ++i) index.emplace(model.variables()[i].name, i);
  Assignment values(model.num_variables(), 0);
  std::vector<bool> seen(model.num_variables(), false);
  bool status_seen = false;

  std::istringstream in(text);
  std::string key;
  std::string value;
  while (in >> key >> value) {
    if (key == "status") {
      status_seen = true;
      if (value == "optimal")
        outcome.status = SolveStatus::optimal;
      else if (value == "feasible")
        outcome.status = SolveStatus::feasible;
      else if (value == "infeasible")
        outcome.status = SolveStatus::infeasible;
      else if (value == "timeout")
        outcome.status = SolveStatus::timeout;
      else
        throw SolverError("solution file has unknown status '" + value + "'");
      continue;
    }
    if (key == "objective") continue;  // recomputed from the assignment
    const auto it = index.find(key);
    if (it == index.end()) throw SolverError("solution names unknown variable '" + key + "'");
    // Solvers may print integral values as floating point.
    const double raw = std::stod(value);
    const double rounded = std::round(raw);
    if (std::fabs(raw - rounded) > 1e-6) throw SolverError("variable " + key + " has fractional value " + value);
    values[it->second] = static_cast<std::int64_t>(rounded);
    seen[it->second] = true;
  }
  if (!status_seen) throw SolverError("solution file has no status line");
  const bool any = std::any_of(seen.begin(), seen.end(), [](bool s) { return s; });
  if (outcome.status == SolveStatus::feasible || outcome.status == SolveStatus::optimal || any) {
    if (!std::all_of(seen.begin(), seen.end(), [](bool s) { return s; }))
      throw SolverError("solution does not assign every variable");
    outcome.assignment = std::move(values);
    outcome.objective = objective_value(model, *outcome.assignment);
  }
  return outcome;
}

}  // namespace propvote
