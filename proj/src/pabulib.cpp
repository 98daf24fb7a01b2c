#include "propvote/pabulib.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace propvote {

namespace {

std::vector<std::string> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (ch == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (ch == delimiter && !quoted) {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

std::string quote_if_needed(const std::string& field) {
  if (field.find_first_of(";\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

std::string join_fields(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.push_back(';');
    out += quote_if_needed(fields[i]);
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_vote(const std::string& vote) {
  std::vector<std::string> ids;
  if (trim(vote).empty()) return ids;
  for (auto& id : split_fields(vote, ',')) ids.push_back(trim(id));
  return ids;
}

}  // namespace

std::optional<std::size_t> PabulibTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

std::optional<std::string> PabulibFile::meta_value(std::string_view key) const {
  for (const auto& [k, v] : meta)
    if (k == key) return v;
  return std::nullopt;
}

std::vector<std::string> PabulibFile::project_ids() const {
  const auto col = projects.column("project_id");
  if (!col) throw PabulibError("PROJECTS section has no project_id column");
  std::vector<std::string> ids;
  for (const auto& row : projects.rows) ids.push_back(row[*col]);
  return ids;
}

std::vector<std::vector<std::string>> PabulibFile::ballots() const {
  const auto col = votes.column("vote");
  if (!col) throw PabulibError("VOTES section has no vote column");
  std::vector<std::vector<std::string>> out;
  for (const auto& row : votes.rows) out.push_back(split_vote(row[*col]));
  return out;
}

PabulibFile parse_pabulib(std::string_view text) {
  enum class Section { none, meta, projects, votes };
  PabulibFile file;
  Section section = Section::none;
  bool seen_meta = false, seen_projects = false, seen_votes = false;
  bool expect_header = false;
  int line_no = 0;

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto marker = trim(raw);
    if (marker.empty()) continue;
    if (marker == "META" || marker == "PROJECTS" || marker == "VOTES") {
      if (marker == "META") {
        if (seen_meta || seen_projects || seen_votes) throw PabulibError("META must be the first section");
        section = Section::meta;
        seen_meta = true;
      } else if (marker == "PROJECTS") {
        if (!seen_meta || seen_projects || seen_votes) throw PabulibError("PROJECTS must follow META");
        section = Section::projects;
        seen_projects = true;
      } else {
        if (!seen_projects || seen_votes) throw PabulibError("VOTES must follow PROJECTS");
        section = Section::votes;
        seen_votes = true;
      }
      expect_header = true;
      continue;
    }
    auto fields = split_fields(raw, ';');
    const auto where = " (line " + std::to_string(line_no) + ")";
    switch (section) {
      case Section::none:
        throw PabulibError("content before the META section" + where);
      case Section::meta:
        if (expect_header && fields.size() == 2 && fields[0] == "key" && fields[1] == "value") {
          expect_header = false;
          break;
        }
        expect_header = false;
        if (fields.size() != 2) throw PabulibError("META rows must have two fields" + where);
        file.meta.emplace_back(std::move(fields[0]), std::move(fields[1]));
        break;
      case Section::projects:
      case Section::votes: {
        auto& table = section == Section::projects ? file.projects : file.votes;
        if (expect_header) {
          table.header = std::move(fields);
          expect_header = false;
        } else {
          if (fields.size() != table.header.size())
            throw PabulibError("row has " + std::to_string(fields.size()) + " fields, header has " +
                               std::to_string(table.header.size()) + where);
          table.rows.push_back(std::move(fields));
        }
        break;
      }
    }
  }
  if (!seen_meta) throw PabulibError("missing META section");
  if (!seen_projects) throw PabulibError("missing PROJECTS section");
  if (!seen_votes) throw PabulibError("missing VOTES section");

  const auto ids = file.project_ids();
  const std::set<std::string> known(ids.begin(), ids.end());
  if (known.size() != ids.size()) throw PabulibError("duplicate project id");
  if (!file.votes.column("vote")) throw PabulibError("VOTES section has no vote column");
  for (const auto& ballot : file.ballots())
    for (const auto& id : ballot)
      if (!known.contains(id)) throw PabulibError("vote references unknown project '" + id + "'");
  return file;
}

PabulibFile read_pabulib(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PabulibError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_pabulib(buffer.str());
  } catch (const PabulibError& e) {
    throw PabulibError(path.string() + ": " + e.what());
  }
}

std::string emit_pabulib(const PabulibFile& file) {
  std::string out = "META\nkey;value\n";
  for (const auto& [key, value] : file.meta) out += join_fields({key, value}) + "\n";
  out += "PROJECTS\n" + join_fields(file.projects.header) + "\n";
  for (const auto& row : file.projects.rows) out += join_fields(row) + "\n";
  out += "VOTES\n" + join_fields(file.votes.header) + "\n";
  for (const auto& row : file.votes.rows) out += join_fields(row) + "\n";
  return out;
}

KPolicy parse_k_policy(const std::string& text) {
  if (text == "half") return KHalf{};
  if (text == "budget-avg-cost") return KBudgetOverAverageCost{};
  if (text.rfind("over:", 0) == 0) {
    const int c = std::stoi(text.substr(5));
    if (c < 1) throw std::invalid_argument("k policy divisor must be positive");
    return KOver{c};
  }
  if (text.rfind("explicit:", 0) == 0) return KExplicit{std::stoi(text.substr(9))};
  throw std::invalid_argument("unknown k policy '" + text + "'");
}

namespace {

int resolve_k(const PabulibFile& file, const KPolicy& policy, int m) {
  if (std::holds_alternative<KHalf>(policy)) return m / 2;
  if (auto* over = std::get_if<KOver>(&policy)) return m / over->divisor;
  if (auto* fixed = std::get_if<KExplicit>(&policy)) return fixed->k;
  const auto budget = file.meta_value("budget");
  const auto cost_col = file.projects.column("cost");
  if (!budget || !cost_col) throw PabulibError("budget-avg-cost needs a budget meta entry and a cost column");
  const long double total = std::stold(*budget);
  long double costs = 0;
  for (const auto& row : file.projects.rows) costs += std::stold(row[*cost_col]);
  if (costs <= 0) throw PabulibError("projects have no positive total cost");
  return static_cast<int>(total / (costs / m));
}

}  // namespace

Election to_election(const PabulibFile& file, const KPolicy& policy, std::string name) {
  const auto vote_type = file.meta_value("vote_type");
  if (!vote_type || lower(*vote_type) != "approval")
    throw PabulibError("vote_type is '" + vote_type.value_or("") + "', expected approval");

  const auto ids = file.project_ids();
  std::unordered_map<std::string, CandidateId> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], static_cast<CandidateId>(i));

  std::vector<std::vector<CandidateId>> ballots;
  for (const auto& ballot : file.ballots()) {
    std::vector<CandidateId> row;
    for (const auto& id : ballot) row.push_back(index.at(id));
    ballots.push_back(std::move(row));
  }

  ElectionInfo info;
  info.name = name.empty() ? file.meta_value("description").value_or("") : std::move(name);
  info.candidate_labels = ids;
  if (const auto voter_col = file.votes.column("voter_id"))
    for (const auto& row : file.votes.rows) info.voter_labels.push_back(row[*voter_col]);

  const int m = static_cast<int>(ids.size());
  return Election(m, std::move(ballots), resolve_k(file, policy, m), std::move(info));
}

FilterDecision filter_instance(const PabulibFile& file, const FilterOptions& options) {
  const auto vote_type = file.meta_value("vote_type");
  if (!vote_type || lower(*vote_type) != "approval")
    return {false, "vote_type '" + vote_type.value_or("") + "' is not approval"};
  const auto ballots = file.ballots();
  if (ballots.empty()) return {false, "no votes"};
  std::size_t total = 0;
  for (const auto& b : ballots) total += b.size();
  if (total < static_cast<std::size_t>(options.min_average_ballot) * ballots.size()) {
    std::ostringstream reason;
    reason << "average ballot size " << static_cast<double>(total) / ballots.size() << " below "
           << options.min_average_ballot;
    return {false, reason.str()};
  }
  return {true, {}};
}

std::vector<FilterDecision> filter_dataset(const std::vector<PabulibFile>& files, const FilterOptions& options) {
  std::vector<FilterDecision> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(filter_instance(f, options));
  return out;
}

std::vector<std::filesystem::path> collect_pabulib_paths(const std::filesystem::path& input) {
  namespace fs = std::filesystem;
  if (!fs::exists(input)) throw PabulibError("no such file or directory: " + input.string());
  if (!fs::is_directory(input)) return {input};
  std::vector<fs::path> out;
  for (const auto& entry : fs::recursive_directory_iterator(input))
    if (entry.is_regular_file() && entry.path().extension() == ".pb") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

PabulibFile election_to_pabulib(const Election& election, const std::string& description) {
  PabulibFile file;
  file.meta = {{"description", description.empty() ? election.info().name : description},
               {"num_projects", std::to_string(election.num_candidates())},
               {"num_votes", std::to_string(election.num_voters())},
               {"budget", std::to_string(election.committee_size())},
               {"vote_type", "approval"}};
  file.projects.header = {"project_id", "cost"};
  for (CandidateId c = 0; c < election.num_candidates(); ++c) file.projects.rows.push_back({std::to_string(c + 1), "1"});
  file.votes.header = {"voter_id", "vote"};
  for (VoterId i = 0; i < election.num_voters(); ++i) {
    std::string vote;
    for (auto c : election.ballot(i)) {
      if (!vote.empty()) vote.push_back(',');
      vote += std::to_string(c + 1);
    }
    file.votes.rows.push_back({std::to_string(i + 1), vote});
  }
  return file;
}

}  // namespace propvote
