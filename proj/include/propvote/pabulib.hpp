#pragma once

// Reader and writer for pabulib ".pb" files, conversion to approval
// elections and the dataset inclusion filter.
//
// Layout: a "META" line followed by "key;value" rows (an optional literal
// "key;value" header is recognised), a "PROJECTS" line followed by a header
// row and data rows, and a "VOTES" line followed by a header row and data
// rows. Fields are ';'-separated and may be double-quoted. Projects are
// keyed by the "project_id" column; ballots live in the "vote" column as a
// ','-separated list of project ids.

#include "propvote/core.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace propvote {

class PabulibError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PabulibTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of `name` in the header, if present.
  std::optional<std::size_t> column(std::string_view name) const;
};

struct PabulibFile {
  std::vector<std::pair<std::string, std::string>> meta;  // file order
  PabulibTable projects;
  PabulibTable votes;

  std::optional<std::string> meta_value(std::string_view key) const;
  std::vector<std::string> project_ids() const;
  /// Ballots as lists of project ids, in file order.
  std::vector<std::vector<std::string>> ballots() const;
};

/// Throws PabulibError on a missing section or column, a duplicate project
/// id, a vote naming an unknown project, or a row whose arity differs from
/// its header.
PabulibFile parse_pabulib(std::string_view text);
PabulibFile read_pabulib(const std::filesystem::path& path);

std::string emit_pabulib(const PabulibFile& file);

struct KHalf {};
struct KOver {
  int divisor;
};
struct KExplicit {
  int k;
};
/// floor(total budget / average project cost).
struct KBudgetOverAverageCost {};
using KPolicy = std::variant<KHalf, KOver, KExplicit, KBudgetOverAverageCost>;

/// Parses "half", "over:C", "explicit:K" and "budget-avg-cost".
KPolicy parse_k_policy(const std::string& text);

/// Dense re-indexing in file order: projects become candidates 0..m-1 and
/// voters 0..n-1. Costs are ignored. Throws PabulibError for a non-approval
/// vote_type and std::invalid_argument if the policy yields k outside [1, m].
Election to_election(const PabulibFile& file, const KPolicy& policy, std::string name = {});

struct FilterOptions {
  /// Minimum mean ballot length (inclusive).
  int min_average_ballot = 4;
};

struct FilterDecision {
  bool included = false;
  std::string reason;  // empty when included
};

FilterDecision filter_instance(const PabulibFile& file, const FilterOptions& options = {});

/// Decisions for every file, in input order.
std::vector<FilterDecision> filter_dataset(const std::vector<PabulibFile>& files, const FilterOptions& options = {});

/// The file itself, or every "*.pb" file below a directory, sorted by path.
std::vector<std::filesystem::path> collect_pabulib_paths(const std::filesystem::path& input);

/// Wraps an election as a pabulib file (unit costs, vote_type approval).
PabulibFile election_to_pabulib(const Election& election, const std::string& description = {});

}  // namespace propvote
