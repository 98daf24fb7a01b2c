// Command-line drivers for the proportionality analyses. Every command is
// deterministic given its inputs, flags and seed: instance i of a sorted
// input list is processed with seed derive_seed(seed, i), whatever the
// number of worker threads.

#include "propvote/axioms.hpp"
#include "propvote/count.hpp"
#include "propvote/gen.hpp"
#include "propvote/milp.hpp"
#include "propvote/pabulib.hpp"
#include "propvote/rules.hpp"
#include "propvote/sample.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace propvote;

namespace {

constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------- options

struct Common {
  std::string input;
  std::string out;
  std::uint64_t seed = 1;
  int jobs = 1;
  int workers = 1;
};

struct DatasetFilter {
  int min_avg_ballot = 4;
};

void add_common(CLI::App* cmd, Common& common, bool with_seed = true) {
  cmd->add_option("--input", common.input, "pabulib file or directory")->required();
  cmd->add_option("--out", common.out, "output file (default: stdout)");
  if (with_seed) cmd->add_option("--seed", common.seed, "master seed");
  cmd->add_option("--jobs", common.jobs, "instances processed in parallel")->check(CLI::PositiveNumber);
  cmd->add_option("--workers", common.workers, "sampling streams per instance")->check(CLI::PositiveNumber);
}

// ------------------------------------------------------------------ output

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

std::string fmt(double value) {
  std::ostringstream out;
  out << std::setprecision(10) << value;
  return out.str();
}

std::string join(const CandidateSet& set, const Election& e) {
  std::string out;
  for (CandidateId c : set) {
    if (!out.empty()) out += ' ';
    out += e.candidate_label(c);
  }
  return out;
}

json labels(const CandidateSet& set, const Election& e) {
  json out = json::array();
  for (CandidateId c : set) out.push_back(e.candidate_label(c));
  return out;
}

json voter_labels(const std::vector<VoterId>& group, const Election& e) {
  json out = json::array();
  for (VoterId i : group)
    out.push_back(i < static_cast<int>(e.info().voter_labels.size()) ? e.info().voter_labels[i]
                                                                      : "v" + std::to_string(i + 1));
  return out;
}

json witness_json(const Violation& v, const Election& e) {
  return {{"candidate", e.candidate_label(v.candidate)}, {"ell", v.ell}, {"group", voter_labels(v.group, e)}};
}

// --------------------------------------------------------------- instances

struct Instance {
  fs::path path;
  PabulibFile file;
  std::uint64_t seed;
};

std::vector<Instance> load_instances(const Common& common) {
  std::vector<Instance> out;
  const auto paths = collect_pabulib_paths(common.input);
  if (paths.empty()) throw std::runtime_error("no .pb files found under " + common.input);
  for (std::size_t i = 0; i < paths.size(); ++i)
    out.push_back({paths[i], read_pabulib(paths[i]), derive_seed(common.seed, i)});
  return out;
}

std::string instance_name(const Instance& inst) { return inst.path.stem().string(); }

// Runs fn over every instance on `jobs` threads; results keep input order.
template <typename Result>
std::vector<Result> run_instances(const std::vector<Instance>& instances, int jobs,
                                  const std::function<Result(const Instance&)>& fn) {
  std::vector<Result> results(instances.size());
  std::vector<std::exception_ptr> errors(instances.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < instances.size();) {
      try {
        results[i] = fn(instances[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(instances.size())));
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

// Filter verdict; excluded instances are reported on stderr and in JSON.
std::optional<std::string> excluded(const Instance& inst, const DatasetFilter& filter) {
  const auto decision = filter_instance(inst.file, {filter.min_avg_ballot});
  if (decision.included) return std::nullopt;
  return decision.reason;
}

void report_excluded(const Instance& inst, const std::string& reason) {
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  std::cerr << "excluded " << inst.path.string() << ": " << reason << "\n";
}

SamplerOptions sampler_options(const Common& common, std::optional<double> timeout = std::nullopt) {
  SamplerOptions options;
  options.workers = common.workers;
  if (timeout && *timeout > 0)
    options.deadline = std::chrono::steady_clock::now() +
                       std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                           std::chrono::duration<double>(*timeout));
  return options;
}

double acceptance_fraction(const RejectionBatch& batch) {
  return static_cast<double>(batch.accepted.size()) / static_cast<double>(batch.drawn);
}

std::vector<Axiom> parse_axioms(const std::string& list) {
  std::vector<Axiom> out;
  std::stringstream in(list);
  for (std::string item; std::getline(in, item, ',');) out.push_back(Axiom::parse(item));
  return out;
}

// ------------------------------------------------------------------- check

struct CheckArgs {
  Common common;
  std::string k_policy = "half";
  std::string committee;
  std::string axiom = "jr";
};

int cmd_check(const CheckArgs& args) {
  const auto paths = collect_pabulib_paths(args.common.input);
  if (paths.size() != 1) throw std::runtime_error("check expects exactly one input file");
  const auto e = to_election(read_pabulib(paths[0]), parse_k_policy(args.k_policy), paths[0].stem().string());
  std::map<std::string, CandidateId> by_label;
  for (CandidateId c = 0; c < e.num_candidates(); ++c) by_label[e.candidate_label(c)] = c;
  std::vector<CandidateId> ids;
  std::stringstream in(args.committee);
  for (std::string label; std::getline(in, label, ',');) {
    const auto it = by_label.find(label);
    if (it == by_label.end()) throw std::runtime_error("unknown project id '" + label + "'");
    ids.push_back(it->second);
  }
  const CandidateSet w(std::move(ids));
  const auto axiom = Axiom::parse(args.axiom);
  const auto report = check(e, w, axiom);
  json out = {{"schema", "propvote.check"},
              {"version", kSchemaVersion},
              {"instance", e.info().name},
              {"k", e.committee_size()},
              {"axiom", axiom.name()},
              {"committee", labels(w, e)},
              {"satisfied", report.satisfied},
              {"witness", report.witness ? witness_json(*report.witness, e) : json(nullptr)}};
  Output(args.common.out).stream() << out.dump(2) << "\n";
  return report.satisfied ? 0 : 1;
}

// ------------------------------------------------------------------ ksweep

struct KsweepArgs {
  Common common;
  std::string axioms = "jr,ejrp";
  std::uint64_t accept = 1000;
  double timeout = 900;
  std::uint64_t exact_cap = 1'000'000;
};

int cmd_ksweep(const KsweepArgs& args) {
  const auto instances = load_instances(args.common);
  const auto axioms = parse_axioms(args.axioms);
  using Rows = std::vector<std::string>;
  const auto rows = run_instances<Rows>(instances, args.common.jobs, [&](const Instance& inst) {
    Rows out;
    const auto base = to_election(inst.file, KExplicit{1});
    const int m = base.num_candidates();
    for (std::size_t a = 0; a < axioms.size(); ++a)
      for (int k = 1; k <= m; ++k) {
        const auto e = base.with_committee_size(k);
        const auto seed = derive_seed(inst.seed, a * (m + 1) + k);
        std::string fraction, accepted, drawn, status = "ok", exact;
        try {
          const auto batch =
              sample_axiom_committees(e, axioms[a], args.accept, seed, sampler_options(args.common, args.timeout));
          fraction = fmt(acceptance_fraction(batch));
          accepted = std::to_string(batch.accepted.size());
          drawn = std::to_string(batch.drawn);
        } catch (const SamplingLimitExceeded& limit) {
          status = limit.reason() == SamplingLimitExceeded::Reason::deadline ? "timeout" : "draw_cap";
          accepted = std::to_string(limit.accepted());
          drawn = std::to_string(limit.drawn());
        }
        if (binomial(m, k) <= args.exact_cap) exact = fmt(to_double(axiom_fraction_exact(e, axioms[a], args.exact_cap)));
        out.push_back(csv_field(instance_name(inst)) + "," + std::to_string(k) + "," + axioms[a].name() + "," +
                      fraction + "," + accepted + "," + drawn + "," + exact + "," + status);
      }
    return out;
  });
  Output output(args.common.out);
  auto& os = output.stream();
  os << "instance,k,axiom,fraction,accepted,drawn,exact_fraction,status\n";
  for (const auto& block : rows)
    for (const auto& row : block) os << row << "\n";
  return 0;
}

// --------------------------------------------------------------- fractions

struct FractionsArgs {
  Common common;
  DatasetFilter filter;
  std::string k_policy = "half";
  std::uint64_t accept = 5000;
  double timeout = 0;
};

int cmd_fractions(const FractionsArgs& args) {
  const auto instances = load_instances(args.common);
  const auto policy = parse_k_policy(args.k_policy);
  const auto results = run_instances<json>(instances, args.common.jobs, [&](const Instance& inst) {
    json row = {{"instance", instance_name(inst)}, {"path", inst.path.string()}};
    if (const auto why = excluded(inst, args.filter)) {
      report_excluded(inst, *why);
      row["excluded"] = *why;
      return row;
    }
    const auto e = to_election(inst.file, policy);
    row["n"] = e.num_voters();
    row["m"] = e.num_candidates();
    row["k"] = e.committee_size();
    int index = 0;
    for (const auto& [key, axiom] : {std::pair{"jr", Axiom::jr()}, std::pair{"ejrp", Axiom::ejr_plus()}}) {
      try {
        const auto batch = sample_axiom_committees(e, axiom, args.accept, derive_seed(inst.seed, index++),
                                                   sampler_options(args.common, args.timeout));
        row[std::string(key) + "_fraction"] = acceptance_fraction(batch);
        row[std::string(key) + "_drawn"] = batch.drawn;
      } catch (const SamplingLimitExceeded& limit) {
        row[std::string(key) + "_fraction"] = nullptr;
        row[std::string(key) + "_drawn"] = limit.drawn();
        row[std::string(key) + "_status"] =
            limit.reason() == SamplingLimitExceeded::Reason::deadline ? "timeout" : "draw_cap";
      }
    }
    return row;
  });
  json out = {{"schema", "propvote.fractions"},
              {"version", kSchemaVersion},
              {"k_policy", args.k_policy},
              {"accept", args.accept},
              {"seed", args.common.seed},
              {"instances", results}};
  Output(args.common.out).stream() << out.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- distance

struct DistanceArgs {
  Common common;
  DatasetFilter filter;
  std::string k_policy = "half";
  std::string axiom = "jr";
  std::string mode = "avg_sampled";
  std::uint64_t accept = 5000;
  std::string backend = "builtin";
  double timeout = 1800;
};

int cmd_distance(const DistanceArgs& args) {
  const auto instances = load_instances(args.common);
  const auto policy = parse_k_policy(args.k_policy);
  const auto axiom = Axiom::parse(args.axiom);
  const auto results = run_instances<json>(instances, args.common.jobs, [&](const Instance& inst) {
    json row = {{"instance", instance_name(inst)}, {"path", inst.path.string()}};
    if (const auto why = excluded(inst, args.filter)) {
      report_excluded(inst, *why);
      row["excluded"] = *why;
      return row;
    }
    const auto e = to_election(inst.file, policy);
    row["m"] = e.num_candidates();
    row["k"] = e.committee_size();
    row["expected_random_distance"] = to_double(expected_random_distance(e.num_candidates(), e.committee_size()));
    if (args.mode == "avg_sampled") {
      try {
        const auto r = estimate_avg_distance(e, axiom, args.accept, inst.seed, sampler_options(args.common, args.timeout));
        row["normalized_avg_distance"] = r.value();
        row["degenerate"] = r.degenerate;
        row["drawn"] = r.samples_drawn;
      } catch (const SamplingLimitExceeded& limit) {
        row["normalized_avg_distance"] = nullptr;
        row["status"] = limit.reason() == SamplingLimitExceeded::Reason::deadline ? "timeout" : "draw_cap";
      }
    } else if (args.mode == "max_ilp") {
      SolverConfig config;
      config.backend = parse_backend(args.backend);
      if (args.timeout > 0) config.time_limit = std::chrono::duration<double>(args.timeout);
      const auto model = build_diff_committees(e, axiom);
      const auto outcome = solve(model, config);
      row["status"] = to_string(outcome.status);
      row["wall_seconds"] = outcome.wall_seconds;
      row["max_distance"] = outcome.objective ? json(*outcome.objective) : json(nullptr);
      if (outcome.assignment) {
        const auto decoded = decode(model, *outcome.assignment);
        row["first"] = labels(*decoded.first, e);
        row["second"] = labels(*decoded.second, e);
      }
    } else {
      throw std::invalid_argument("unknown distance mode '" + args.mode + "'");
    }
    return row;
  });
  json out = {{"schema", "propvote.distance"},
              {"version", kSchemaVersion},
              {"axiom", axiom.name()},
              {"mode", args.mode},
              {"instances", results}};
  Output(args.common.out).stream() << out.dump(2) << "\n";
  return 0;
}

// -------------------------------------------------------------- importance

struct ImportanceArgs {
  Common common;
  DatasetFilter filter;
  std::string k_policy = "half";
  std::string axiom = "jr";
  std::uint64_t accept = 5000;
  double max_ejrp_fraction = 0.95;
  double timeout = 0;
};

// EJR+ fraction above the cap means EJR+ hardly constrains the instance.
std::optional<std::string> above_ejrp_cap(const Election& e, double cap, std::uint64_t accept, std::uint64_t seed,
                                          const SamplerOptions& options, double* fraction) {
  if (cap >= 1) return std::nullopt;
  const auto batch = sample_axiom_committees(e, Axiom::ejr_plus(), accept, seed, options);
  *fraction = acceptance_fraction(batch);
  if (*fraction <= cap) return std::nullopt;
  return "EJR+ fraction " + fmt(*fraction) + " above " + fmt(cap);
}

int cmd_importance(const ImportanceArgs& args) {
  const auto instances = load_instances(args.common);
  const auto policy = parse_k_policy(args.k_policy);
  const auto axiom = Axiom::parse(args.axiom);
  using Rows = std::vector<std::string>;
  const auto rows = run_instances<Rows>(instances, args.common.jobs, [&](const Instance& inst) -> Rows {
    if (const auto why = excluded(inst, args.filter)) {
      report_excluded(inst, *why);
      return {};
    }
    const auto e = to_election(inst.file, policy);
    const auto options = sampler_options(args.common, args.timeout);
    double ejrp_fraction = 0;
    if (const auto why =
            above_ejrp_cap(e, args.max_ejrp_fraction, args.accept, derive_seed(inst.seed, 1), options, &ejrp_fraction)) {
      report_excluded(inst, *why);
      return {};
    }
    const auto batch = sample_axiom_committees(e, axiom, args.accept, derive_seed(inst.seed, 0), options);
    Rows out;
    for (CandidateId c = 0; c < e.num_candidates(); ++c)
      out.push_back(csv_field(instance_name(inst)) + "," + csv_field(e.candidate_label(c)) + "," +
                    std::to_string(e.approval_score(c)) + "," + fmt(to_double(batch_prevalence(batch, c))) + "," +
                    fmt(to_double(batch_power_fraction(e, axiom, batch, c))));
    return out;
  });
  Output output(args.common.out);
  auto& os = output.stream();
  os << "instance,candidate,approval_score,prevalence,power_fraction\n";
  for (const auto& block : rows)
    for (const auto& row : block) os << row << "\n";
  return 0;
}

// --------------------------------------------------------------- correlate

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (ch == '"') {
      if (quoted && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else {
        quoted = !quoted;
      }
    } else if (ch == ',' && !quoted) {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

// Pearson coefficient; NaN when either series is constant.
double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0 || syy == 0) return std::nan("");
  return sxy / std::sqrt(sxx * syy);
}

struct CorrelateArgs {
  std::string input;
  std::string out;
};

int cmd_correlate(const CorrelateArgs& args) {
  std::ifstream in(args.input);
  if (!in) throw std::runtime_error("cannot read " + args.input);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV " + args.input);
  const auto header = split_csv_line(line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line))
    if (!line.empty()) rows.push_back(split_csv_line(line));
  // Measures are the columns that parse as numbers on every row.
  std::vector<std::size_t> numeric;
  for (std::size_t col = 0; col < header.size(); ++col) {
    bool ok = !rows.empty();
    for (const auto& row : rows) {
      if (col >= row.size()) throw std::runtime_error("short CSV row");
      char* end = nullptr;
      std::strtod(row[col].c_str(), &end);
      if (row[col].empty() || *end != '\0') ok = false;
    }
    if (ok) numeric.push_back(col);
  }
  auto column = [&](std::size_t col) {
    std::vector<double> v;
    for (const auto& row : rows) v.push_back(std::stod(row[col]));
    return v;
  };
  Output output(args.out);
  auto& os = output.stream();
  os << "measure_a,measure_b,n,pearson\n";
  for (std::size_t a = 0; a < numeric.size(); ++a)
    for (std::size_t b = a + 1; b < numeric.size(); ++b) {
      const double r = pearson(column(numeric[a]), column(numeric[b]));
      os << csv_field(header[numeric[a]]) << "," << csv_field(header[numeric[b]]) << "," << rows.size() << ","
         << (std::isnan(r) ? std::string() : fmt(r)) << "\n";
    }
  return 0;
}

// ----------------------------------------------------------- rules-overlap

struct OverlapArgs {
  Common common;
  DatasetFilter filter;
  std::string k_policy = "half";
  std::uint64_t accept = 5000;
  double max_ejrp_fraction = 0.95;
  double timeout = 0;
};

int cmd_rules_overlap(const OverlapArgs& args) {
  const auto instances = load_instances(args.common);
  const auto policy = parse_k_policy(args.k_policy);
  using Rows = std::vector<std::string>;
  const auto rows = run_instances<Rows>(instances, args.common.jobs, [&](const Instance& inst) -> Rows {
    if (const auto why = excluded(inst, args.filter)) {
      report_excluded(inst, *why);
      return {};
    }
    const auto e = to_election(inst.file, policy);
    const auto options = sampler_options(args.common, args.timeout);
    double ejrp_fraction = 0;
    if (const auto why =
            above_ejrp_cap(e, args.max_ejrp_fraction, args.accept, derive_seed(inst.seed, 1), options, &ejrp_fraction)) {
      report_excluded(inst, *why);
      return {};
    }
    const int m = e.num_candidates();
    std::vector<Rational> score(m), jr(m), ejrp(m);
    const auto jr_batch = sample_axiom_committees(e, Axiom::jr(), args.accept, derive_seed(inst.seed, 2), options);
    const auto ejrp_batch =
        sample_axiom_committees(e, Axiom::ejr_plus(), args.accept, derive_seed(inst.seed, 3), options);
    for (CandidateId c = 0; c < m; ++c) {
      score[c] = e.approval_score(c);
      jr[c] = batch_prevalence(jr_batch, c);
      ejrp[c] = batch_prevalence(ejrp_batch, c);
    }
    const std::pair<const char*, Committee> measures[] = {{"approval_score", top_k_by_score(e, score)},
                                                          {"jr_prevalence", top_k_by_score(e, jr)},
                                                          {"ejrp_prevalence", top_k_by_score(e, ejrp)}};
    const std::pair<const char*, Committee> rules[] = {{"mes", mes_with_phragmen_completion(e)},
                                                       {"seq_phragmen", seq_phragmen(e)},
                                                       {"seq_pav", seq_pav(e)}};
    Rows out;
    for (const auto& [rule, w] : rules)
      for (const auto& [measure, top] : measures)
        out.push_back(csv_field(instance_name(inst)) + "," + rule + "," + measure + "," +
                      fmt(to_double(relative_overlap(w, top))) + "," + csv_field(join(w, e)) + "," +
                      csv_field(join(top, e)));
    return out;
  });
  Output output(args.common.out);
  auto& os = output.stream();
  os << "instance,rule,measure,overlap,rule_committee,measure_committee\n";
  for (const auto& block : rows)
    for (const auto& row : block) os << row << "\n";
  return 0;
}

// --------------------------------------------------------------------- gen

struct GenArgs {
  std::string model = "resampling";
  int voters = 100;
  int candidates = 20;
  int k = 0;
  double p = 0.25;
  double phi = 0.5;
  double radius = 0.1;
  int dim = 2;
  int count = 1;
  std::uint64_t seed = 1;
  std::string out_dir;
};

int cmd_gen(const GenArgs& args) {
  fs::create_directories(args.out_dir);
  const int k = args.k > 0 ? args.k : std::max(1, args.candidates / 2);
  for (int i = 0; i < args.count; ++i) {
    const auto seed = derive_seed(args.seed, i);
    std::ostringstream name;
    if (args.model == "resampling") {
      name << "resampling_p" << args.p << "_phi" << args.phi;
    } else if (args.model == "euclidean") {
      name << "euclidean_d" << args.dim << "_r" << args.radius;
    } else {
      throw std::invalid_argument("unknown model '" + args.model + "'");
    }
    name << "_s" << args.seed << "_" << i;
    const auto e = args.model == "resampling"
                       ? gen_resampling(args.voters, args.candidates, k, args.p, args.phi, seed)
                       : gen_euclidean(args.voters, args.candidates, k, args.radius, args.dim, seed);
    const auto path = fs::path(args.out_dir) / (name.str() + ".pb");
    std::ofstream out(path);
    out << emit_pabulib(election_to_pabulib(e, name.str()));
    std::cout << path.string() << "\n";
  }
  return 0;
}

// --------------------------------------------------------------------- ilp

struct IlpArgs {
  std::string input;
  std::string out;
  std::string k_policy = "half";
  std::string problem = "jr-not-ejrp";
  std::string required;
  bool quotient = false;
  std::string backend = "builtin";
  double timeout = 1800;
  std::string write_lp_path;
};

int cmd_ilp(const IlpArgs& args) {
  const auto paths = collect_pabulib_paths(args.input);
  if (paths.size() != 1) throw std::runtime_error("ilp expects exactly one input file");
  const auto e = to_election(read_pabulib(paths[0]), parse_k_policy(args.k_policy), paths[0].stem().string());
  auto spec = ProblemSpec::parse(args.problem);
  if (!args.required.empty()) {
    std::map<std::string, CandidateId> by_label;
    for (CandidateId c = 0; c < e.num_candidates(); ++c) by_label[e.candidate_label(c)] = c;
    std::vector<CandidateId> ids;
    std::stringstream in(args.required);
    for (std::string label; std::getline(in, label, ',');) {
      const auto it = by_label.find(label);
      if (it == by_label.end()) throw std::runtime_error("unknown project id '" + label + "'");
      ids.push_back(it->second);
    }
    spec.required = CandidateSet(std::move(ids));
  }
  const auto model = build_model(e, spec, args.quotient);
  if (!args.write_lp_path.empty()) {
    std::ofstream lp(args.write_lp_path);
    write_lp(model, lp);
  }
  SolverConfig config;
  config.backend = parse_backend(args.backend);
  if (args.timeout >= 0) config.time_limit = std::chrono::duration<double>(args.timeout);
  const auto outcome = solve(model, config);
  json out = {{"schema", "propvote.ilp"},
              {"version", kSchemaVersion},
              {"instance", e.info().name},
              {"problem", spec.id()},
              {"quotient", args.quotient},
              {"k", e.committee_size()},
              {"variables", model.num_variables()},
              {"constraints", model.num_constraints()},
              {"backend", outcome.backend},
              {"status", to_string(outcome.status)},
              {"wall_seconds", outcome.wall_seconds},
              {"objective", outcome.objective ? json(*outcome.objective) : json(nullptr)}};
  if (outcome.assignment) {
    const auto decoded = decode(model, *outcome.assignment);
    if (decoded.first) out["committee"] = labels(*decoded.first, e);
    if (decoded.second) out["second"] = labels(*decoded.second, e);
    if (decoded.distance) out["distance"] = *decoded.distance;
    if (decoded.witness) out["witness"] = witness_json(*decoded.witness, e);
  }
  Output(args.out).stream() << out.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- lp-solve

struct LpSolveArgs {
  std::string model;
  std::string solution;
  std::string timeout = "none";
};

// Follows the external-solver protocol, so it can stand in for SOLVER_CMD.
int cmd_lp_solve(const LpSolveArgs& args) {
  std::ifstream in(args.model);
  if (!in) throw std::runtime_error("cannot read " + args.model);
  std::ostringstream text;
  text << in.rdbuf();
  const auto model = parse_lp(text.str());
  std::optional<std::chrono::duration<double>> limit;
  if (args.timeout != "none") limit = std::chrono::duration<double>(std::stod(args.timeout));
  const auto outcome = solve_builtin(model, limit);
  std::ofstream out(args.solution);
  write_solution(model, outcome, out);
  switch (outcome.status) {
    case SolveStatus::timeout:
      return 3;
    case SolveStatus::infeasible:
      return 4;
    default:
      return 0;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proportionality analysis of approval-based committee elections"};
  app.require_subcommand(1);

  CheckArgs check_args;
  auto* check = app.add_subcommand("check", "check a committee against an axiom");
  add_common(check, check_args.common, false);
  check->add_option("--committee", check_args.committee, "comma-separated project ids")->required();
  check->add_option("--axiom", check_args.axiom, "jr, ejrp or t:T");
  check->add_option("--k-policy", check_args.k_policy, "half, over:C, explicit:K or budget-avg-cost");

  KsweepArgs ks;
  auto* ksweep = app.add_subcommand("ksweep", "axiom fractions for every committee size");
  add_common(ksweep, ks.common);
  ksweep->add_option("--axiom", ks.axioms, "comma-separated axioms");
  ksweep->add_option("--accept", ks.accept, "accepted committees per (k, axiom)");
  ksweep->add_option("--timeout", ks.timeout, "seconds per (k, axiom); 0 disables");
  ksweep->add_option("--exact-cap", ks.exact_cap, "largest C(m,k) for the exact column");

  FractionsArgs fr;
  auto* fractions = app.add_subcommand("fractions", "JR and EJR+ fractions per instance");
  add_common(fractions, fr.common);
  fractions->add_option("--k-policy", fr.k_policy);
  fractions->add_option("--accept", fr.accept);
  fractions->add_option("--timeout", fr.timeout, "seconds per axiom; 0 disables");
  fractions->add_option("--min-avg-ballot", fr.filter.min_avg_ballot);

  DistanceArgs di;
  auto* distance = app.add_subcommand("distance", "average or maximum distance between axiom committees");
  add_common(distance, di.common);
  distance->add_option("--k-policy", di.k_policy);
  distance->add_option("--axiom", di.axiom);
  distance->add_option("--mode", di.mode, "avg_sampled or max_ilp");
  distance->add_option("--accept", di.accept);
  distance->add_option("--backend", di.backend, "builtin, enumerate or external");
  distance->add_option("--timeout", di.timeout);
  distance->add_option("--min-avg-ballot", di.filter.min_avg_ballot);

  ImportanceArgs im;
  auto* importance = app.add_subcommand("importance", "per-candidate prevalence and power fraction");
  add_common(importance, im.common);
  importance->add_option("--k-policy", im.k_policy);
  importance->add_option("--axiom", im.axiom);
  importance->add_option("--accept", im.accept);
  importance->add_option("--timeout", im.timeout);
  importance->add_option("--min-avg-ballot", im.filter.min_avg_ballot);
  importance->add_option("--max-ejrp-fraction", im.max_ejrp_fraction, "skip instances above this; 1 disables");

  CorrelateArgs co;
  auto* correlate = app.add_subcommand("correlate", "Pearson coefficients between numeric CSV columns");
  correlate->add_option("--input", co.input, "CSV file")->required();
  correlate->add_option("--out", co.out);

  OverlapArgs ov;
  auto* overlap = app.add_subcommand("rules-overlap", "overlap of rule outcomes with top-k by each measure");
  add_common(overlap, ov.common);
  overlap->add_option("--k-policy", ov.k_policy);
  overlap->add_option("--accept", ov.accept);
  overlap->add_option("--timeout", ov.timeout);
  overlap->add_option("--min-avg-ballot", ov.filter.min_avg_ballot);
  overlap->add_option("--max-ejrp-fraction", ov.max_ejrp_fraction);

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "write synthetic elections as pabulib files");
  gen->add_option("--model", ga.model, "resampling or euclidean");
  gen->add_option("--voters", ga.voters);
  gen->add_option("--candidates", ga.candidates);
  gen->add_option("--k", ga.k, "committee size stored as the budget; default m/2");
  gen->add_option("--p", ga.p);
  gen->add_option("--phi", ga.phi);
  gen->add_option("--radius", ga.radius);
  gen->add_option("--dim", ga.dim);
  gen->add_option("--count", ga.count);
  gen->add_option("--seed", ga.seed);
  gen->add_option("--out", ga.out_dir, "output directory")->required();

  IlpArgs ia;
  auto* ilp = app.add_subcommand("ilp", "build and solve an integer program");
  ilp->add_option("--input", ia.input)->required();
  ilp->add_option("--out", ia.out);
  ilp->add_option("--k-policy", ia.k_policy);
  ilp->add_option("--problem", ia.problem, "jr-not-ejrp, diff-jr, diff-ejrp, pcand-jr or pcand-ejrp");
  ilp->add_option("--required", ia.required, "comma-separated project ids for pcand problems");
  ilp->add_flag("--quotient", ia.quotient, "variables per equivalence class");
  ilp->add_option("--backend", ia.backend);
  ilp->add_option("--timeout", ia.timeout, "seconds; negative disables");
  ilp->add_option("--write-lp", ia.write_lp_path, "also write the model in LP format");

  LpSolveArgs la;
  auto* lp_solve = app.add_subcommand("lp-solve", "solve an LP file with the built-in search");
  lp_solve->add_option("model", la.model)->required();
  lp_solve->add_option("solution", la.solution)->required();
  lp_solve->add_option("--timeout", la.timeout, "seconds or 'none'");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(check_args);
    if (ksweep->parsed()) return cmd_ksweep(ks);
    if (fractions->parsed()) return cmd_fractions(fr);
    if (distance->parsed()) return cmd_distance(di);
    if (importance->parsed()) return cmd_importance(im);
    if (correlate->parsed()) return cmd_correlate(co);
    if (overlap->parsed()) return cmd_rules_overlap(ov);
    if (gen->parsed()) return cmd_gen(ga);
    if (ilp->parsed()) return cmd_ilp(ia);
    if (lp_solve->parsed()) return cmd_lp_solve(la);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 2;
  }
  return 2;
}
