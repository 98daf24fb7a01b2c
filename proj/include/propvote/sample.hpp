#pragma once

// Randomized estimators over uniformly drawn committees.
//
// Random numbers come from std::mt19937_64, whose output sequence is fixed
// by the C++ standard, and every draw is derived from raw 64-bit words
// (no std:: distributions), so results are identical across platforms.
// Worker w of a run seeded with s uses the stream seeded with
// derive_seed(s, w).

#include "propvote/axioms.hpp"
#include "propvote/core.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace propvote {

/// SplitMix64 finaliser applied to (master + index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, bound), by rejection.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// Raised when rejection sampling hits its draw cap or wall-clock deadline.
class SamplingLimitExceeded : public std::runtime_error {
 public:
  enum class Reason { draw_cap, deadline };
  SamplingLimitExceeded(Reason reason, std::uint64_t drawn, std::uint64_t accepted);
  Reason reason() const { return reason_; }
  std::uint64_t drawn() const { return drawn_; }
  std::uint64_t accepted() const { return accepted_; }

 private:
  Reason reason_;
  std::uint64_t drawn_;
  std::uint64_t accepted_;
};

struct SamplerOptions {
  int workers = 1;
  /// Draws allowed per required acceptance before giving up.
  std::uint64_t draw_cap_factor = 10'000;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct EstimatorResult {
  Rational estimate;
  double epsilon = 0;  // 0 when the run used a fixed sample size
  double delta = 0;
  std::uint64_t samples_drawn = 0;
  std::uint64_t samples_accepted = 0;
  std::uint64_t seed = 0;
  bool degenerate = false;  // e.g. a distance with no distinct pairs

  double value() const { return to_double(estimate); }
};

/// ceil(ln(2/delta) / (2 epsilon^2)). Throws std::invalid_argument unless
/// both parameters lie in (0, 1).
std::uint64_t required_samples(double epsilon, double delta);

/// Uniform k-subsets by partial Fisher-Yates over a persistent id array.
class CommitteeSampler {
 public:
  CommitteeSampler(int num_candidates, int committee_size);
  Committee draw(Rng& rng);

 private:
  std::vector<CandidateId> pool_;
  int committee_size_;
};

Committee sample_committee_uniform(const Election& election, Rng& rng);

/// Committees accepted by rejection sampling, in acceptance order per
/// worker (worker 0 first).
struct RejectionBatch {
  std::vector<Committee> accepted;
  std::uint64_t drawn = 0;
  std::uint64_t seed = 0;
};

/// Draws uniform committees until `num_accepted` satisfy the axiom.
RejectionBatch sample_axiom_committees(const Election& election, const Axiom& axiom, std::uint64_t num_accepted,
                                       std::uint64_t seed, const SamplerOptions& options = {});

/// Monte Carlo estimate of the axiom fraction from
/// required_samples(epsilon, delta) direct draws.
EstimatorResult estimate_fraction(const Election& election, const Axiom& axiom, double epsilon, double delta,
                                  std::uint64_t seed, const SamplerOptions& options = {});

/// Fraction of axiom committees containing `candidate`, from
/// required_samples(epsilon, delta) accepted committees.
EstimatorResult estimate_prevalence(const Election& election, CandidateId candidate, const Axiom& axiom,
                                    double epsilon, double delta, std::uint64_t seed,
                                    const SamplerOptions& options = {});

/// Fraction of accepted committees that contain `candidate` and stop
/// satisfying the axiom once it is removed.
EstimatorResult estimate_power_index(const Election& election, CandidateId candidate, const Axiom& axiom,
                                     std::uint64_t num_accepted, std::uint64_t seed,
                                     const SamplerOptions& options = {});

/// Mean pairwise distance of accepted committees divided by
/// expected_random_distance(m, k).
EstimatorResult estimate_avg_distance(const Election& election, const Axiom& axiom, std::uint64_t num_accepted,
                                      std::uint64_t seed, const SamplerOptions& options = {});

/// Statistics of an existing batch.
Rational batch_prevalence(const RejectionBatch& batch, CandidateId candidate);
Rational batch_power_fraction(const Election& election, const Axiom& axiom, const RejectionBatch& batch,
                              CandidateId candidate);
/// Normalised mean pairwise distance; `degenerate` is set when the batch
/// has fewer than two committees or the normaliser is zero.
Rational batch_normalized_distance(const Election& election, const RejectionBatch& batch, bool* degenerate = nullptr);

}  // namespace propvote
