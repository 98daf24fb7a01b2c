#include "propvote/sample.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

namespace propvote {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("empty range");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const auto x = engine_();
    if (x >= threshold) return x % bound;
  }
}

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

SamplingLimitExceeded::SamplingLimitExceeded(Reason reason, std::uint64_t drawn, std::uint64_t accepted)
    : std::runtime_error(reason == Reason::draw_cap ? "rejection sampling hit its draw cap"
                                                    : "rejection sampling hit its deadline"),
      reason_(reason),
      drawn_(drawn),
      accepted_(accepted) {}

std::uint64_t required_samples(double epsilon, double delta) {
  if (!(epsilon > 0 && epsilon < 1) || !(delta > 0 && delta < 1))
    throw std::invalid_argument("epsilon and delta must lie in (0, 1)");
  const long double r = std::log(2.0L / delta) / (2.0L * epsilon * epsilon);
  // Absorb rounding noise when r is an integer in exact arithmetic.
  const long double nearest = std::round(r);
  if (std::fabs(r - nearest) <= 1e-9L * std::max(1.0L, r)) return static_cast<std::uint64_t>(nearest);
  return static_cast<std::uint64_t>(std::ceil(r));
}

CommitteeSampler::CommitteeSampler(int num_candidates, int committee_size)
    : pool_(num_candidates), committee_size_(committee_size) {
  if (committee_size < 0 || committee_size > num_candidates) throw std::invalid_argument("bad committee size");
  std::iota(pool_.begin(), pool_.end(), 0);
}

Committee CommitteeSampler::draw(Rng& rng) {
  const int m = static_cast<int>(pool_.size());
  for (int i = 0; i < committee_size_; ++i) {
    const auto j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(m - i)));
    std::swap(pool_[i], pool_[j]);
  }
  return CandidateSet(std::vector<CandidateId>(pool_.begin(), pool_.begin() + committee_size_));
}

Committee sample_committee_uniform(const Election& election, Rng& rng) {
  CommitteeSampler sampler(election.num_candidates(), election.committee_size());
  return sampler.draw(rng);
}

namespace {

struct WorkerOutcome {
  std::vector<Committee> accepted;
  std::uint64_t drawn = 0;
  std::exception_ptr error;
};

// Splits `total` as evenly as possible, earlier workers taking the extra.
std::vector<std::uint64_t> split_quota(std::uint64_t total, int workers) {
  std::vector<std::uint64_t> quota(workers, total / workers);
  for (std::uint64_t w = 0; w < total % workers; ++w) ++quota[w];
  return quota;
}

template <typename Work>
std::vector<WorkerOutcome> run_workers(int workers, Work work) {
  std::vector<WorkerOutcome> outcomes(workers);
  if (workers == 1) {
    try {
      work(0, outcomes[0]);
    } catch (...) {
      outcomes[0].error = std::current_exception();
    }
    return outcomes;
  }
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w)
    threads.emplace_back([&, w] {
      try {
        work(w, outcomes[w]);
      } catch (...) {
        outcomes[w].error = std::current_exception();
      }
    });
  for (auto& t : threads) t.join();
  return outcomes;
}

}  // namespace

RejectionBatch sample_axiom_committees(const Election& election, const Axiom& axiom, std::uint64_t num_accepted,
                                       std::uint64_t seed, const SamplerOptions& options) {
  const int workers = std::max(1, options.workers);
  const auto quota = split_quota(num_accepted, workers);

  auto outcomes = run_workers(workers, [&](int w, WorkerOutcome& out) {
    Rng rng(derive_seed(seed, w));
    CommitteeSampler sampler(election.num_candidates(), election.committee_size());
    const std::uint64_t cap = options.draw_cap_factor * std::max<std::uint64_t>(quota[w], 1);
    while (out.accepted.size() < quota[w]) {
      if (out.drawn >= cap)
        throw SamplingLimitExceeded(SamplingLimitExceeded::Reason::draw_cap, out.drawn, out.accepted.size());
      if (options.deadline && (out.drawn & 255) == 0 && std::chrono::steady_clock::now() > *options.deadline)
        throw SamplingLimitExceeded(SamplingLimitExceeded::Reason::deadline, out.drawn, out.accepted.size());
      auto committee = sampler.draw(rng);
      ++out.drawn;
      if (satisfies(election, committee, axiom)) out.accepted.push_back(std::move(committee));
    }
  });

  RejectionBatch batch;
  batch.seed = seed;
  std::exception_ptr first_error;
  std::uint64_t accepted = 0;
  for (auto& o : outcomes) {
    batch.drawn += o.drawn;
    accepted += o.accepted.size();
    if (o.error && !first_error) first_error = o.error;
    for (auto& c : o.accepted) batch.accepted.push_back(std::move(c));
  }
  if (first_error) {
    try {
      std::rethrow_exception(first_error);
    } catch (const SamplingLimitExceeded& e) {
      throw SamplingLimitExceeded(e.reason(), batch.drawn, accepted);
    }
  }
  return batch;
}

EstimatorResult estimate_fraction(const Election& election, const Axiom& axiom, double epsilon, double delta,
                                  std::uint64_t seed, const SamplerOptions& options) {
  const auto draws = required_samples(epsilon, delta);
  const int workers = std::max(1, options.workers);
  const auto quota = split_quota(draws, workers);
  std::vector<std::uint64_t> hits(workers, 0);

  auto outcomes = run_workers(workers, [&](int w, WorkerOutcome& out) {
    Rng rng(derive_seed(seed, w));
    CommitteeSampler sampler(election.num_candidates(), election.committee_size());
    for (; out.drawn < quota[w]; ++out.drawn)
      if (satisfies(election, sampler.draw(rng), axiom)) ++hits[w];
  });
  for (auto& o : outcomes)
    if (o.error) std::rethrow_exception(o.error);

  EstimatorResult result;
  const auto accepted = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  result.estimate = Rational(BigInt(accepted), BigInt(draws));
  result.epsilon = epsilon;
  result.delta = delta;
  result.samples_drawn = draws;
  result.samples_accepted = accepted;
  result.seed = seed;
  return result;
}

Rational batch_prevalence(const RejectionBatch& batch, CandidateId candidate) {
  if (batch.accepted.empty()) return 0;
  const auto hits = std::count_if(batch.accepted.begin(), batch.accepted.end(),
                                  [&](const Committee& w) { return w.contains(candidate); });
  return Rational(BigInt(hits), BigInt(batch.accepted.size()));
}

Rational batch_power_fraction(const Election& election, const Axiom& axiom, const RejectionBatch& batch,
                              CandidateId candidate) {
  if (batch.accepted.empty()) return 0;
  std::uint64_t pivotal = 0;
  for (const auto& w : batch.accepted)
    if (w.contains(candidate) && !satisfies(election, w.without(candidate), axiom)) ++pivotal;
  return Rational(BigInt(pivotal), BigInt(batch.accepted.size()));
}

Rational batch_normalized_distance(const Election& election, const RejectionBatch& batch, bool* degenerate) {
  const int m = election.num_candidates();
  const int k = election.committee_size();
  const auto count = static_cast<long long>(batch.accepted.size());
  const Rational normaliser = expected_random_distance(m, k);
  if (count < 2 || normaliser == 0) {
    if (degenerate) *degenerate = true;
    return 0;
  }
  // Sum over pairs of |Wi ∩ Wj| = sum over candidates of C(hits_c, 2).
  std::vector<long long> hits(m, 0);
  for (const auto& w : batch.accepted)
    for (auto c : w) ++hits[c];
  BigInt shared = 0;
  for (auto h : hits) shared += BigInt(h) * (h - 1) / 2;
  const BigInt pairs = BigInt(count) * (count - 1) / 2;
  const Rational mean_distance = Rational(k) - Rational(shared, pairs);
  if (degenerate) *degenerate = mean_distance == 0;
  return mean_distance / normaliser;
}

EstimatorResult estimate_prevalence(const Election& election, CandidateId candidate, const Axiom& axiom,
                                    double epsilon, double delta, std::uint64_t seed,
                                    const SamplerOptions& options) {
  election.validate(CandidateSet{candidate});
  const auto r = required_samples(epsilon, delta);
  const auto batch = sample_axiom_committees(election, axiom, r, seed, options);
  EstimatorResult result;
  result.estimate = batch_prevalence(batch, candidate);
  result.epsilon = epsilon;
  result.delta = delta;
  result.samples_drawn = batch.drawn;
  result.samples_accepted = batch.accepted.size();
  result.seed = seed;
  return result;
}

EstimatorResult estimate_power_index(const Election& election, CandidateId candidate, const Axiom& axiom,
                                     std::uint64_t num_accepted, std::uint64_t seed,
                                     const SamplerOptions& options) {
  election.validate(CandidateSet{candidate});
  if (num_accepted < 1) throw std::invalid_argument("need at least one accepted committee");
  const auto batch = sample_axiom_committees(election, axiom, num_accepted, seed, options);
  EstimatorResult result;
  result.estimate = batch_power_fraction(election, axiom, batch, candidate);
  result.samples_drawn = batch.drawn;
  result.samples_accepted = batch.accepted.size();
  result.seed = seed;
  return result;
}

EstimatorResult estimate_avg_distance(const Election& election, const Axiom& axiom, std::uint64_t num_accepted,
                                      std::uint64_t seed, const SamplerOptions& options) {
  if (num_accepted < 2) throw std::invalid_argument("need at least two accepted committees");
  const auto batch = sample_axiom_committees(election, axiom, num_accepted, seed, options);
  EstimatorResult result;
  result.estimate = batch_normalized_distance(election, batch, &result.degenerate);
  result.samples_drawn = batch.drawn;
  result.samples_accepted = batch.accepted.size();
  result.seed = seed;
  return result;
}

}  // namespace propvote
