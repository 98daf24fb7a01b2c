#include "propvote/gen.hpp"

#include "propvote/sample.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace propvote {

Election gen_resampling(int num_voters, int num_candidates, int committee_size, double p, double phi,
                        std::uint64_t seed) {
  if (!(p >= 0 && p <= 1) || !(phi >= 0 && phi <= 1)) throw std::invalid_argument("p and phi must lie in [0, 1]");
  if (num_voters < 1 || num_candidates < 1) throw std::invalid_argument("need voters and candidates");
  Rng rng(derive_seed(seed, 0));

  const int central_size = static_cast<int>(std::floor(p * num_candidates));
  CommitteeSampler sampler(num_candidates, central_size);
  const auto central = sampler.draw(rng);

  std::vector<std::vector<CandidateId>> ballots(num_voters);
  for (auto& ballot : ballots) {
    for (CandidateId c = 0; c < num_candidates; ++c) {
      const bool resample = rng.bernoulli(phi);
      const bool approve = resample ? rng.bernoulli(p) : central.contains(c);
      if (approve) ballot.push_back(c);
    }
  }
  std::ostringstream name;
  name << "resampling(p=" << p << ",phi=" << phi << ",seed=" << seed << ")";
  return Election(num_candidates, std::move(ballots), committee_size, ElectionInfo{name.str(), {}, {}});
}

Election gen_euclidean(int num_voters, int num_candidates, int committee_size, double radius, int dim,
                       std::uint64_t seed) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dimension must be 1 or 2");
  if (!(radius >= 0)) throw std::invalid_argument("radius must be non-negative");
  if (num_voters < 1 || num_candidates < 1) throw std::invalid_argument("need voters and candidates");
  Rng rng(derive_seed(seed, 0));

  auto draw_points = [&](int count) {
    std::vector<double> coords(static_cast<std::size_t>(count) * dim);
    for (auto& x : coords) x = rng.uniform();
    return coords;
  };
  const auto candidates = draw_points(num_candidates);
  const auto voters = draw_points(num_voters);
  const double r2 = radius * radius;

  std::vector<std::vector<CandidateId>> ballots(num_voters);
  for (int v = 0; v < num_voters; ++v) {
    for (CandidateId c = 0; c < num_candidates; ++c) {
      double d2 = 0;
      for (int axis = 0; axis < dim; ++axis) {
        const double diff = voters[v * dim + axis] - candidates[c * dim + axis];
        d2 += diff * diff;
      }
      if (d2 <= r2) ballots[v].push_back(c);
    }
  }
  std::ostringstream name;
  name << "euclidean(r=" << radius << ",d=" << dim << ",seed=" << seed << ")";
  return Election(num_candidates, std::move(ballots), committee_size, ElectionInfo{name.str(), {}, {}});
}

}  // namespace propvote
