#include <doctest.h>

#include "sfhmm/errors.hpp"
#include "sfhmm/hmm.hpp"
#include "support.hpp"

using namespace sfhmm;
using namespace sfhmm::testing;

TEST_CASE("forward marginal matches enumeration") {
  Rng rng(101);
  for (int rep = 0; rep < 200; ++rep) {
    const int K = 1 + rng.uniform_int(4), T = 1 + rng.uniform_int(6);
    HmmProblem p = random_hmm(K, T, rng);
    const double oracle = hmm_enumerate_marginal(p);
    CHECK(std::abs(forward_marginal(p) - oracle) <= 1e-9 * std::max(1.0, std::abs(oracle)));
  }
}

TEST_CASE("forward marginal with excluded states") {
  Rng rng(7);
  HmmProblem p = random_hmm(3, 4, rng);
  p.log_lik(2, 0) = -INFINITY;
  CHECK(forward_marginal(p) == doctest::Approx(hmm_enumerate_marginal(p)).epsilon(1e-12));
  p.log_lik.row(1).setConstant(-INFINITY);
  CHECK(forward_marginal(p) == -INFINITY);
}

TEST_CASE("sampled paths follow the enumerated posterior") {
  Rng rng(202);
  HmmProblem p = random_hmm(2, 4, rng);
  p.log_lik *= 0.3;  // keep every path reasonably likely
  const auto post = hmm_enumerate_posterior(p);
  const long draws = 100000;
  std::vector<long> counts(post.size(), 0);
  for (long d = 0; d < draws; ++d) ++counts[encode_path(sample_states(p, rng), 2)];
  CHECK(max_cell_z(counts, post, draws) < 4.0);
}

TEST_CASE("sampler reports the time of zero mass") {
  Rng rng(3);
  HmmProblem p = random_hmm(2, 5, rng);
  p.log_lik.row(3).setConstant(-INFINITY);
  try {
    sample_states(p, rng);
    FAIL("expected SamplingError");
  } catch (const SamplingError& e) {
    CHECK(e.time_index() == 3);
  }
}

TEST_CASE("invalid problems are rejected") {
  Rng rng(1);
  HmmProblem p = random_hmm(2, 3, rng);
  p.Pi(0, 0) += 0.5;
  CHECK_THROWS_AS(validate(p), PreconditionError);
}
