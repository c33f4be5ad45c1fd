#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "sfhmm/bench.hpp"
#include "sfhmm/chain.hpp"
#include "sfhmm/errors.hpp"
#include "sfhmm/heldout.hpp"
#include "sfhmm/simulate.hpp"
#include "sfhmm/store.hpp"
#include "sfhmm/summarize.hpp"
#include "support.hpp"

using namespace sfhmm;
using namespace sfhmm::testing;

namespace {

Simulation small_simulation(int T, std::uint64_t seed) {
  SimulationSpec spec;
  spec.T = T;
  spec.grid_cols = 2;
  Rng rng(seed);
  return simulate(spec, rng);
}

ModelConfig short_config(int iterations) {
  ModelConfig cfg;
  cfg.L = 3;
  cfg.iterations = iterations;
  cfg.burn_in = 2;
  cfg.thin = 2;
  return cfg;
}

long brute_force_hamming(const std::vector<int>& a, const std::vector<int>& b, int na, int nb) {
  const int n = std::max(na, nb);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long best = static_cast<long>(a.size());
  do {
    long d = 0;
    for (std::size_t t = 0; t < a.size(); ++t) d += perm[a[t]] != b[t];
    best = std::min(best, d);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace

TEST_CASE("retention schedule") {
  ModelConfig cfg;
  cfg.burn_in = 10;
  cfg.thin = 5;
  CHECK_FALSE(is_retained(cfg, 10));
  CHECK(is_retained(cfg, 15));
  CHECK_FALSE(is_retained(cfg, 16));
  CHECK(is_retained(cfg, 20));
}

TEST_CASE("zero iterations give an empty store") {
  Simulation sim = small_simulation(50, 1);
  Dataset data = make_dataset({sim.data}, sim.graph);
  TempDir dir;
  ChainStore store = run_chains(data, short_config(0), dir.path() / "store");
  CHECK(store.index().empty());
  CHECK(ChainStore::open(dir.path() / "store").index().empty());
}

TEST_CASE("same seed gives identical stores") {
  Simulation sim = small_simulation(80, 2);
  Dataset data = make_dataset({sim.data}, sim.graph);
  ModelConfig cfg = short_config(12);
  cfg.chains = 2;
  TempDir dir;
  run_chains(data, cfg, dir.path() / "a");
  run_chains(data, cfg, dir.path() / "b");
  CHECK(same_tree(dir.path() / "a", dir.path() / "b"));
  cfg.seed = 2;
  run_chains(data, cfg, dir.path() / "c");
  CHECK_FALSE(same_tree(dir.path() / "a", dir.path() / "c"));
}

TEST_CASE("stored samples round-trip") {
  Simulation sim = small_simulation(80, 3);
  Dataset data = make_dataset({sim.data}, sim.graph);
  ModelConfig cfg = short_config(10);
  auto samples = run_chain_samples(data, cfg, 0);
  TempDir dir;
  ChainStore store = run_chains(data, cfg, dir.path() / "s");
  REQUIRE(store.index().size() == samples.size());
  ChainStore reopened = ChainStore::open(dir.path() / "s");
  CHECK(reopened.config().L == cfg.L);
  CHECK(*reopened.graphs()[0] == *sim.graph);
  for (std::size_t j = 0; j < samples.size(); ++j) {
    ModelState s = reopened.load(reopened.index()[j]);
    CHECK(s.A == samples[j].A);
    CHECK(s.events[0].z == samples[j].events[0].z);
    CHECK(s.events[0].Z == samples[j].events[0].Z);
    CHECK(s.events[0].phi == samples[j].events[0].phi);
    CHECK(s.deltas[0][1] == samples[j].deltas[0][1]);
    CHECK(s.hyper.kappa_c == samples[j].hyper.kappa_c);
  }
}

TEST_CASE("opening a missing store fails") {
  TempDir dir;
  CHECK_THROWS_AS(ChainStore::open(dir.path() / "nothing"), NotFoundError);
}

TEST_CASE("default simulation dimensions") {
  SimulationSpec spec;
  Rng rng(4);
  Simulation sim = simulate(spec, rng);
  CHECK(sim.data.T() == 2000);
  CHECK(sim.data.N() == 6);
  CHECK(sim.truth.F.cols() == 5);
  CHECK(sim.truth.deltas.size() == 3);
  for (int i = 0; i < 6; ++i) {
    CHECK(sim.truth.F.row(i).sum() >= 1);
    for (int t = 0; t < 2000; ++t) CHECK(sim.truth.F(i, sim.truth.z(t, i)) == 1);
  }
}

TEST_CASE("fully sticky simulation has constant states") {
  SimulationSpec spec;
  spec.T = 300;
  spec.channel_self = 1.0;
  spec.event_self = 1.0;
  Rng rng(5);
  Simulation sim = simulate(spec, rng);
  CHECK((sim.truth.Z.array() == sim.truth.Z[0]).all());
  for (int i = 0; i < 6; ++i) CHECK((sim.truth.z.col(i).array() == sim.truth.z(0, i)).all());
}

TEST_CASE("uncoupled simulation has uncorrelated innovations") {
  SimulationSpec spec;
  spec.T = 20000;
  spec.event_coupling = {0.0, 0.0, 0.0};
  Rng rng(6);
  Simulation sim = simulate(spec, rng);
  const auto& y = sim.data.y;
  double s01 = 0, s00 = 0, s11 = 0;
  for (int t = 1; t < spec.T; ++t) {
    const double e0 = y(t, 0) - sim.truth.A(sim.truth.z(t, 0), 0) * y(t - 1, 0);
    const double e1 = y(t, 1) - sim.truth.A(sim.truth.z(t, 1), 0) * y(t - 1, 1);
    s01 += e0 * e1;
    s00 += e0 * e0;
    s11 += e1 * e1;
  }
  CHECK(std::abs(s01 / std::sqrt(s00 * s11)) < 4.0 / std::sqrt(spec.T));
}

TEST_CASE("hungarian assignment matches brute force") {
  Rng rng(7);
  for (int rep = 0; rep < 100; ++rep) {
    const int na = 1 + rng.uniform_int(5), nb = 1 + rng.uniform_int(5);
    std::vector<int> a(30), b(30);
    for (int t = 0; t < 30; ++t) {
      a[t] = rng.uniform_int(na);
      b[t] = rng.uniform() < 0.6 ? a[t] % nb : rng.uniform_int(nb);
    }
    CHECK(matched_hamming(a, b, na, nb) == brute_force_hamming(a, b, na, nb));
  }
}

TEST_CASE("summary picks the central sample") {
  Simulation sim = small_simulation(60, 8);
  Dataset data = make_dataset({sim.data}, sim.graph);
  ModelConfig cfg = short_config(10);
  auto samples = run_chain_samples(data, cfg, 0);
  REQUIRE(!samples.empty());
  auto one = summarize_samples({samples[0]}, cfg.L);
  CHECK(one.expected_distance[0] == 0.0);

  // A relabelled copy is at distance 0.
  ModelState perm = samples[0];
  for (int t = 0; t < perm.events[0].Z.size(); ++t) perm.events[0].Z[t] = (perm.events[0].Z[t] + 1) % cfg.L;
  CHECK(parsing_distance(samples[0], perm, cfg.L) == 0);

  // Planted ensemble: copies of one parsing plus perturbed variants; the
  // brute-force minimizer of the expected distance must be selected.
  std::vector<ModelState> ens;
  for (int j = 0; j < 7; ++j) {
    ModelState s = samples[0];
    for (int t = 0; t < s.events[0].Z.size(); ++t)
      if ((t + j) % 9 < j % 4) s.events[0].Z[t] = (s.events[0].Z[t] + j) % cfg.L;
    ens.push_back(s);
  }
  auto sum = summarize_samples(ens, cfg.L, SummaryOptions{0, Exec::serial});
  std::vector<double> brute(ens.size(), 0.0);
  for (std::size_t a = 0; a < ens.size(); ++a)
    for (std::size_t b = 0; b < ens.size(); ++b) brute[a] += parsing_distance(ens[a], ens[b], cfg.L);
  const auto best = std::min_element(brute.begin(), brute.end()) - brute.begin();
  CHECK(brute[sum.best] == brute[best]);
  auto par = summarize_samples(ens, cfg.L, SummaryOptions{0, Exec::parallel});
  CHECK(par.best == sum.best);
  CHECK_THROWS_AS(summarize_samples({}, cfg.L), PreconditionError);
}

TEST_CASE("held-out likelihood of a single-state model is the Gaussian AR likelihood") {
  Simulation sim = small_simulation(40, 9);
  ModelConfig cfg;
  cfg.L = 1;
  cfg.heldout_iterations = 4;
  cfg.heldout_burn_in = 0;
  cfg.heldout_thin = 1;
  auto g = std::make_shared<const DependencyGraph>(DependencyGraph::edgeless(1));
  EventData train, test;
  train.y = sim.data.y.col(0);
  test.y = sim.data.y.block(0, 1, 40, 1);
  Dataset data = make_dataset({train}, g);
  Sampler s(data, cfg, Rng(3));
  s.initialize();
  ModelState st = s.state();
  REQUIRE(st.K() == 1);
  st.A(0, 0) = 0.4;
  st.deltas[0][0] = Eigen::MatrixXd::Constant(1, 1, 0.8);
  auto res = heldout_loglik({st}, cfg, test, g, 1, Exec::serial);
  double direct = 0.0;
  for (int t = 1; t < 40; ++t) {
    const double e = test.y(t, 0) - 0.4 * test.y(t - 1, 0);
    direct += -0.5 * std::log(2 * M_PI * 0.8) - 0.5 * e * e / 0.8;
  }
  CHECK(res.mean == doctest::Approx(direct).epsilon(1e-10));
  CHECK(res.timepoints == 39);

  EventData wide;
  wide.y = Eigen::MatrixXd::Zero(40, 2);
  CHECK_THROWS_AS(heldout_loglik({st}, cfg, wide, g, 1), ConfigError);
}

TEST_CASE("benchmark graphs and scaling ratios") {
  CHECK(bench_graph(8, BenchMode::dense, 5).edges().size() == 28);
  CHECK(bench_graph(8, BenchMode::sparse, 5) == DependencyGraph::grid(2, 4));
  CHECK(bench_graph(8, BenchMode::sparse, 2) == DependencyGraph::path(8));
  CHECK_THROWS_AS(bench_graph(7, BenchMode::sparse, 5), ConfigError);
  std::vector<BenchRow> rows = {{8, 5, 1.0, 1.0}, {16, 5, 2.0, 2.0}, {24, 5, 3.0, 3.0}};
  auto r = doubling_ratios(rows);
  REQUIRE(r.size() == 2);
  CHECK(r[0] == doctest::Approx(2.0));
  CHECK(r[1] == doctest::Approx(2.0));
  BenchOptions opts;
  opts.T = 50;
  opts.repeats = 1;
  auto sparse = bench_likelihoods({6}, BenchMode::sparse, opts);
  REQUIRE(sparse.size() == 1);
  CHECK(sparse[0].serial_ms > 0.0);
}
