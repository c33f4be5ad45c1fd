#include <doctest.h>

#include <fstream>
#include <set>

#include "sfhmm/config.hpp"
#include "sfhmm/csv.hpp"
#include "sfhmm/errors.hpp"
#include "sfhmm/event_data.hpp"
#include "sfhmm/graph.hpp"
#include "sfhmm/log.hpp"
#include "sfhmm/rng.hpp"
#include "support.hpp"

using namespace sfhmm;
using sfhmm::testing::TempDir;

namespace {

void write_text(const std::filesystem::path& p, const std::string& s) { std::ofstream(p) << s; }

template <typename E, typename F>
std::string error_message(F&& f) {
  try {
    f();
  } catch (const E& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a = Rng::stream(5, 0), b = Rng::stream(5, 0), c = Rng::stream(5, 1);
  const double x = a.normal();
  CHECK(x == b.normal());
  CHECK(x != c.normal());
}

TEST_CASE("dirichlet zero parameters give exact zeros") {
  Rng rng(3);
  Eigen::VectorXd alpha(3);
  alpha << 1.0, 0.0, 2.0;
  Eigen::VectorXd d = rng.dirichlet(alpha);
  CHECK(d[1] == 0.0);
  CHECK(d.sum() == doctest::Approx(1.0));
  Eigen::VectorXd ld = rng.log_dirichlet(alpha);
  CHECK(std::isinf(ld[1]));
}

TEST_CASE("log_gamma stays finite for tiny shapes") {
  Rng rng(4);
  for (int i = 0; i < 100; ++i) CHECK(std::isfinite(rng.log_gamma(1e-4)));
}

TEST_CASE("gamma and beta draws have the right means") {
  Rng rng(11);
  std::vector<double> g, b;
  for (int i = 0; i < 50000; ++i) {
    g.push_back(rng.gamma(3.0, 2.0));
    b.push_back(rng.beta(2.0, 5.0));
  }
  auto mg = testing::moments(g), mb = testing::moments(b);
  CHECK(std::abs(mg.mean - 1.5) < 4 * mg.se);
  CHECK(std::abs(mb.mean - 2.0 / 7.0) < 4 * mb.se);
}

TEST_CASE("categorical rejects all-zero weights") {
  Rng rng(1);
  std::vector<double> w{0.0, 0.0};
  CHECK_THROWS_AS(rng.categorical(w), Error);
}

TEST_CASE("warning sink captures warnings") {
  std::vector<std::string> seen;
  set_warning_sink([&](const std::string& m) { seen.push_back(m); });
  const long before = warning_count();
  warn("hello");
  set_warning_sink(nullptr);
  CHECK(seen.size() == 1);
  CHECK(warning_count() == before + 1);
}

TEST_CASE("csv reader detects header and reports bad tokens") {
  TempDir dir("csv");
  const auto p = dir.path() / "a.csv";
  write_text(p, "x,y\n1,2\n3,4\n");
  auto t = read_csv(p);
  CHECK(t.header == std::vector<std::string>{"x", "y"});
  CHECK(t.rows.size() == 2);

  write_text(p, "1,2\n3,abc\n");
  auto msg = error_message<FormatError>([&] { read_csv(p); });
  CHECK(msg.find("row 2") != std::string::npos);
  CHECK(msg.find("column 2") != std::string::npos);

  write_text(p, "1,2\n3\n");
  msg = error_message<FormatError>([&] { read_csv(p); });
  CHECK(msg.find("ragged row 2") != std::string::npos);

  write_text(p, "1,2\nnan,4\n");
  CHECK_THROWS_AS(read_csv(p), DataError);
}

TEST_CASE("format_double round-trips exactly") {
  Rng rng(9);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.normal() * std::pow(10.0, rng.uniform_int(40) - 20);
    double y;
    REQUIRE(parse_double(format_double(x), y));
    CHECK(x == y);
  }
}

TEST_CASE("event files round-trip in both formats") {
  TempDir dir("ev");
  Rng rng(2);
  EventData ev;
  ev.y.resize(7, 3);
  for (Eigen::Index k = 0; k < ev.y.size(); ++k) ev.y.data()[k] = rng.normal();
  ev.channel_ids = {"a", "bb", "c"};
  ev.sample_rate_hz = 256.0;
  save_event(dir.path() / "e.bin", ev, EventFormat::binary);
  save_event(dir.path() / "e.csv", ev, EventFormat::csv);
  EventData b = load_event(dir.path() / "e.bin");
  EventData c = load_event(dir.path() / "e.csv");
  CHECK(b.y == ev.y);
  CHECK(c.y == ev.y);
  CHECK(b.channel_ids == ev.channel_ids);
  CHECK(c.channel_ids == ev.channel_ids);
  CHECK(b.sample_rate_hz == 256.0);
}

TEST_CASE("load_event errors") {
  TempDir dir("everr");
  CHECK_THROWS_AS(load_event(dir.path() / "missing.csv"), NotFoundError);
  write_text(dir.path() / "short.csv", "1,2\n");
  CHECK_THROWS_AS(load_event(dir.path() / "short.csv", 1), PreconditionError);
  write_text(dir.path() / "bad.bin", "XXXX");
  CHECK_THROWS_AS(load_event(dir.path() / "bad.bin"), FormatError);
}

TEST_CASE("preprocess decimates, filters and scales") {
  EventData raw;
  raw.sample_rate_hz = 1000.0;
  raw.y.resize(100, 2);
  Rng rng(5);
  for (Eigen::Index k = 0; k < raw.y.size(); ++k) raw.y.data()[k] = rng.normal();
  raw.channel_ids = {"a", "b"};
  EventData out = preprocess(raw, 250.0, 0.9);
  CHECK(out.T() == 25);
  CHECK(out.sample_rate_hz == 250.0);
  CHECK(abs_quantile(out.y, 0.9) == doctest::Approx(10.0));
  CHECK_THROWS_AS(preprocess(raw, 300.0, 0.9), ConfigError);

  EventData flat = raw;
  flat.y.setZero();
  const long before = warning_count();
  set_warning_sink([](const std::string&) {});
  EventData f = preprocess(flat, 500.0, 0.9);
  set_warning_sink(nullptr);
  CHECK(warning_count() == before + 1);
  CHECK(f.y.isZero());
}

TEST_CASE("moving average keeps constants and smooths") {
  Eigen::MatrixXd y = Eigen::MatrixXd::Constant(10, 2, 3.0);
  CHECK(moving_average(y, 4).isApprox(y));
  Eigen::MatrixXd step = Eigen::MatrixXd::Zero(9, 1);
  step(4, 0) = 3.0;
  Eigen::MatrixXd m = moving_average(step, 3);
  CHECK(m(3, 0) == doctest::Approx(1.0));
  CHECK(m(4, 0) == doctest::Approx(1.0));
  CHECK(m(5, 0) == doctest::Approx(1.0));
  CHECK(m(6, 0) == 0.0);
}

TEST_CASE("abs quantile is type 7") {
  Eigen::MatrixXd y(4, 1);
  y << -1, 2, -3, 4;
  CHECK(abs_quantile(y, 0.5) == doctest::Approx(2.5));
}

TEST_CASE("graph validation errors") {
  CHECK_THROWS_AS(DependencyGraph(3, {{0, 3}}), FormatError);
  CHECK_THROWS_AS(DependencyGraph(3, {{1, 1}}), FormatError);
  CHECK_THROWS_AS(DependencyGraph(3, {{0, 1}, {1, 0}}), FormatError);
}

TEST_CASE("four-cycle is not decomposable and a chord is suggested") {
  std::vector<std::pair<int, int>> e{{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  try {
    DependencyGraph g(4, e);
    FAIL("expected NotDecomposableError");
  } catch (const NotDecomposableError& err) {
    auto [u, v] = err.suggested_fill();
    const bool chord = (std::min(u, v) == 0 && std::max(u, v) == 2) || (std::min(u, v) == 1 && std::max(u, v) == 3);
    CHECK(chord);
    e.emplace_back(u, v);
    CHECK_NOTHROW(DependencyGraph(4, e));
  }
}

TEST_CASE("2x3 king grid has two 4-cliques") {
  DependencyGraph g = DependencyGraph::grid(2, 3);
  std::set<std::set<int>> cliques;
  for (const auto& c : g.cliques()) cliques.insert(std::set<int>(c.begin(), c.end()));
  CHECK(cliques == std::set<std::set<int>>{{0, 1, 3, 4}, {1, 2, 4, 5}});
  REQUIRE(g.separators().size() == 1);
  CHECK(std::set<int>(g.separators()[0].begin(), g.separators()[0].end()) == std::set<int>{1, 4});
  CHECK(g.max_clique_size() == 4);
}

TEST_CASE("running intersection holds on all test graphs") {
  for (const auto& g : testing::test_graphs()) CHECK(has_running_intersection(g));
}

TEST_CASE("graph files round-trip and accept comments") {
  TempDir dir("graph");
  write_text(dir.path() / "g.txt", "# grid\n0 1 # edge\n\n1 2\n");
  DependencyGraph g = build_graph(dir.path() / "g.txt", 3);
  CHECK(g == DependencyGraph::path(3));
  save_graph(dir.path() / "h.txt", DependencyGraph::grid(2, 4));
  CHECK(build_graph(dir.path() / "h.txt", 8) == DependencyGraph::grid(2, 4));
  write_text(dir.path() / "bad.txt", "0 x\n");
  CHECK_THROWS_AS(build_graph(dir.path() / "bad.txt", 3), FormatError);
}

TEST_CASE("config keys parse, validate and round-trip") {
  TempDir dir("cfg");
  write_text(dir.path() / "c.txt", "L = 7\nkappa_c_a = 20 # comment\nfix = gamma_c, rho_e\nshare_deltas = false\n");
  ModelConfig c = load_config(dir.path() / "c.txt");
  CHECK(c.L == 7);
  CHECK(c.kappa_c.a == 20.0);
  CHECK(c.fixed_hypers == std::set<std::string>{"gamma_c", "rho_e"});
  CHECK_FALSE(c.share_deltas);
  CHECK_FALSE(c.samples("gamma_c"));
  CHECK(c.samples("kappa_c"));
  save_config(dir.path() / "d.txt", c);
  CHECK(config_to_map(load_config(dir.path() / "d.txt")) == config_to_map(c));

  ModelConfig bad;
  CHECK_THROWS_AS(apply_config_value(bad, "no_such_key", "1"), ConfigError);
  CHECK_THROWS_AS(apply_config_value(bad, "L", "abc"), ConfigError);
  bad.burn_in = bad.iterations;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("default priors follow the simulation table") {
  ModelConfig c;
  ResolvedPriors p = resolve_priors(c, 6, Eigen::MatrixXd());
  CHECK(p.b0 == 9.0);
  CHECK(p.D0(0, 0) == doctest::Approx(0.05 * 2.0 * 2.0));
  CHECK(p.D0(0, 1) == doctest::Approx(0.05 * 2.0));
  CHECK(p.Sigma0(0, 0) == doctest::Approx(0.1));
  CHECK(p.m0.isZero());
}
