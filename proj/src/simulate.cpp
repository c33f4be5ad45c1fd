#include "sfhmm/simulate.hpp"

#include <sstream>

#include "sfhmm/config.hpp"
#include "sfhmm/csv.hpp"
#include "sfhmm/errors.hpp"

namespace sfhmm {

namespace {

double spec_double(const std::string& key, const std::string& v) {
  double out;
  if (!parse_double(v, out)) throw ConfigError("simulation key " + key + ": not a number: " + v);
  return out;
}

long spec_long(const std::string& key, const std::string& v) {
  const double d = spec_double(key, v);
  if (d != static_cast<double>(static_cast<long>(d)))
    throw ConfigError("simulation key " + key + ": not an integer: " + v);
  return static_cast<long>(d);
}

std::vector<double> spec_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto b = tok.find_first_not_of(" \t");
    auto e = tok.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("simulation key " + key + ": empty list item");
    out.push_back(spec_double(key, tok.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError("simulation key " + key + ": empty list");
  return out;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

}  // namespace

void SimulationSpec::validate() const {
  if (T < 2) throw ConfigError("simulation T must be >= 2");
  if (grid_rows < 1 || grid_cols < 1) throw ConfigError("simulation grid must be non-empty");
  if (ar_values.empty()) throw ConfigError("simulation needs at least one AR value");
  if (event_scale.empty() || event_scale.size() != event_coupling.size())
    throw ConfigError("event_scale and event_coupling must have the same non-zero length");
  for (double x : event_scale)
    if (!(x > 0.0)) throw ConfigError("event_scale entries must be positive");
  if (!(channel_self >= 0.0 && channel_self <= 1.0 && event_self >= 0.0 && event_self <= 1.0))
    throw ConfigError("self-transition probabilities must lie in [0, 1]");
  if (!(alpha_c > 0.0)) throw ConfigError("alpha_c must be positive");
}

void apply_simulation_value(SimulationSpec& s, const std::string& key, const std::string& v) {
  if (key == "T") s.T = static_cast<int>(spec_long(key, v));
  else if (key == "grid_rows") s.grid_rows = static_cast<int>(spec_long(key, v));
  else if (key == "grid_cols") s.grid_cols = static_cast<int>(spec_long(key, v));
  else if (key == "ar_values") s.ar_values = spec_list(key, v);
  else if (key == "event_scale") s.event_scale = spec_list(key, v);
  else if (key == "event_coupling") s.event_coupling = spec_list(key, v);
  else if (key == "channel_self") s.channel_self = spec_double(key, v);
  else if (key == "event_self") s.event_self = spec_double(key, v);
  else if (key == "alpha_c") s.alpha_c = spec_double(key, v);
  else if (key == "seed") s.seed = static_cast<std::uint64_t>(spec_long(key, v));
  else throw ConfigError("unknown simulation key: " + key);
}

SimulationSpec load_simulation_spec(const std::filesystem::path& path, SimulationSpec spec) {
  for (const auto& [k, v] : read_key_value_file(path)) apply_simulation_value(spec, k, v);
  spec.validate();
  return spec;
}

Eigen::MatrixXd sticky_uniform_transitions(int n, double self) {
  if (n == 1) return Eigen::MatrixXd::Ones(1, 1);
  Eigen::MatrixXd P = Eigen::MatrixXd::Constant(n, n, (1.0 - self) / (n - 1));
  P.diagonal().setConstant(self);
  return P;
}

Eigen::MatrixXi simulate_features(int N, int K, double alpha_c, Rng& rng) {
  while (true) {
    std::vector<int> counts;
    Eigen::MatrixXi F = Eigen::MatrixXi::Zero(N, K);
    for (int c = 0; c < N; ++c) {
      std::vector<char> row(counts.size(), 0);
      for (std::size_t k = 0; k < counts.size(); ++k) row[k] = rng.bernoulli(static_cast<double>(counts[k]) / (c + 1));
      const long fresh = rng.poisson(alpha_c / (c + 1));
      row.resize(row.size() + static_cast<std::size_t>(fresh), 1);
      counts.resize(row.size(), 0);
      for (std::size_t k = 0; k < row.size(); ++k) {
        counts[k] += row[k];
        if (static_cast<int>(k) < K) F(c, static_cast<Eigen::Index>(k)) = row[k];
      }
    }
    if ((F.rowwise().sum().array() > 0).all()) return F;
  }
}

Simulation simulate(const SimulationSpec& spec, Rng& rng) {
  spec.validate();
  const int N = spec.N(), K = spec.K(), L = spec.L(), T = spec.T;
  Simulation sim;
  sim.graph = std::make_shared<const DependencyGraph>(DependencyGraph::grid(spec.grid_rows, spec.grid_cols));
  SimulationTruth& tr = sim.truth;

  Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(N, N);
  for (const auto& [u, v] : sim.graph->edges()) adj(u, v) = adj(v, u) = 1.0;
  for (int l = 0; l < L; ++l) {
    Eigen::MatrixXd omega = spec.event_scale[l] * (Eigen::MatrixXd::Identity(N, N) + spec.event_coupling[l] * adj);
    Eigen::LLT<Eigen::MatrixXd> llt(omega);
    if (llt.info() != Eigen::Success)
      throw ConfigError("event state " + std::to_string(l) + " precision is not positive definite");
    Eigen::MatrixXd cov = llt.solve(Eigen::MatrixXd::Identity(N, N));
    tr.deltas.push_back(0.5 * (cov + cov.transpose()));
  }

  tr.A.resize(K, 1);
  for (int k = 0; k < K; ++k) tr.A(k, 0) = spec.ar_values[k];
  tr.channel_transitions = sticky_uniform_transitions(K, spec.channel_self);
  tr.event_transitions = sticky_uniform_transitions(L, spec.event_self);
  tr.F = simulate_features(N, K, spec.alpha_c, rng);

  tr.z.resize(T, N);
  for (int i = 0; i < N; ++i) {
    std::vector<int> act;
    for (int k = 0; k < K; ++k)
      if (tr.F(i, k)) act.push_back(k);
    Eigen::MatrixXd P(act.size(), act.size());
    for (std::size_t a = 0; a < act.size(); ++a) {
      for (std::size_t b = 0; b < act.size(); ++b)
        P(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = tr.channel_transitions(act[a], act[b]);
      P.row(static_cast<Eigen::Index>(a)) /= P.row(static_cast<Eigen::Index>(a)).sum();
    }
    Eigen::VectorXi zl = sample_markov_chain(P, T, rng);
    for (int t = 0; t < T; ++t) tr.z(t, i) = act[zl[t]];
  }
  tr.Z = sample_markov_chain(tr.event_transitions, T, rng);

  sim.data.y = Eigen::MatrixXd::Zero(T, N);
  sim.data.sample_rate_hz = 1.0;
  for (int i = 0; i < N; ++i) sim.data.channel_ids.push_back("ch" + std::to_string(i));

  ModelState s;
  s.A = tr.A;
  EventLatent ev;
  ev.z = tr.z;
  ev.Z = tr.Z;
  s.events.push_back(std::move(ev));
  s.deltas.push_back(tr.deltas);
  Dataset d = make_dataset({sim.data}, sim.graph);
  ModelConfig cfg;
  cfg.ar_order = 1;
  sample_data_given_state(d, s, cfg, rng);
  sim.data = std::move(d.events[0]);
  return sim;
}

void write_simulation(const std::filesystem::path& dir, const Simulation& sim) {
  const auto truth = dir / "truth";
  std::filesystem::create_directories(dir / "events");
  std::filesystem::create_directories(truth);
  save_event(dir / "events" / "event_0.csv", sim.data, EventFormat::csv);
  save_graph(dir / "graph.txt", *sim.graph);
  const auto& tr = sim.truth;
  write_int_matrix_csv(truth / "F.csv", tr.F);
  write_int_matrix_csv(truth / "z_0.csv", tr.z, sim.data.channel_ids);
  write_int_matrix_csv(truth / "Z_0.csv", tr.Z, {"Z"});
  write_matrix_csv(truth / "A.csv", tr.A);
  for (std::size_t l = 0; l < tr.deltas.size(); ++l)
    write_matrix_csv(truth / ("Delta_" + std::to_string(l) + ".csv"), tr.deltas[l]);
}

std::string simulation_spec_text(const SimulationSpec& s) {
  std::ostringstream o;
  o << "T = " << s.T << "\ngrid_rows = " << s.grid_rows << "\ngrid_cols = " << s.grid_cols
    << "\nar_values = " << join(s.ar_values) << "\nevent_scale = " << join(s.event_scale)
    << "\nevent_coupling = " << join(s.event_coupling) << "\nchannel_self = " << format_double(s.channel_self)
    << "\nevent_self = " << format_double(s.event_self) << "\nalpha_c = " << format_double(s.alpha_c)
    << "\nseed = " << s.seed << "\n";
  return o.str();
}

}  // namespace sfhmm
