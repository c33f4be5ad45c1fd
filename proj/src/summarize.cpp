#include "sfhmm/summarize.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "sfhmm/csv.hpp"
#include "sfhmm/errors.hpp"

namespace sfhmm {

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weight) {
  const int rows = static_cast<int>(weight.rows()), cols = static_cast<int>(weight.cols());
  const int n = std::max(rows, cols);
  std::vector<int> out(rows, -1);
  if (n == 0) return out;
  // Shortest augmenting path form of the Hungarian method on the square
  // padded cost -weight; 1-based with a dummy column 0.
  const double inf = std::numeric_limits<double>::infinity();
  double mx = weight.size() ? weight.maxCoeff() : 0.0;
  auto cost = [&](int i, int j) { return (i < rows && j < cols) ? mx - weight(i, j) : mx; };
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  for (int j = 1; j <= n; ++j)
    if (p[j] - 1 < rows && j - 1 < cols) out[p[j] - 1] = j - 1;
  return out;
}

LabelMatching match_labels(std::span<const int> a, std::span<const int> b, int na, int nb) {
  if (a.size() != b.size()) throw PreconditionError("label sequences differ in length");
  Eigen::MatrixXd co = Eigen::MatrixXd::Zero(na, nb);
  for (std::size_t t = 0; t < a.size(); ++t) co(a[t], b[t]) += 1.0;
  LabelMatching m;
  m.map = max_weight_assignment(co);
  for (int i = 0; i < na; ++i)
    if (m.map[i] >= 0) m.overlap += static_cast<long>(co(i, m.map[i]));
  return m;
}

long matched_hamming(std::span<const int> a, std::span<const int> b, int na, int nb) {
  return static_cast<long>(a.size()) - match_labels(a, b, na, nb).overlap;
}

std::vector<int> stacked_event_states(const ModelState& s) {
  std::vector<int> out;
  for (const auto& ev : s.events) out.insert(out.end(), ev.Z.data(), ev.Z.data() + ev.Z.size());
  return out;
}

std::vector<int> stacked_channel_states(const ModelState& s) {
  std::vector<int> out;
  for (const auto& ev : s.events) out.insert(out.end(), ev.z.data(), ev.z.data() + ev.z.size());
  return out;
}

long parsing_distance(const ModelState& a, const ModelState& b, int L) {
  return matched_hamming(stacked_event_states(a), stacked_event_states(b), L, L) +
         matched_hamming(stacked_channel_states(a), stacked_channel_states(b), std::max(a.K(), 1),
                         std::max(b.K(), 1));
}

ParsingSummary summarize_samples(const std::vector<ModelState>& samples, int L, const SummaryOptions& opts) {
  if (samples.empty()) throw PreconditionError("cannot summarize an empty sample set");
  const std::size_t S = samples.size();
  ParsingSummary out;
  const std::size_t R = (opts.max_reference > 0) ? std::min<std::size_t>(S, opts.max_reference) : S;
  for (std::size_t j = 0; j < R; ++j) out.reference.push_back(j * S / R);

  std::vector<std::vector<int>> ev(S), ch(S);
  for (std::size_t s = 0; s < S; ++s) {
    ev[s] = stacked_event_states(samples[s]);
    ch[s] = stacked_channel_states(samples[s]);
  }
  out.expected_distance.assign(S, 0.0);
  const long n = static_cast<long>(S);
#pragma omp parallel for schedule(dynamic) if (opts.exec == Exec::parallel)
  for (long s = 0; s < n; ++s) {
    double total = 0.0;
    for (std::size_t ref : out.reference)
      total += static_cast<double>(matched_hamming(ev[s], ev[ref], L, L) +
                                   matched_hamming(ch[s], ch[ref], std::max(samples[s].K(), 1),
                                                   std::max(samples[ref].K(), 1)));
    out.expected_distance[s] = total / static_cast<double>(R);
  }
  out.best = static_cast<std::size_t>(
      std::min_element(out.expected_distance.begin(), out.expected_distance.end()) - out.expected_distance.begin());

  const ModelState& b = samples[out.best];
  out.event_occupancy = Eigen::VectorXd::Zero(L);
  for (int z : ev[out.best]) out.event_occupancy[z] += 1.0;
  if (!ev[out.best].empty()) out.event_occupancy /= static_cast<double>(ev[out.best].size());
  out.channel_occupancy = Eigen::VectorXd::Zero(b.K());
  for (int z : ch[out.best]) out.channel_occupancy[z] += 1.0;
  if (!ch[out.best].empty()) out.channel_occupancy /= static_cast<double>(ch[out.best].size());
  return out;
}

StoreSummary summarize_store(const ChainStore& store, const SummaryOptions& opts) {
  if (store.index().empty()) throw PreconditionError("store " + store.root().string() + " holds no samples");
  std::vector<ModelState> samples;
  samples.reserve(store.index().size());
  for (const auto& k : store.index()) samples.push_back(store.load(k));
  StoreSummary out;
  out.summary = summarize_samples(samples, store.layout().L, opts);
  out.best_key = store.index()[out.summary.best];
  out.best = std::move(samples[out.summary.best]);
  return out;
}

void write_summary(const std::filesystem::path& dir, const ChainStore& store, const StoreSummary& s) {
  std::filesystem::create_directories(dir);
  const ModelState& b = s.best;
  for (std::size_t e = 0; e < b.events.size(); ++e) {
    write_int_matrix_csv(dir / ("z_" + std::to_string(e) + ".csv"), b.events[e].z, store.channel_ids()[e]);
    write_int_matrix_csv(dir / ("Z_" + std::to_string(e) + ".csv"), b.events[e].Z, {"Z"});
  }
  write_matrix_csv(dir / "A.csv", b.A);
  const auto& ps = s.summary;
  Eigen::MatrixXd occ(ps.event_occupancy.size(), 2);
  for (Eigen::Index l = 0; l < occ.rows(); ++l) occ.row(l) << static_cast<double>(l), ps.event_occupancy[l];
  write_matrix_csv(dir / "event_occupancy.csv", occ, {"state", "fraction"});
  Eigen::MatrixXd cocc(ps.channel_occupancy.size(), 3);
  for (Eigen::Index k = 0; k < cocc.rows(); ++k)
    cocc.row(k) << static_cast<double>(k), ps.channel_occupancy[k], b.A(k, 0);
  write_matrix_csv(dir / "channel_occupancy.csv", cocc, {"state", "fraction", "a1"});

  nlohmann::json j;
  j["chain"] = s.best_key.chain;
  j["iteration"] = s.best_key.iteration;
  j["expected_distance"] = ps.expected_distance[ps.best];
  j["samples"] = ps.expected_distance.size();
  j["reference_samples"] = ps.reference.size();
  std::vector<int> occupied;
  for (std::size_t g = 0; g < b.deltas.size(); ++g)
    for (Eigen::Index l = 0; l < ps.event_occupancy.size(); ++l) {
      if (ps.event_occupancy[l] <= 0.0) continue;
      if (g == 0) occupied.push_back(static_cast<int>(l));
      const std::string name = b.deltas.size() == 1
                                   ? "Delta_" + std::to_string(l) + ".csv"
                                   : "Delta_" + std::to_string(g) + "_" + std::to_string(l) + ".csv";
      write_matrix_csv(dir / name, b.deltas[g][l]);
    }
  j["occupied_event_states"] = occupied;
  std::ofstream(dir / "summary.json") << j.dump(2) << "\n";
}

}  // namespace sfhmm
