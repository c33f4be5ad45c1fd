#include "sfhmm/store.hpp"

#include <fstream>

#include <json.hpp>

#include "sfhmm/csv.hpp"
#include "sfhmm/errors.hpp"

namespace sfhmm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kHyperHeader = {"gamma_c", "kappa_c", "alpha_c", "alpha_e",
                                               "kappa_e", "gamma_e", "rho_e",   "iteration"};

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw IoError("cannot create directory " + p.string() + ": " + ec.message());
}

Eigen::MatrixXd read_checked(const fs::path& p) {
  if (!fs::exists(p)) throw NotFoundError("missing sample file " + p.string());
  return read_matrix_csv(p);
}

Eigen::MatrixXi read_int_checked(const fs::path& p) {
  if (!fs::exists(p)) throw NotFoundError("missing sample file " + p.string());
  return read_int_matrix_csv(p);
}

std::string delta_name(int groups, int g, int l) {
  return groups == 1 ? "Delta_" + std::to_string(l) + ".csv"
                     : "Delta_" + std::to_string(g) + "_" + std::to_string(l) + ".csv";
}

}  // namespace

SampleLayout layout_of(const Dataset& data, const ModelConfig& cfg) {
  SampleLayout l;
  for (const auto& e : data.events) {
    l.T.push_back(e.T());
    l.N.push_back(e.N());
  }
  l.L = cfg.L;
  l.groups = cfg.share_deltas ? 1 : static_cast<int>(data.events.size());
  return l;
}

void persist_sample(const fs::path& dir, const ModelState& s) {
  ensure_dir(dir);
  write_matrix_csv(dir / "A.csv", s.A);
  const auto& h = s.hyper;
  Eigen::MatrixXd hv(1, 8);
  hv << h.gamma_c, h.kappa_c, h.alpha_c, h.alpha_e, h.kappa_e, h.gamma_e, h.rho_e,
      static_cast<double>(s.iteration);
  write_matrix_csv(dir / "hyper.csv", hv, kHyperHeader);
  for (std::size_t e = 0; e < s.events.size(); ++e) {
    const auto& ev = s.events[e];
    const std::string tag = std::to_string(e);
    write_int_matrix_csv(dir / ("z_" + tag + ".csv"), ev.z);
    write_int_matrix_csv(dir / ("Z_" + tag + ".csv"), Eigen::MatrixXi(ev.Z));
    write_int_matrix_csv(dir / ("F_" + tag + ".csv"), ev.F);
    write_matrix_csv(dir / ("beta_" + tag + ".csv"), Eigen::MatrixXd(ev.beta));
    write_matrix_csv(dir / ("phi_" + tag + ".csv"), ev.phi);
    for (std::size_t i = 0; i < ev.log_eta.size(); ++i)
      write_matrix_csv(dir / ("log_eta_" + tag + "_" + std::to_string(i) + ".csv"), ev.log_eta[i]);
  }
  const int groups = static_cast<int>(s.deltas.size());
  for (int g = 0; g < groups; ++g)
    for (std::size_t l = 0; l < s.deltas[g].size(); ++l)
      write_matrix_csv(dir / delta_name(groups, g, static_cast<int>(l)), s.deltas[g][l]);
}

ModelState load_sample(const fs::path& dir, const SampleLayout& layout) {
  if (!fs::exists(dir) || fs::is_empty(dir)) throw NotFoundError("no sample stored at " + dir.string());
  ModelState s;
  s.A = read_checked(dir / "A.csv");
  Eigen::MatrixXd hv = read_checked(dir / "hyper.csv");
  if (hv.rows() != 1 || hv.cols() != 8) throw FormatError(dir.string() + "/hyper.csv: expected 8 values");
  s.hyper.gamma_c = hv(0, 0);
  s.hyper.kappa_c = hv(0, 1);
  s.hyper.alpha_c = hv(0, 2);
  s.hyper.alpha_e = hv(0, 3);
  s.hyper.kappa_e = hv(0, 4);
  s.hyper.gamma_e = hv(0, 5);
  s.hyper.rho_e = hv(0, 6);
  s.iteration = static_cast<long>(hv(0, 7));
  for (std::size_t e = 0; e < layout.T.size(); ++e) {
    EventLatent ev;
    const std::string tag = std::to_string(e);
    ev.z = read_int_checked(dir / ("z_" + tag + ".csv"));
    Eigen::MatrixXi Z = read_int_checked(dir / ("Z_" + tag + ".csv"));
    ev.Z = Eigen::Map<Eigen::VectorXi>(Z.data(), Z.size());
    ev.F = read_int_checked(dir / ("F_" + tag + ".csv"));
    Eigen::MatrixXd b = read_checked(dir / ("beta_" + tag + ".csv"));
    ev.beta = Eigen::Map<Eigen::VectorXd>(b.data(), b.size());
    ev.phi = read_checked(dir / ("phi_" + tag + ".csv"));
    for (int i = 0; i < layout.N[e]; ++i)
      ev.log_eta.push_back(read_checked(dir / ("log_eta_" + tag + "_" + std::to_string(i) + ".csv")));
    if (ev.z.rows() != layout.T[e] || ev.z.cols() != layout.N[e] || ev.F.cols() != s.A.rows())
      throw FormatError(dir.string() + ": event " + tag + " has inconsistent dimensions");
    s.events.push_back(std::move(ev));
  }
  s.deltas.resize(layout.groups);
  for (int g = 0; g < layout.groups; ++g)
    for (int l = 0; l < layout.L; ++l) s.deltas[g].push_back(read_checked(dir / delta_name(layout.groups, g, l)));
  return s;
}

ChainStore ChainStore::create(const fs::path& root, const ModelConfig& cfg, const Dataset& data) {
  ensure_dir(root);
  ChainStore st;
  st.root_ = root;
  st.cfg_ = cfg;
  st.layout_ = layout_of(data, cfg);
  st.graphs_ = data.graphs;
  for (const auto& e : data.events) st.channel_ids_.push_back(e.channel_ids);
  return st;
}

ChainStore ChainStore::open(const fs::path& root) {
  const fs::path mf = root / "manifest.json";
  if (!fs::exists(mf)) throw NotFoundError("no manifest.json in " + root.string());
  std::ifstream in(mf);
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw FormatError(mf.string() + ": " + ex.what());
  }
  ChainStore st;
  st.root_ = root;
  for (auto& [k, v] : j.at("config").items()) apply_config_value(st.cfg_, k, v.get<std::string>());
  st.layout_.L = j.at("L").get<int>();
  st.layout_.groups = j.at("groups").get<int>();
  for (const auto& ev : j.at("events")) {
    st.layout_.T.push_back(ev.at("T").get<int>());
    st.layout_.N.push_back(ev.at("N").get<int>());
    st.channel_ids_.push_back(ev.at("channel_ids").get<std::vector<std::string>>());
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : ev.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    st.graphs_.push_back(std::make_shared<const DependencyGraph>(ev.at("N").get<int>(), edges));
  }
  for (const auto& s : j.at("samples")) st.index_.push_back({s.at("chain").get<int>(), s.at("iteration").get<long>()});
  return st;
}

fs::path ChainStore::sample_dir(int chain, long iteration) const {
  return root_ / ("chain_" + std::to_string(chain)) / ("sample_" + std::to_string(iteration));
}

void ChainStore::write(int chain, const ModelState& s) const { persist_sample(sample_dir(chain, s.iteration), s); }

void ChainStore::add_index(const SampleKey& key) { index_.push_back(key); }

void ChainStore::write_manifest() const {
  json j;
  j["config"] = json::object();
  for (const auto& [k, v] : config_to_map(cfg_)) j["config"][k] = v;
  j["L"] = layout_.L;
  j["groups"] = layout_.groups;
  j["events"] = json::array();
  for (std::size_t e = 0; e < layout_.T.size(); ++e) {
    json ev;
    ev["T"] = layout_.T[e];
    ev["N"] = layout_.N[e];
    ev["channel_ids"] = channel_ids_[e];
    ev["edges"] = json::array();
    for (auto [u, v] : graphs_[e]->edges()) ev["edges"].push_back({u, v});
    j["events"].push_back(ev);
  }
  j["samples"] = json::array();
  for (const auto& k : index_) j["samples"].push_back({{"chain", k.chain}, {"iteration", k.iteration}});
  std::ofstream out(root_ / "manifest.json");
  if (!out) throw IoError("cannot write " + (root_ / "manifest.json").string());
  out << j.dump(1) << '\n';
}

ModelState ChainStore::load(const SampleKey& key) const {
  ModelState s = load_sample(sample_dir(key.chain, key.iteration), layout_);
  s.iteration = key.iteration;
  return s;
}

}  // namespace sfhmm
