#pragma once

#include <filesystem>
#include <memory>
#include <vector>

#include "sfhmm/config.hpp"
#include "sfhmm/model.hpp"

namespace sfhmm {

// Shape information needed to read a sample back.
struct SampleLayout {
  std::vector<int> T;  // per event
  std::vector<int> N;  // per event
  int L = 0;
  int groups = 1;
};

SampleLayout layout_of(const Dataset& data, const ModelConfig& cfg);

// Sample directory files: A.csv, hyper.csv, z_<e>.csv, Z_<e>.csv, F_<e>.csv,
// beta_<e>.csv, phi_<e>.csv, log_eta_<e>_<i>.csv, and Delta_<l>.csv (one
// covariance group) or Delta_<g>_<l>.csv.
void persist_sample(const std::filesystem::path& dir, const ModelState& s);
ModelState load_sample(const std::filesystem::path& dir, const SampleLayout& layout);

struct SampleKey {
  int chain;
  long iteration;
  bool operator==(const SampleKey&) const = default;
};

// <root>/manifest.json plus <root>/chain_<c>/sample_<iteration>/.
class ChainStore {
 public:
  // Creates (or reuses) the directory and records config, graphs and shapes.
  static ChainStore create(const std::filesystem::path& root, const ModelConfig& cfg, const Dataset& data);
  // Throws NotFoundError when no manifest exists.
  static ChainStore open(const std::filesystem::path& root);

  std::filesystem::path sample_dir(int chain, long iteration) const;
  // Writes the sample files; the index entry is added with add_index().
  void write(int chain, const ModelState& s) const;
  void add_index(const SampleKey& key);
  void write_manifest() const;

  ModelState load(const SampleKey& key) const;
  const std::vector<SampleKey>& index() const { return index_; }
  const ModelConfig& config() const { return cfg_; }
  const SampleLayout& layout() const { return layout_; }
  const std::vector<std::shared_ptr<const DependencyGraph>>& graphs() const { return graphs_; }
  const std::vector<std::vector<std::string>>& channel_ids() const { return channel_ids_; }
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  ModelConfig cfg_;
  SampleLayout layout_;
  std::vector<std::shared_ptr<const DependencyGraph>> graphs_;  // per event
  std::vector<std::vector<std::string>> channel_ids_;
  std::vector<SampleKey> index_;
};

}  // namespace sfhmm
