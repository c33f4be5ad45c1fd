#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sfhmm {

struct GammaPrior {
  double a = 1.0;  // shape
  double b = 1.0;  // rate
};

struct BetaPrior {
  double c = 1.0;
  double d = 1.0;
};

// Flat key=value configuration. Keys match the field names below; see
// README for the list. Matrix-valued priors are given by a scalar and a
// rule and resolved against the data by resolve_priors().
struct ModelConfig {
  int ar_order = 1;
  int L = 20;

  double m0 = 0.0;            // AR prior mean, m0 * ones(r)
  double Sigma0 = 0.1;        // AR prior covariance, Sigma0 * I(r), or
  std::string Sigma0_rule = "scalar";  // "scalar" | "datavar" (pooled variance of y)
  double b0 = 0.0;            // 0 means N + b0_offset
  double b0_offset = 3.0;
  // D0 = D0_scale * (b0 - N - 1) * M with M chosen by D0_rule:
  // "ones" -> I + 11', "identity" -> I, "diffcov" -> Cov(y_{t+1} - y_t) and D0_scale 1.
  std::string D0_rule = "ones";
  double D0_scale = 0.05;

  GammaPrior gamma_c{1.0, 1.0};
  GammaPrior kappa_c{1000.0, 1.0};
  GammaPrior alpha_c{1.0, 1.0};
  GammaPrior alpha_kappa_e{1.0, 1.0};
  GammaPrior gamma_e{1.0, 1.0};
  BetaPrior rho_e{1.0, 1.0};
  double sigma2_gamma_c = 1.0;
  double sigma2_kappa_c = 100.0;

  int iterations = 6000;
  int burn_in = 1000;
  int thin = 10;
  std::uint64_t seed = 1;
  int chains = 1;
  bool sample_hypers = true;
  std::set<std::string> fixed_hypers;  // subset held at initial values
  bool share_deltas = true;

  // Hyperparameter starting values (prior means when unset).
  double init_gamma_c = -1.0, init_kappa_c = -1.0, init_alpha_c = -1.0;
  double init_alpha_kappa_e = -1.0, init_rho_e = -1.0, init_gamma_e = -1.0;

  int heldout_iterations = 100;
  int heldout_burn_in = 20;
  int heldout_thin = 5;

  void validate() const;
  bool samples(const std::string& hyper) const {
    return sample_hypers && !fixed_hypers.count(hyper);
  }
};

// Applies key=value pairs; unknown keys raise ConfigError.
void apply_config_value(ModelConfig& cfg, const std::string& key, const std::string& value);
// "key = value" lines, '#' comments, blank lines skipped.
std::vector<std::pair<std::string, std::string>> read_key_value_file(const std::filesystem::path& path);
ModelConfig load_config(const std::filesystem::path& path, ModelConfig base = {});
std::map<std::string, std::string> config_to_map(const ModelConfig& cfg);
void save_config(const std::filesystem::path& path, const ModelConfig& cfg);

// Concrete prior matrices for a dataset with N channels.
struct ResolvedPriors {
  Eigen::VectorXd m0;
  Eigen::MatrixXd Sigma0;
  double b0 = 0.0;
  Eigen::MatrixXd D0;
};

// pooled_y is used only by the data-driven rules (all events stacked).
ResolvedPriors resolve_priors(const ModelConfig& cfg, int N, const Eigen::MatrixXd& pooled_y);

}  // namespace sfhmm
