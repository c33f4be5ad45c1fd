#include "sfhmm/config.hpp"

#include <fstream>
#include <sstream>

#include "sfhmm/csv.hpp"
#include "sfhmm/errors.hpp"

namespace sfhmm {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  double out;
  if (!parse_double(v, out)) throw ConfigError("config key " + key + ": not a number: " + v);
  return out;
}

long to_long(const std::string& key, const std::string& v) {
  double d = to_double(key, v);
  if (d != static_cast<double>(static_cast<long>(d)))
    throw ConfigError("config key " + key + ": not an integer: " + v);
  return static_cast<long>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config key " + key + ": not a boolean: " + v);
}

const std::set<std::string> kHyperNames = {"gamma_c", "kappa_c", "alpha_c",
                                           "alpha_kappa_e", "rho_e", "gamma_e"};

}  // namespace

void ModelConfig::validate() const {
  if (ar_order < 1) throw ConfigError("ar_order must be >= 1");
  if (L < 1) throw ConfigError("L must be >= 1");
  if (!(Sigma0 > 0.0)) throw ConfigError("Sigma0 must be positive");
  if (Sigma0_rule != "scalar" && Sigma0_rule != "datavar")
    throw ConfigError("Sigma0_rule must be scalar or datavar");
  if (D0_rule != "ones" && D0_rule != "identity" && D0_rule != "diffcov")
    throw ConfigError("D0_rule must be ones, identity or diffcov");
  if (!(D0_scale > 0.0)) throw ConfigError("D0_scale must be positive");
  for (const GammaPrior* p : {&gamma_c, &kappa_c, &alpha_c, &alpha_kappa_e, &gamma_e})
    if (!(p->a > 0.0 && p->b > 0.0)) throw ConfigError("gamma prior parameters must be positive");
  if (!(rho_e.c > 0.0 && rho_e.d > 0.0)) throw ConfigError("beta prior parameters must be positive");
  if (!(sigma2_gamma_c > 0.0 && sigma2_kappa_c > 0.0))
    throw ConfigError("proposal variances must be positive");
  if (iterations < 0) throw ConfigError("iterations must be >= 0");
  if (iterations > 0 && !(burn_in >= 0 && burn_in < iterations))
    throw ConfigError("burn_in must satisfy 0 <= burn_in < iterations");
  if (thin < 1) throw ConfigError("thin must be >= 1");
  if (chains < 1) throw ConfigError("chains must be >= 1");
  for (const auto& h : fixed_hypers)
    if (!kHyperNames.count(h)) throw ConfigError("unknown hyperparameter in fix list: " + h);
  if (heldout_iterations < 1 || heldout_burn_in < 0 || heldout_burn_in >= heldout_iterations ||
      heldout_thin < 1)
    throw ConfigError("invalid held-out chain controls");
}

void apply_config_value(ModelConfig& c, const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  auto gamma_pair = [&](const std::string& base, GammaPrior& p) {
    if (key == base + "_a") return (p.a = to_double(key, v)), true;
    if (key == base + "_b") return (p.b = to_double(key, v)), true;
    return false;
  };
  if (key == "ar_order") c.ar_order = static_cast<int>(to_long(key, v));
  else if (key == "L") c.L = static_cast<int>(to_long(key, v));
  else if (key == "m0") c.m0 = to_double(key, v);
  else if (key == "Sigma0") c.Sigma0 = to_double(key, v);
  else if (key == "Sigma0_rule") c.Sigma0_rule = v;
  else if (key == "b0") c.b0 = to_double(key, v);
  else if (key == "b0_offset") c.b0_offset = to_double(key, v);
  else if (key == "D0_rule") c.D0_rule = v;
  else if (key == "D0_scale") c.D0_scale = to_double(key, v);
  else if (gamma_pair("gamma_c", c.gamma_c) || gamma_pair("kappa_c", c.kappa_c) ||
           gamma_pair("alpha_c", c.alpha_c) || gamma_pair("alpha_kappa_e", c.alpha_kappa_e) ||
           gamma_pair("gamma_e", c.gamma_e)) {
  } else if (key == "rho_e_c") c.rho_e.c = to_double(key, v);
  else if (key == "rho_e_d") c.rho_e.d = to_double(key, v);
  else if (key == "sigma2_gamma_c") c.sigma2_gamma_c = to_double(key, v);
  else if (key == "sigma2_kappa_c") c.sigma2_kappa_c = to_double(key, v);
  else if (key == "iterations") c.iterations = static_cast<int>(to_long(key, v));
  else if (key == "burn_in") c.burn_in = static_cast<int>(to_long(key, v));
  else if (key == "thin") c.thin = static_cast<int>(to_long(key, v));
  else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_long(key, v));
  else if (key == "chains") c.chains = static_cast<int>(to_long(key, v));
  else if (key == "sample_hypers") c.sample_hypers = to_bool(key, v);
  else if (key == "share_deltas") c.share_deltas = to_bool(key, v);
  else if (key == "fix") {
    c.fixed_hypers.clear();
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!trim(item).empty()) c.fixed_hypers.insert(trim(item));
  } else if (key == "init_gamma_c") c.init_gamma_c = to_double(key, v);
  else if (key == "init_kappa_c") c.init_kappa_c = to_double(key, v);
  else if (key == "init_alpha_c") c.init_alpha_c = to_double(key, v);
  else if (key == "init_alpha_kappa_e") c.init_alpha_kappa_e = to_double(key, v);
  else if (key == "init_rho_e") c.init_rho_e = to_double(key, v);
  else if (key == "init_gamma_e") c.init_gamma_e = to_double(key, v);
  else if (key == "heldout_iterations") c.heldout_iterations = static_cast<int>(to_long(key, v));
  else if (key == "heldout_burn_in") c.heldout_burn_in = static_cast<int>(to_long(key, v));
  else if (key == "heldout_thin") c.heldout_thin = static_cast<int>(to_long(key, v));
  else throw ConfigError("unknown config key: " + key);
}

std::vector<std::pair<std::string, std::string>> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ": expected key = value at line " + std::to_string(lineno));
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

ModelConfig load_config(const std::filesystem::path& path, ModelConfig cfg) {
  for (const auto& [k, v] : read_key_value_file(path)) apply_config_value(cfg, k, v);
  return cfg;
}

std::map<std::string, std::string> config_to_map(const ModelConfig& c) {
  std::map<std::string, std::string> m;
  auto d = [](double v) { return format_double(v); };
  m["ar_order"] = std::to_string(c.ar_order);
  m["L"] = std::to_string(c.L);
  m["m0"] = d(c.m0);
  m["Sigma0"] = d(c.Sigma0);
  m["Sigma0_rule"] = c.Sigma0_rule;
  m["b0"] = d(c.b0);
  m["b0_offset"] = d(c.b0_offset);
  m["D0_rule"] = c.D0_rule;
  m["D0_scale"] = d(c.D0_scale);
  auto gp = [&](const std::string& n, const GammaPrior& p) {
    m[n + "_a"] = d(p.a);
    m[n + "_b"] = d(p.b);
  };
  gp("gamma_c", c.gamma_c);
  gp("kappa_c", c.kappa_c);
  gp("alpha_c", c.alpha_c);
  gp("alpha_kappa_e", c.alpha_kappa_e);
  gp("gamma_e", c.gamma_e);
  m["rho_e_c"] = d(c.rho_e.c);
  m["rho_e_d"] = d(c.rho_e.d);
  m["sigma2_gamma_c"] = d(c.sigma2_gamma_c);
  m["sigma2_kappa_c"] = d(c.sigma2_kappa_c);
  m["iterations"] = std::to_string(c.iterations);
  m["burn_in"] = std::to_string(c.burn_in);
  m["thin"] = std::to_string(c.thin);
  m["seed"] = std::to_string(c.seed);
  m["chains"] = std::to_string(c.chains);
  m["sample_hypers"] = c.sample_hypers ? "true" : "false";
  m["share_deltas"] = c.share_deltas ? "true" : "false";
  std::string fix;
  for (const auto& h : c.fixed_hypers) fix += (fix.empty() ? "" : ",") + h;
  m["fix"] = fix;
  m["init_gamma_c"] = d(c.init_gamma_c);
  m["init_kappa_c"] = d(c.init_kappa_c);
  m["init_alpha_c"] = d(c.init_alpha_c);
  m["init_alpha_kappa_e"] = d(c.init_alpha_kappa_e);
  m["init_rho_e"] = d(c.init_rho_e);
  m["init_gamma_e"] = d(c.init_gamma_e);
  m["heldout_iterations"] = std::to_string(c.heldout_iterations);
  m["heldout_burn_in"] = std::to_string(c.heldout_burn_in);
  m["heldout_thin"] = std::to_string(c.heldout_thin);
  return m;
}

void save_config(const std::filesystem::path& path, const ModelConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& [k, v] : config_to_map(cfg)) out << k << " = " << v << '\n';
}

ResolvedPriors resolve_priors(const ModelConfig& cfg, int N, const Eigen::MatrixXd& pooled_y) {
  cfg.validate();
  ResolvedPriors p;
  const int r = cfg.ar_order;
  p.m0 = Eigen::VectorXd::Constant(r, cfg.m0);
  double s0 = cfg.Sigma0;
  if (cfg.Sigma0_rule == "datavar") {
    if (pooled_y.size() < 2) throw ConfigError("Sigma0_rule=datavar needs data");
    const double mean = pooled_y.mean();
    s0 = (pooled_y.array() - mean).square().sum() / static_cast<double>(pooled_y.size() - 1);
  }
  p.Sigma0 = s0 * Eigen::MatrixXd::Identity(r, r);
  p.b0 = cfg.b0 > 0.0 ? cfg.b0 : N + cfg.b0_offset;
  if (!(p.b0 > N + 1)) throw ConfigError("b0 must exceed N + 1");
  const double dof = p.b0 - N - 1;
  if (cfg.D0_rule == "ones") {
    p.D0 = cfg.D0_scale * dof *
           (Eigen::MatrixXd::Identity(N, N) + Eigen::MatrixXd::Ones(N, N));
  } else if (cfg.D0_rule == "identity") {
    p.D0 = cfg.D0_scale * dof * Eigen::MatrixXd::Identity(N, N);
  } else {
    if (pooled_y.rows() < 3 || pooled_y.cols() != N)
      throw ConfigError("D0_rule=diffcov needs data with N columns");
    Eigen::MatrixXd d = pooled_y.bottomRows(pooled_y.rows() - 1) - pooled_y.topRows(pooled_y.rows() - 1);
    Eigen::RowVectorXd mu = d.colwise().mean();
    Eigen::MatrixXd c = d.rowwise() - mu;
    p.D0 = dof * (c.transpose() * c) / static_cast<double>(d.rows() - 1);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(p.D0);
  if (llt.info() != Eigen::Success) throw ConfigError("resolved D0 is not positive definite");
  return p;
}

}  // namespace sfhmm
