#include "sfhmm/chain.hpp"

#include <algorithm>

#include "sfhmm/errors.hpp"

namespace sfhmm {

bool is_retained(const ModelConfig& cfg, long it) {
  return it > cfg.burn_in && (it - cfg.burn_in) % cfg.thin == 0;
}

SweepStats run_chain(const Dataset& data, const ModelConfig& cfg, int chain,
                     const std::function<void(const ModelState&)>& keep, SamplerOptions opts,
                     const ProgressFn& progress) {
  cfg.validate();
  Sampler s(data, cfg, Rng::stream(cfg.seed, static_cast<std::uint64_t>(chain)), std::move(opts));
  if (cfg.iterations == 0) return s.stats();
  s.initialize();
  for (long it = 1; it <= cfg.iterations; ++it) {
    try {
      s.iterate();
    } catch (const Error& ex) {
      throw Error("chain " + std::to_string(chain) + ", iteration " + std::to_string(it) + ": " + ex.what());
    }
    if (is_retained(cfg, it)) keep(s.state());
    if (progress) progress(chain, it);
  }
  return s.stats();
}

std::vector<ModelState> run_chain_samples(const Dataset& data, const ModelConfig& cfg, int chain,
                                          SamplerOptions opts, const ProgressFn& progress) {
  std::vector<ModelState> out;
  run_chain(data, cfg, chain, [&](const ModelState& st) { out.push_back(st); }, std::move(opts), progress);
  return out;
}

ChainStore run_chains(const Dataset& data, const ModelConfig& cfg, const std::filesystem::path& out,
                      SamplerOptions opts, const ProgressFn& progress) {
  ChainStore store = ChainStore::create(out, cfg, data);
  std::vector<std::vector<SampleKey>> keys(cfg.chains);
  std::vector<std::string> errors(cfg.chains);
#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < cfg.chains; ++c) {
    try {
      run_chain(
          data, cfg, c,
          [&](const ModelState& st) {
            store.write(c, st);
            keys[c].push_back({c, st.iteration});
          },
          opts, progress);
    } catch (const std::exception& ex) {
      errors[c] = ex.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error(e);
  for (const auto& kc : keys)
    for (const auto& k : kc) store.add_index(k);
  store.write_manifest();
  return store;
}

}  // namespace sfhmm
