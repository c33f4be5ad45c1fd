#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "sfhmm/config.hpp"
#include "sfhmm/model.hpp"
#include "sfhmm/store.hpp"

namespace sfhmm {

// Iterations are numbered from 1; iteration it is retained when
// it > burn_in and (it - burn_in) is a multiple of thin.
bool is_retained(const ModelConfig& cfg, long iteration);

using ProgressFn = std::function<void(int chain, long iteration)>;

// Runs one chain and hands every retained state to `keep`. Chain c uses the
// random stream derived from (cfg.seed, c).
SweepStats run_chain(const Dataset& data, const ModelConfig& cfg, int chain,
                     const std::function<void(const ModelState&)>& keep, SamplerOptions opts = {},
                     const ProgressFn& progress = {});

// In-memory convenience wrapper.
std::vector<ModelState> run_chain_samples(const Dataset& data, const ModelConfig& cfg, int chain,
                                          SamplerOptions opts = {}, const ProgressFn& progress = {});

// cfg.chains chains in parallel, each writing its samples under the store;
// the manifest index is merged in (chain, iteration) order at the end.
ChainStore run_chains(const Dataset& data, const ModelConfig& cfg, const std::filesystem::path& out,
                      SamplerOptions opts = {}, const ProgressFn& progress = {});

}  // namespace sfhmm
