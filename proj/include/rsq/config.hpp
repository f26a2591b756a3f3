#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rsq/disorder.hpp"
#include "rsq/model.hpp"
#include "rsq/scaling.hpp"

namespace rsq {

/// Everything one ensemble run needs. Echoed verbatim into meta.json so a run
/// is reproducible from its outputs alone.
struct RunConfig {
    ModelKind model = ModelKind::heisenberg(1);
    std::uint32_t sites = 50000;
    std::uint32_t configurations = 2000;
    DisorderSpec disorder; ///< master seed lives here

    std::vector<std::uint32_t> block_sizes; ///< empty + blocks_auto -> geometric ladder
    bool blocks_auto = true;
    std::uint32_t block_anchor = 0;
    std::uint32_t block_anchors = 1;

    std::vector<double> q_values; ///< empty -> default_q_grid(model)

    double kappa_left = 1.0;
    double kappa_right = 1.0;

    AnalyzeOptions analysis;

    unsigned workers = 0;               ///< 0 -> hardware concurrency
    std::uint64_t checkpoint_every = 0; ///< configurations between checkpoints; 0 disables
    std::string out_dir = ".";
};

using KeyValueMap = std::map<std::string, std::string>;

/// Plain "key = value" file; '#' comments and blank lines ignored.
KeyValueMap read_key_value_file(const std::string& path);

/// Applies configuration keys onto cfg; unknown keys raise
/// std::invalid_argument. Recognized keys: model, two_s, sites, configs,
/// seed, workers, out, checkpoint.every, disorder.alpha,
/// disorder.support_max, blocks.sizes, blocks.auto, blocks.anchor,
/// blocks.anchors, q.values, q.min, q.max, q.count, sdrg.kappa_left,
/// sdrg.kappa_right, scaling.qwin_min, scaling.qwin_max, scaling.fit_lmin,
/// scaling.fit_lmax, scaling.dgamma_policy, scaling.weighted,
/// scaling.scan_pad.
void apply_keys(RunConfig& cfg, const KeyValueMap& keys);

/// Fills in the q grid and block ladder defaults and validates the whole
/// config. Must be called before running.
void finalize(RunConfig& cfg);

/// Canonical JSON echo of a finalized config (meta.json "config" object).
std::string config_echo(const RunConfig& cfg);

/// Hash over the result-affecting keys only (workers, out_dir and analysis
/// options excluded); guards checkpoint compatibility.
std::uint64_t config_hash(const RunConfig& cfg);

} // namespace rsq
