#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rsq/config.hpp"
#include "rsq/entropy.hpp"
#include "rsq/scaling.hpp"

namespace rsq {

struct EnsembleResult {
    EntropyTable table;
    std::uint64_t singlet_events = 0;
    std::uint64_t trio_events = 0;
    std::uint64_t configurations = 0;
    std::uint64_t resumed_configurations = 0; ///< >0 when a checkpoint was loaded
    double wall_seconds = 0.0;

    double trio_fraction() const;
};

/// Runs the full ensemble in memory. Deterministic for a fixed config
/// regardless of worker count: configurations are processed in fixed chunks
/// and partial accumulators merged strictly in chunk order.
///
/// stop_after_configurations > 0 halts the run after that many configurations
/// have been merged (rounded up to a chunk boundary) and, when
/// cfg.checkpoint_every > 0, leaves a checkpoint to resume from.
EnsembleResult run_ensemble(const RunConfig& cfg, std::uint64_t stop_after_configurations = 0);

/// run_ensemble plus entropy.csv and meta.json under cfg.out_dir.
EnsembleResult simulate_to_files(const RunConfig& cfg, std::uint64_t stop_after_configurations = 0);

/// Wall-time estimate from timing a single configuration.
double estimate_runtime_seconds(const RunConfig& cfg);

void write_meta_json(const std::string& path, const RunConfig& cfg, const EnsembleResult& result);

struct AnalyzeRequest {
    std::string entropy_csv;
    std::string meta_json;    ///< "" -> sibling meta.json when present
    std::string fit_json_out; ///< "" -> sibling fit.json
    std::optional<ModelKind> model; ///< overrides the meta.json model
    AnalyzeOptions opts;            ///< NaN/0 fields fall back to meta echo, then defaults
};

/// Reads entropy.csv (+ meta.json), runs the scaling analysis, writes fit.json.
ScalingFit analyze_files(const AnalyzeRequest& req);

void write_fit_json(const std::string& path, const ScalingFit& fit);

/// Accepts fit.json paths or directories containing one.
std::vector<SweepRow> read_fit_rows(const std::vector<std::string>& fit_paths_or_dirs);

/// Writes "c_eff,q_ext,delta_q_ext,model" rows and returns the fitted k of
/// q_ext = 1 - k/c_eff.
double write_sweep_csv(const std::string& out_csv, const std::vector<SweepRow>& rows);

} // namespace rsq
