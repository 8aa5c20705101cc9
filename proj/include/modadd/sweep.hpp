// Sweep orchestration: config files, grid expansion, a bounded worker
// pool over (cell, seed) runs, aggregation into report tables, CSV and
// JSONL artifacts, and SVG heatmaps.
#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "modadd/trainer.hpp"

namespace modadd {

// ------------------------------------------------------- config JSON

nlohmann::json train_config_to_json(const TrainConfig& cfg);
// Strict: unknown fields are rejected.
TrainConfig train_config_from_json(const nlohmann::json& j);

enum class ReportMode { All, BestOverWd };

struct SweepSpec {
  TrainConfig base;
  // parameter name -> values; keys must be settable TrainConfig fields.
  std::map<std::string, std::vector<nlohmann::json>> grid;
  std::vector<std::uint64_t> seeds = {1337, 1338, 1339};
  ReportMode report = ReportMode::All;
};

nlohmann::json sweep_spec_to_json(const SweepSpec& spec);
SweepSpec sweep_spec_from_json(const nlohmann::json& j);

// Apply one grid assignment to a base config. Throws on unknown keys.
TrainConfig apply_assignment(
    TrainConfig base, const std::map<std::string, nlohmann::json>& assignment);

// ------------------------------------------------------------ results

struct RunOutcome {
  std::map<std::string, nlohmann::json> assignment;
  std::uint64_t seed = 0;
  std::uint64_t cfg_hash = 0;
  bool failed = false;  // divergence
  RunRecord final_record;
};

struct ReportRow {
  std::map<std::string, nlohmann::json> assignment;
  std::map<std::string, double> mean;  // metric -> seed mean
  std::map<std::string, double> stdev; // metric -> seed std (population)
  std::size_t seeds = 0;
  bool failed = false;  // any seed diverged
};

struct ReportTable {
  std::vector<ReportRow> rows;
};

// Pure aggregation: byte-identical on identical inputs.
ReportTable aggregate_runs(const std::vector<RunOutcome>& runs);

// Best-over-WD: maximum over weight_decay cells of the seed-mean metric,
// within rows matching `filter` on all non-wd assignment keys.
double best_over_wd(const ReportTable& table, const std::string& metric,
                    const std::map<std::string, nlohmann::json>& filter = {});

// Runs every (cell x seed) job on `parallelism` workers. Each run appends
// its RunRecord stream to <out_dir>/run_<hash>_<seed>.jsonl; a per-run
// summary goes to <out_dir>/runs.csv and the aggregated table to
// <out_dir>/table.csv. Diverged runs are recorded and the sweep continues.
ReportTable run_sweep(const SweepSpec& spec, int parallelism,
                      const std::string& out_dir,
                      std::vector<RunOutcome>* outcomes = nullptr);

void write_runs_csv(const std::vector<RunOutcome>& runs,
                    const std::string& path);
void write_table_csv(const ReportTable& table, const std::string& path);

// Standalone SVG heatmap over two assignment axes (axis may also be
// "length", expanding the per-length accuracy metrics).
void emit_heatmap(const ReportTable& table, const std::string& axis_x,
                  const std::string& axis_y, const std::string& metric,
                  const std::string& out_path);

// Desk-scale presets mirroring the experiment protocol with reduced
// epoch counts: underparam, overparam-sine, overparam-relu, ood-p97,
// ood-p53, ood-bias.
SweepSpec preset(const std::string& name);

}  // namespace modadd
