#pragma once
// Metrics (accuracy, all-point average precision), the four-strategy
// ablation runner and machine-readable reports.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "cmm/model.hpp"
#include "cmm/objective.hpp"
#include "cmm/synthgen.hpp"
#include "cmm/trainer.hpp"

namespace cmm {

struct SplitMetrics {
  double accuracy = 0.0;
  double ap = 0.0;
};

struct RunReport {
  Strategy strategy = Strategy::kBaselineTe;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::map<std::string, SplitMetrics> splits;
};

struct AblationTable {
  std::vector<RunReport> runs;                        // per (seed, strategy)
  std::map<std::string, SplitMetrics> means(Strategy s) const;
};

// All-point AP: rank by score descending, ties broken by original index
// ascending; AP = mean over positives of precision at that positive.
// At least one positive label is required.
double average_precision(const std::vector<double>& scores,
                         const std::vector<int>& labels);

// Per-sample inference score for ranking: softmax(S)[pedestrian] with S
// chosen by the strategy (te / tie / stie).
std::vector<double> inference_score_column(const CmmModel& model,
                                           const Dataset& data, Strategy s);

SplitMetrics evaluate(const CmmModel& model, const Dataset& data, Strategy s);

struct AblationConfig {
  std::uint64_t root_seed = 0;
  std::size_t n_seeds = 1;
  GenConfig gen;                           // non-seed knobs for standard_splits
  TrainConfig train;                       // strategy field is ignored (all four are run)
  std::vector<std::size_t> hidden = {16};  // head widths
  double tau = 1.0;
};

AblationTable run_ablation(const AblationConfig& cfg);

// Reports: JSON (full) and CSV (flat rows seed,strategy,split,accuracy,ap).
void save_report_json(const AblationTable& table, const std::string& path);
std::string report_csv(const AblationTable& table);
void save_report_csv(const AblationTable& table, const std::string& path);
AblationTable load_report_json(const std::string& path);

// Precision-recall points (one per threshold) for external plotting.
void save_pr_points_csv(const std::vector<double>& scores,
                        const std::vector<int>& labels,
                        const std::string& path);

}  // namespace cmm
