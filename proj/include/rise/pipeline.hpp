#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rise/dataset_io.hpp"
#include "rise/error.hpp"
#include "rise/kmeans.hpp"
#include "rise/metrics.hpp"
#include "rise/optimizer.hpp"

namespace rise {

inline constexpr int kResultSchemaVersion = 1;

// Everything needed to reproduce one run.
struct RunManifest {
  std::vector<std::filesystem::path> view_paths;
  std::optional<std::filesystem::path> labels_path;
  std::optional<std::filesystem::path> mask_path;
  double missing_rate = 0.0;
  std::size_t anchors = 0;    ///< 0: 4 * clusters, capped by the smallest view
  std::size_t embed_dim = 0;  ///< 0: clusters
  std::size_t graph_knn = kDefaultKnn;
  std::size_t clusters = 0;
  double beta = 1.0;
  Completion completion = Completion::second_order;
  AnchorStrategy anchor_strategy = AnchorStrategy::kmeans;
  std::size_t max_iters = 50;
  double rel_tol = 1e-6;
  std::uint64_t seed = 0;
  bool row_normalize = false;
  /// Views whose initial embedding is negated (rotational-mismatch probe).
  std::vector<std::size_t> flip_views;
  std::filesystem::path out_dir = ".";

  void validate() const;
};

// Raised by the pipeline; names the stage that failed.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

// Complete (or pre-gathered) views plus optional labels and mask.
struct ExperimentData {
  std::vector<Matrix> views;
  std::optional<Labels> labels;
  std::optional<Mask> mask;
};

struct PipelineOutput {
  RiseResult result;
  Mask mask;
  std::size_t anchors = 0;
  std::size_t embed_dim = 0;
  std::optional<ClusteringScores> scores;
  double anchor_ms = 0.0;
  double graph_ms = 0.0;
  double seconds = 0.0;
};

std::string_view to_string(AnchorStrategy s);
AnchorStrategy parse_anchor_strategy(std::string_view text);

ExperimentData load_experiment(const RunManifest& manifest);

/// mask -> anchors -> graphs -> normalize -> optimize -> metrics.
PipelineOutput run_pipeline(const ExperimentData& data, const RunManifest& manifest);

nlohmann::json result_to_json(const PipelineOutput& out, const RunManifest& manifest);
std::string trace_csv(const RiseResult& result);

/// Writes every run artifact under manifest.out_dir.
void write_run_outputs(const PipelineOutput& out, const RunManifest& manifest);

enum class SweepAxis { beta, anchors, embed_dim, missing_rate };
std::string_view to_string(SweepAxis a);
SweepAxis parse_sweep_axis(std::string_view text);

struct SweepRow {
  double value = 0.0;
  std::size_t repeat = 0;
  std::optional<ClusteringScores> scores;
  std::size_t iterations = 0;
  double seconds = 0.0;
  std::string status = "ok";
};

/// One cell per (value, repeat); repeat r runs with seed + r. Cells that
/// violate a module contract become warning rows. Rows come back ordered by
/// value position then repeat, regardless of scheduling.
std::vector<SweepRow> run_sweep(const ExperimentData& data, const RunManifest& manifest,
                                SweepAxis axis, const std::vector<double>& values,
                                std::size_t repeats, std::size_t threads);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct AblationRow {
  Completion completion = Completion::second_order;
  AnchorStrategy anchor_strategy = AnchorStrategy::kmeans;
  std::size_t repeat = 0;
  ClusteringScores scores;
  std::size_t iterations = 0;
  double seconds = 0.0;
};

/// {second_order, first_order} x {kmeans, random}, sharing seeds and masks.
std::vector<AblationRow> run_ablation(const ExperimentData& data, const RunManifest& manifest,
                                      std::size_t repeats, std::size_t threads);
std::string ablation_csv(const std::vector<AblationRow>& rows);

/// RISE_THREADS, 0 or unset meaning hardware concurrency.
std::size_t worker_threads_from_env();

}  // namespace rise
