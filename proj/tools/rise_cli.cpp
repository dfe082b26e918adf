// Command-line front end: synth, mask, run, sweep, ablate, eval.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rise/datagen.hpp"
#include "rise/dataset_io.hpp"
#include "rise/masking.hpp"
#include "rise/metrics.hpp"
#include "rise/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

struct ManifestFlags {
  std::vector<std::string> views;
  std::string labels;
  std::string mask;
  std::string completion = "second_order";
  std::string anchor_strategy = "kmeans";
  rise::RunManifest manifest;
};

void add_manifest_flags(CLI::App* cmd, ManifestFlags& f) {
  auto& m = f.manifest;
  cmd->add_option("--view", f.views, "Feature matrix per view (RMAT or CSV, rows = samples)")
      ->required();
  cmd->add_option("--labels", f.labels, "Ground-truth labels, one integer per line");
  cmd->add_option("--mask", f.mask, "Availability mask CSV (n rows x v columns of 0/1)");
  cmd->add_option("--missing-rate", m.missing_rate, "Fraction p of incomplete samples when no mask is given");
  cmd->add_option("--anchors", m.anchors, "Anchors per view m (0: 4 x clusters)");
  cmd->add_option("--embed-dim", m.embed_dim, "Embedding dimension k (0: clusters)");
  cmd->add_option("--graph-knn", m.graph_knn, "Nearest anchors per sample");
  cmd->add_option("--clusters", m.clusters, "Number of clusters c")->required();
  cmd->add_option("--beta", m.beta, "Graph-term weight beta");
  cmd->add_option("--completion", f.completion, "second_order | first_order");
  cmd->add_option("--anchor-strategy", f.anchor_strategy, "kmeans | random");
  cmd->add_option("--max-iters", m.max_iters, "Iteration cap");
  cmd->add_option("--tol", m.rel_tol, "Relative objective change for convergence");
  cmd->add_option("--seed", m.seed, "Seed for masks, anchors and k-means");
  cmd->add_flag("--row-normalize", m.row_normalize, "Unit-normalize rows of Y before k-means");
  cmd->add_option("--flip-view", m.flip_views, "Negate the initial embedding of this view (repeatable)");
  cmd->add_option("--out", m.out_dir, "Output directory");
}

rise::RunManifest finish_manifest(const ManifestFlags& f) {
  rise::RunManifest m = f.manifest;
  m.view_paths.assign(f.views.begin(), f.views.end());
  if (!f.labels.empty()) m.labels_path = f.labels;
  if (!f.mask.empty()) m.mask_path = f.mask;
  m.completion = rise::parse_completion(f.completion);
  m.anchor_strategy = rise::parse_anchor_strategy(f.anchor_strategy);
  return m;
}

double parse_number(const std::string& s) {
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw rise::ArgumentError("not a number: '" + s + "'");
  }
  return x;
}

// Accepts plain values and start:step:stop ranges (inclusive).
std::vector<double> expand_values(const std::vector<std::string>& tokens) {
  std::vector<double> out;
  for (const auto& t : tokens) {
    const auto c1 = t.find(':');
    if (c1 == std::string::npos) {
      out.push_back(parse_number(t));
      continue;
    }
    const auto c2 = t.find(':', c1 + 1);
    if (c2 == std::string::npos) throw rise::ArgumentError("range must be start:step:stop, got '" + t + "'");
    const double start = parse_number(t.substr(0, c1));
    const double step = parse_number(t.substr(c1 + 1, c2 - c1 - 1));
    const double stop = parse_number(t.substr(c2 + 1));
    if (!(step > 0.0)) throw rise::ArgumentError("range step must be positive");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    for (long i = 0; i <= count; ++i) {
      // Round to 12 significant decimals so 0.1:0.1:0.9 yields 0.3, not 0.30000000000000004.
      const double v = start + static_cast<double>(i) * step;
      out.push_back(std::round(v * 1e12) / 1e12);
    }
  }
  return out;
}

void write_text(const std::string& text, const fs::path& path) {
  rise::write_file_bytes({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}, path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anchor-graph spectral clustering for multi-view data with missing views"};
  app.require_subcommand(1);

  // synth
  rise::BlobConfig blobs;
  std::string synth_out = "data";
  auto* synth = app.add_subcommand("synth", "Generate seeded multi-view Gaussian blobs");
  synth->add_option("--n", blobs.n, "Samples");
  synth->add_option("--clusters", blobs.clusters, "Clusters");
  synth->add_option("--views", blobs.views, "Views");
  synth->add_option("--latent-dim", blobs.latent_dim, "Latent dimension");
  synth->add_option("--view-dims", blobs.view_dims, "Feature count per view")->delimiter(',');
  synth->add_option("--spread", blobs.cluster_spread, "Within-cluster standard deviation");
  synth->add_option("--center-scale", blobs.center_scale, "Scale of the cluster centers");
  synth->add_option("--noise", blobs.noise_sigma, "Per-view noise standard deviation");
  synth->add_option("--seed", blobs.seed, "Seed");
  synth->add_option("--out", synth_out, "Output directory");

  // mask
  std::size_t mask_n = 0, mask_views = 0;
  double mask_rate = 0.0;
  std::uint64_t mask_seed = 0;
  std::string mask_out = "mask.csv";
  auto* mask = app.add_subcommand("mask", "Simulate an incomplete-view availability mask");
  mask->add_option("--n", mask_n, "Samples")->required();
  mask->add_option("--views", mask_views, "Views")->required();
  mask->add_option("--missing-rate", mask_rate, "Fraction p of samples that lose views");
  mask->add_option("--seed", mask_seed, "Seed");
  mask->add_option("--out", mask_out, "Output CSV path");

  ManifestFlags run_flags, sweep_flags, ablate_flags;
  auto* run = app.add_subcommand("run", "Run the full clustering pipeline once");
  add_manifest_flags(run, run_flags);

  std::string axis = "beta";
  std::vector<std::string> values;
  std::size_t repeats = 10;
  auto* sweep = app.add_subcommand("sweep", "Repeat the pipeline across one parameter axis");
  add_manifest_flags(sweep, sweep_flags);
  sweep->add_option("--axis", axis, "beta | anchors | embed_dim | missing_rate");
  sweep->add_option("--values", values, "Values or start:step:stop ranges")->delimiter(',')->required();
  sweep->add_option("--repeats", repeats, "Seeded repeats per value");

  std::size_t ablate_repeats = 10;
  auto* ablate = app.add_subcommand("ablate", "Compare completion and anchor strategies");
  add_manifest_flags(ablate, ablate_flags);
  ablate->add_option("--repeats", ablate_repeats, "Seeded repeats");

  std::string pred_path, truth_path;
  auto* eval = app.add_subcommand("eval", "Score predicted labels against ground truth");
  eval->add_option("--pred", pred_path, "Predicted labels")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", truth_path, "True labels")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      const auto [ds, labels] = rise::generate_blobs(blobs);
      fs::create_directories(synth_out);
      for (std::size_t v = 0; v < ds.views.size(); ++v) {
        rise::write_matrix(ds.views[v], fs::path(synth_out) / ("view" + std::to_string(v) + ".rmat"));
      }
      rise::write_labels(labels, fs::path(synth_out) / "labels.txt");
      std::cout << "wrote " << ds.views.size() << " views and labels for " << blobs.n
                << " samples to " << synth_out << "\n";
    } else if (*mask) {
      const auto m = rise::generate_mask(mask_n, mask_views, mask_rate, mask_seed);
      rise::write_mask(m, mask_out);
      std::cout << "wrote mask (" << m.complete_rows() << " of " << m.n() << " samples complete) to "
                << mask_out << "\n";
    } else if (*run) {
      const auto manifest = finish_manifest(run_flags);
      const auto data = rise::load_experiment(manifest);
      const auto out = rise::run_pipeline(data, manifest);
      rise::write_run_outputs(out, manifest);
      std::cout << rise::result_to_json(out, manifest)["metrics"].dump() << "\n";
    } else if (*sweep) {
      const auto manifest = finish_manifest(sweep_flags);
      const auto data = rise::load_experiment(manifest);
      const auto rows = rise::run_sweep(data, manifest, rise::parse_sweep_axis(axis),
                                        expand_values(values), repeats,
                                        rise::worker_threads_from_env());
      fs::create_directories(manifest.out_dir);
      for (const auto& r : rows) {
        if (r.status != "ok") std::cerr << "warning: value " << r.value << " repeat " << r.repeat << ": " << r.status << "\n";
      }
      write_text(rise::sweep_csv(rows), manifest.out_dir / "sweep.csv");
      std::cout << "wrote " << rows.size() << " rows to " << (manifest.out_dir / "sweep.csv").string() << "\n";
    } else if (*ablate) {
      const auto manifest = finish_manifest(ablate_flags);
      const auto data = rise::load_experiment(manifest);
      const auto rows = rise::run_ablation(data, manifest, ablate_repeats, rise::worker_threads_from_env());
      fs::create_directories(manifest.out_dir);
      write_text(rise::ablation_csv(rows), manifest.out_dir / "ablation.csv");
      std::cout << "wrote " << rows.size() << " rows to " << (manifest.out_dir / "ablation.csv").string() << "\n";
    } else if (*eval) {
      const auto s = rise::evaluate(rise::read_labels(pred_path), rise::read_labels(truth_path));
      nlohmann::json j = {{"acc", s.acc}, {"nmi", s.nmi}, {"purity", s.purity}};
      std::cout << j.dump() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
