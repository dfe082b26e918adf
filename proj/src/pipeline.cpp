#include "rise/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <sstream>
#include <thread>

#include "rise/graph.hpp"
#include "rise/random.hpp"

namespace rise {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <typename F>
auto run_stage(const std::string& name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::string fmt(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

std::size_t sample_count(const ExperimentData& data) {
  if (data.mask) return data.mask->n();
  if (data.views.empty()) throw ArgumentError("no views loaded");
  const std::size_t n = data.views.front().rows();
  for (const auto& v : data.views) {
    if (v.rows() != n) throw ArgumentError("views differ in row count and no mask was given");
  }
  return n;
}

// Runs fn(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

std::size_t as_count(double value, const char* what) {
  if (!(value >= 1.0) || value != std::floor(value) || value > 1e12) {
    throw ArgumentError(std::string(what) + " must be a positive integer, got " + fmt(value));
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

void RunManifest::validate() const {
  if (clusters < 1) throw ArgumentError("--clusters must be >= 1");
  if (!(missing_rate >= 0.0 && missing_rate < 1.0)) throw ArgumentError("--missing-rate must be in [0, 1)");
  if (graph_knn < 1) throw ArgumentError("--graph-knn must be >= 1");
  if (!(beta >= 0.0)) throw ArgumentError("--beta must be >= 0");
  if (!(rel_tol > 0.0)) throw ArgumentError("--tol must be > 0");
}

std::string_view to_string(AnchorStrategy s) { return s == AnchorStrategy::kmeans ? "kmeans" : "random"; }

AnchorStrategy parse_anchor_strategy(std::string_view text) {
  if (text == "kmeans") return AnchorStrategy::kmeans;
  if (text == "random") return AnchorStrategy::random;
  throw ArgumentError("unknown anchor strategy '" + std::string(text) + "'");
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::beta: return "beta";
    case SweepAxis::anchors: return "anchors";
    case SweepAxis::embed_dim: return "embed_dim";
    case SweepAxis::missing_rate: return "missing_rate";
  }
  return "?";
}

SweepAxis parse_sweep_axis(std::string_view text) {
  if (text == "beta") return SweepAxis::beta;
  if (text == "anchors") return SweepAxis::anchors;
  if (text == "embed_dim" || text == "embed-dim") return SweepAxis::embed_dim;
  if (text == "missing_rate" || text == "missing-rate") return SweepAxis::missing_rate;
  throw ArgumentError("unknown sweep axis '" + std::string(text) + "'");
}

ExperimentData load_experiment(const RunManifest& manifest) {
  return run_stage("load", [&] {
    if (manifest.view_paths.empty()) throw ArgumentError("at least one --view is required");
    ExperimentData data;
    for (const auto& p : manifest.view_paths) data.views.push_back(read_matrix(p));
    if (manifest.labels_path) data.labels = read_labels(*manifest.labels_path);
    if (manifest.mask_path) data.mask = read_mask(*manifest.mask_path);
    return data;
  });
}

PipelineOutput run_pipeline(const ExperimentData& data, const RunManifest& manifest) {
  const auto t0 = Clock::now();
  run_stage("config", [&] { manifest.validate(); });
  run_stage("config", [&] {
    for (const auto v : manifest.flip_views) {
      if (v >= data.views.size()) throw ArgumentError("--flip-view index out of range");
    }
  });
  PipelineOutput out;

  const MultiViewDataset ds = run_stage("mask", [&] {
    const std::size_t n = sample_count(data);
    if (data.labels && data.labels->size() != n) {
      throw ArgumentError("label file has " + std::to_string(data.labels->size()) + " entries for " +
                          std::to_string(n) + " samples");
    }
    out.mask = data.mask ? *data.mask
                         : generate_mask(n, data.views.size(), manifest.missing_rate,
                                         derive_seed(manifest.seed, 1));
    return apply_mask(data.views, out.mask, data.labels);
  });

  std::size_t smallest = ds.n_total;
  for (const auto& v : ds.views) smallest = std::min(smallest, v.rows());
  out.anchors = manifest.anchors ? manifest.anchors : std::min(4 * manifest.clusters, smallest);
  out.embed_dim = manifest.embed_dim ? manifest.embed_dim : manifest.clusters;

  const auto t_anchor = Clock::now();
  const std::vector<Matrix> anchors = run_stage("anchors", [&] {
    // One anchor seed for all views, so identical views get identical graphs.
    std::vector<Matrix> a;
    for (std::size_t i = 0; i < ds.views.size(); ++i) {
      a.push_back(select_anchors(ds.views[i], manifest.anchor_strategy, out.anchors,
                                 derive_seed(manifest.seed, 100)));
    }
    return a;
  });
  out.anchor_ms = ms_since(t_anchor);

  const auto t_graph = Clock::now();
  const std::vector<BipartiteGraph> graphs = run_stage("graph", [&] {
    std::vector<BipartiteGraph> g;
    for (std::size_t i = 0; i < ds.views.size(); ++i) {
      g.push_back(normalize(build_bipartite(ds.views[i], anchors[i], manifest.graph_knn)));
    }
    return g;
  });
  out.graph_ms = ms_since(t_graph);

  out.result = run_stage("optimize", [&] {
    RiseConfig cfg;
    cfg.beta = manifest.beta;
    cfg.embed_dim = out.embed_dim;
    cfg.max_iters = manifest.max_iters;
    cfg.rel_tol = manifest.rel_tol;
    cfg.seed = manifest.seed;
    cfg.completion = manifest.completion;
    cfg.row_normalize = manifest.row_normalize;
    std::optional<std::vector<Matrix>> start;
    if (!manifest.flip_views.empty()) {
      start = init_embeddings(graphs, cfg.embed_dim);
      for (const auto v : manifest.flip_views) {
        for (double& x : (*start)[v].data()) x = -x;
      }
    }
    return run_rise(ds, graphs, cfg, manifest.clusters, std::move(start));
  });

  if (ds.labels) {
    out.scores = run_stage("metrics", [&] { return evaluate(out.result.labels, *ds.labels); });
  }
  out.seconds = ms_since(t0) / 1000.0;
  return out;
}

nlohmann::json result_to_json(const PipelineOutput& out, const RunManifest& manifest) {
  using nlohmann::json;
  json views = json::array();
  for (const auto& p : manifest.view_paths) views.push_back(p.string());
  json flips = json::array();
  for (const auto v : manifest.flip_views) flips.push_back(v);

  json config = {
      {"views", views},
      {"labels", manifest.labels_path ? json(manifest.labels_path->string()) : json(nullptr)},
      {"mask", manifest.mask_path ? json(manifest.mask_path->string()) : json(nullptr)},
      {"missing_rate", manifest.missing_rate},
      {"anchors", out.anchors},
      {"embed_dim", out.embed_dim},
      {"graph_knn", manifest.graph_knn},
      {"clusters", manifest.clusters},
      {"beta", manifest.beta},
      {"completion", std::string(to_string(manifest.completion))},
      {"anchor_strategy", std::string(to_string(manifest.anchor_strategy))},
      {"max_iters", manifest.max_iters},
      {"rel_tol", manifest.rel_tol},
      {"seed", manifest.seed},
      {"row_normalize", manifest.row_normalize},
      {"flip_views", flips},
  };

  json sizes = json::array();
  for (std::size_t v = 0; v < out.mask.views(); ++v) {
    std::size_t count = 0;
    for (std::size_t r = 0; r < out.mask.n(); ++r) count += out.mask.available(r, v);
    sizes.push_back(count);
  }

  const auto& r = out.result;
  json j = {
      {"schema_version", kResultSchemaVersion},
      {"config", config},
      {"data", {{"n", out.mask.n()}, {"views", out.mask.views()}, {"view_sizes", sizes},
                {"complete_samples", out.mask.complete_rows()}}},
      {"optimization", {{"iterations", r.iterations}, {"converged", r.converged},
                        {"objective_trace", r.objective_trace},
                        {"final_objective", r.objective_trace.empty() ? 0.0 : r.objective_trace.back()}}},
      {"metrics", out.scores ? json{{"acc", out.scores->acc}, {"nmi", out.scores->nmi},
                                    {"purity", out.scores->purity}}
                             : json(nullptr)},
      {"timings", {{"anchor_ms", out.anchor_ms}, {"graph_ms", out.graph_ms},
                   {"init_ms", r.timings.init_ms}, {"iteration_ms", r.timings.iteration_ms},
                   {"kmeans_ms", r.timings.kmeans_ms}, {"optimize_ms", r.timings.total_ms},
                   {"seconds", out.seconds}}},
  };
  return j;
}

std::string trace_csv(const RiseResult& result) {
  std::string s = "iteration,objective,elapsed_ms\n";
  for (std::size_t i = 0; i < result.objective_trace.size(); ++i) {
    s += std::to_string(i) + ',' + fmt(result.objective_trace[i]) + ',' +
         fmt(result.trace_elapsed_ms[i]) + '\n';
  }
  return s;
}

void write_run_outputs(const PipelineOutput& out, const RunManifest& manifest) {
  run_stage("write", [&] {
    std::filesystem::create_directories(manifest.out_dir);
    const std::string json_text = result_to_json(out, manifest).dump(2) + "\n";
    write_file_bytes({reinterpret_cast<const std::uint8_t*>(json_text.data()), json_text.size()},
                     manifest.out_dir / "result.json");
    const std::string trace = trace_csv(out.result);
    write_file_bytes({reinterpret_cast<const std::uint8_t*>(trace.data()), trace.size()},
                     manifest.out_dir / "trace.csv");
    write_matrix(out.result.consensus, manifest.out_dir / "consensus.rmat");
    write_labels(out.result.labels, manifest.out_dir / "labels.txt");
  });
}

std::vector<SweepRow> run_sweep(const ExperimentData& data, const RunManifest& manifest,
                                SweepAxis axis, const std::vector<double>& values,
                                std::size_t repeats, std::size_t threads) {
  if (!data.labels) throw ArgumentError("sweep needs ground-truth labels");
  std::vector<SweepRow> rows(values.size() * repeats);
  parallel_for(rows.size(), threads, [&](std::size_t cell) {
    SweepRow& row = rows[cell];
    row.value = values[cell / repeats];
    row.repeat = cell % repeats;
    try {
      RunManifest m = manifest;
      m.seed = manifest.seed + row.repeat;
      ExperimentData local;
      const ExperimentData* src = &data;
      switch (axis) {
        case SweepAxis::beta:
          m.beta = row.value;
          if (!(row.value >= 0.0)) throw ArgumentError("beta must be >= 0");
          break;
        case SweepAxis::anchors:
          m.anchors = as_count(row.value, "anchors");
          if (m.anchors < m.clusters) {
            throw ArgumentError("anchors below the cluster count " + std::to_string(m.clusters));
          }
          break;
        case SweepAxis::embed_dim:
          m.embed_dim = as_count(row.value, "embed_dim");
          break;
        case SweepAxis::missing_rate:
          m.missing_rate = row.value;
          m.mask_path.reset();
          if (data.mask) {
            local = data;
            local.mask.reset();
            src = &local;
          }
          break;
      }
      const PipelineOutput out = run_pipeline(*src, m);
      row.scores = out.scores;
      row.iterations = out.result.iterations;
      row.seconds = out.seconds;
    } catch (const std::exception& e) {
      row.status = std::string("skipped: ") + e.what();
    }
  });
  return rows;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char ch : s) {
    if (ch == '"') q += '"';
    q += ch == '\n' ? ' ' : ch;
  }
  return q + '"';
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string s = "value,repeat,acc,nmi,purity,iterations,seconds,status\n";
  for (const auto& r : rows) {
    s += fmt(r.value) + ',' + std::to_string(r.repeat) + ',';
    if (r.scores) {
      s += fmt(r.scores->acc) + ',' + fmt(r.scores->nmi) + ',' + fmt(r.scores->purity) + ',' +
           std::to_string(r.iterations) + ',' + fmt(r.seconds) + ',';
    } else {
      s += ",,,,,";
    }
    s += csv_field(r.status) + '\n';
  }
  return s;
}

std::vector<AblationRow> run_ablation(const ExperimentData& data, const RunManifest& manifest,
                                      std::size_t repeats, std::size_t threads) {
  if (!data.labels) throw ArgumentError("ablation needs ground-truth labels");
  constexpr Completion completions[] = {Completion::second_order, Completion::first_order};
  constexpr AnchorStrategy strategies[] = {AnchorStrategy::kmeans, AnchorStrategy::random};
  std::vector<AblationRow> rows(4 * repeats);
  std::vector<std::exception_ptr> errors(rows.size());
  parallel_for(rows.size(), threads, [&](std::size_t cell) {
    AblationRow& row = rows[cell];
    row.repeat = cell / 4;
    row.completion = completions[(cell % 4) / 2];
    row.anchor_strategy = strategies[cell % 2];
    try {
      RunManifest m = manifest;
      m.seed = manifest.seed + row.repeat;
      m.completion = row.completion;
      m.anchor_strategy = row.anchor_strategy;
      const PipelineOutput out = run_pipeline(data, m);
      row.scores = *out.scores;
      row.iterations = out.result.iterations;
      row.seconds = out.seconds;
    } catch (...) {
      errors[cell] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::string s = "completion,anchor_strategy,repeat,acc,nmi,purity,iterations,seconds\n";
  for (const auto& r : rows) {
    s += std::string(to_string(r.completion)) + ',' + std::string(to_string(r.anchor_strategy)) + ',' +
         std::to_string(r.repeat) + ',' + fmt(r.scores.acc) + ',' + fmt(r.scores.nmi) + ',' +
         fmt(r.scores.purity) + ',' + std::to_string(r.iterations) + ',' + fmt(r.seconds) + '\n';
  }
  return s;
}

std::size_t worker_threads_from_env() {
  const char* env = std::getenv("RISE_THREADS");
  std::size_t n = 0;
  if (env != nullptr) {
    const std::string_view s(env);
    std::from_chars(s.data(), s.data() + s.size(), n);
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

}  // namespace rise
