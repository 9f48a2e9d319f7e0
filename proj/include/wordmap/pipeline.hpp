#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wordmap/common.hpp"
#include "wordmap/embedding.hpp"
#include "wordmap/eval.hpp"
#include "wordmap/im.hpp"
#include "wordmap/mapping.hpp"
#include "wordmap/spectral.hpp"
#include "wordmap/synth.hpp"
#include "wordmap/transform.hpp"

namespace wordmap {

enum class InitMethod { kSpectral, kRandom };

inline std::string to_string(InitMethod init) {
  return init == InitMethod::kSpectral ? "spectral" : "random";
}

inline InitMethod init_method_from_string(std::string_view s) {
  if (s == "spectral") return InitMethod::kSpectral;
  if (s == "random") return InitMethod::kRandom;
  throw Error("unknown init method: " + std::string(s));
}

struct PipelineConfig {
  std::string source_path;
  std::string target_path;
  std::string gold_path;  // optional; enables the evaluation stage
  std::string output_dir;

  Index working_set_size = 2000;
  std::vector<Index> knn_grid = {10, 20, 30, 40, 50};
  Bandwidth bandwidth = Bandwidth::auto_tuned();
  NormalizeMode normalize_mode = NormalizeMode::kNone;
  InitMethod init = InitMethod::kSpectral;

  ImConfig im{/*max_epochs=*/200, /*rng_seed=*/0, /*restarts=*/10};
  double virtual_distance = 0.0;  // 0 = mean pairwise source distance

  Index transform_vocab_size = 50000;
  bool procrustes = false;  // ablation: constrain the fit to be orthogonal
  RetrievalConfig retrieval;
  std::vector<Index> eval_k = default_k_values();

  std::uint64_t seed = 0;
  unsigned threads = 0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["source_path"] = source_path;
    j["target_path"] = target_path;
    j["gold_path"] = gold_path;
    j["output_dir"] = output_dir;
    j["working_set_size"] = working_set_size;
    j["knn_grid"] = knn_grid;
    j["bandwidth"] = bandwidth.is_auto ? nlohmann::json("auto")
                                       : nlohmann::json(bandwidth.value);
    j["normalize"] = to_string(normalize_mode);
    j["init"] = to_string(init);
    j["im_max_epochs"] = im.max_epochs;
    j["im_restarts"] = im.restarts;
    j["im_candidates"] = im.candidates == CandidateSet::kRealOnly
                             ? "real-only"
                             : "real-plus-virtual";
    j["virtual_distance"] =
        virtual_distance > 0.0 ? nlohmann::json(virtual_distance)
                               : nlohmann::json("auto");
    j["transform_vocab_size"] = transform_vocab_size;
    j["procrustes"] = procrustes;
    j["metric"] = to_string(retrieval.metric);
    j["correction"] = to_string(retrieval.correction);
    j["gc_pool_size"] = retrieval.gc_pool_size;
    j["eval_k"] = eval_k;
    j["seed"] = seed;
    return j;
  }
};

struct PipelineGridEntry {
  Index k = 0;
  double final_loss = 0.0;
  std::uint64_t restart_seed = 0;
  bool converged = false;
  Index epochs = 0;
  Index seed_pairs = 0;
};

struct PipelineResult {
  Index best_k = 0;
  double best_loss = 0.0;
  std::vector<PipelineGridEntry> grid;
  Mapping best_mapping;  // over the working subset
  Index kept_pairs = 0;  // real pairs used for the fit
  TransformMatrix transform;
  std::optional<EvalReport> report;
  nlohmann::json manifest;
};

namespace detail {

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error("[" + name + "] " + e.what());
  } catch (const std::exception& e) {
    throw Error("[" + name + "] " + e.what());
  }
}

inline EmbeddingSpace load_space_file(const std::string& path, Index limit,
                                      NormalizeMode mode) {
  std::ifstream in(path);
  if (!in.good()) throw Error("cannot open embedding file: " + path);
  EmbeddingSpace space = load_embeddings(in, limit);
  return normalize(space, mode);
}

inline void write_text_file(const std::string& path,
                            const std::function<void(std::ostream&)>& fn) {
  std::ofstream out(path);
  if (!out.good()) throw Error("cannot write file: " + path);
  fn(out);
  out.flush();
  if (!out.good()) throw Error("write failed: " + path);
}

}  // namespace detail

// The full unsupervised run: load, subset, spectral seeds per grid k,
// iterative mapping with restarts, loss-based model selection, linear fit,
// retrieval, and (when gold is given) evaluation. Every artifact lands in
// output_dir next to a manifest that reproduces the run.
inline PipelineResult run_pipeline(const PipelineConfig& config) {
  namespace fs = std::filesystem;
  require(!config.output_dir.empty(), "pipeline: output_dir is required");
  require(config.working_set_size >= 2,
          "pipeline: working_set_size must be >= 2");
  require(!config.knn_grid.empty(), "pipeline: empty knn grid");

  fs::create_directories(config.output_dir);
  const auto out_path = [&](const std::string& name) {
    return (fs::path(config.output_dir) / name).string();
  };

  const Index load_limit =
      std::max(config.transform_vocab_size, config.working_set_size);
  const EmbeddingSpace x_full = detail::stage("load-source", [&] {
    return detail::load_space_file(config.source_path, load_limit,
                                   config.normalize_mode);
  });
  const EmbeddingSpace y_full = detail::stage("load-target", [&] {
    return detail::load_space_file(config.target_path, load_limit,
                                   config.normalize_mode);
  });

  const Index n_working = std::min(config.working_set_size, x_full.size());
  const Index m_working = std::min(config.working_set_size, y_full.size());
  const EmbeddingSpace x_work = top_subset(x_full, n_working);
  const EmbeddingSpace y_work = top_subset(y_full, m_working);

  const double virtual_distance = detail::stage("im", [&] {
    if (config.virtual_distance > 0.0) return config.virtual_distance;
    return mean_pairwise_distance(pairwise_distances(x_work));
  });

  // Grid search over k, guided only by the final loss.
  PipelineResult result;
  std::vector<Index> skipped_k;
  Mapping best_seed_pairs;
  SpectralFeatures best_src_features;
  SpectralFeatures best_tgt_features;
  std::optional<ImResult> best_im;

  for (Index k : config.knn_grid) {
    if (k < 2 || k > n_working || k > m_working) {
      skipped_k.push_back(k);
      continue;
    }
    ImConfig im_config = config.im;
    im_config.threads = config.threads;

    Mapping seed_pairs;
    ImResult im_result;
    SpectralFeatures src_features;
    SpectralFeatures tgt_features;
    if (config.init == InitMethod::kSpectral) {
      std::tie(src_features, tgt_features, seed_pairs) =
          detail::stage("spectral-init", [&] {
            SpectralFeatures src = spectral_features(
                x_work, k, config.bandwidth, config.threads);
            SpectralFeatures tgt = spectral_features(
                y_work, k, config.bandwidth, config.threads);
            Mapping p = mutual_nn_pairs(src, tgt, config.threads);
            return std::make_tuple(std::move(src), std::move(tgt),
                                   std::move(p));
          });
      const Mapping init = make_initial_mapping(seed_pairs, virtual_distance);
      im_result = detail::stage(
          "im", [&] { return im_optimize(x_work, y_work, init, im_config); });
    } else {
      seed_pairs = make_unassigned_mapping(x_work.size());
      im_result = detail::stage("im", [&] {
        return im_optimize_random_init(x_work, y_work, virtual_distance,
                                       im_config);
      });
    }

    PipelineGridEntry entry;
    entry.k = k;
    entry.final_loss = im_result.final_loss;
    entry.restart_seed = im_result.restart_seed;
    entry.converged = im_result.converged;
    entry.epochs = static_cast<Index>(im_result.trace.size()) - 1;
    entry.seed_pairs = seed_pairs.assigned_count();
    result.grid.push_back(entry);

    const bool is_best =
        !best_im.has_value() || im_result.final_loss < best_im->final_loss;
    if (is_best) {
      best_im = std::move(im_result);
      result.best_k = k;
      best_seed_pairs = std::move(seed_pairs);
      best_src_features = std::move(src_features);
      best_tgt_features = std::move(tgt_features);
    }
  }
  require(best_im.has_value(),
          "pipeline: no usable k in the grid (working set too small?)");
  result.best_loss = best_im->final_loss;
  result.best_mapping = best_im->mapping;

  // Working-set pairs, translated back to the full spaces.
  std::vector<std::pair<Index, Index>> fit_pairs;
  for (const auto& [s, t] : result.best_mapping.real_pairs()) {
    fit_pairs.emplace_back(x_work.origin_of(s), y_work.origin_of(t));
  }
  result.kept_pairs = static_cast<Index>(fit_pairs.size());
  require(!fit_pairs.empty(),
          "pipeline: the optimized mapping has no real pairs to fit");
  result.transform = detail::stage("fit", [&] {
    return config.procrustes ? fit_procrustes(fit_pairs, x_full, y_full)
                             : fit_linear(fit_pairs, x_full, y_full);
  });

  // Induced translations for the working-set vocabulary.
  RetrievalConfig retrieval = config.retrieval;
  retrieval.threads = config.threads;
  retrieval.top_k = std::min<Index>(retrieval.top_k, y_full.size());
  const auto induced = detail::stage("retrieve", [&] {
    std::vector<Index> queries;
    queries.reserve(static_cast<std::size_t>(x_work.size()));
    for (Index s = 0; s < x_work.size(); ++s) {
      queries.push_back(x_work.origin_of(s));
    }
    return config.retrieval.correction == Correction::kGlobalCorrection
               ? gc_retrieve(result.transform, queries, x_full, y_full,
                             retrieval)
               : translate_many(result.transform, queries, x_full, y_full,
                                retrieval);
  });

  // Evaluation against gold, when provided.
  std::optional<BilingualDictionary> gold;
  if (!config.gold_path.empty()) {
    gold = detail::stage("eval", [&] {
      std::ifstream in(config.gold_path);
      if (!in.good()) {
        throw Error("cannot open gold dictionary: " + config.gold_path);
      }
      return load_dictionary_tsv(in);
    });
    result.report = detail::stage("eval", [&] {
      std::vector<std::string> test;
      Index dropped = 0;
      for (const auto& [source, targets] : gold->entries) {
        const bool source_ok = x_full.vocab.contains(source);
        const bool target_ok = std::any_of(
            targets.begin(), targets.end(), [&](const std::string& t) {
              return y_full.vocab.contains(t);
            });
        if (source_ok && target_ok) {
          test.push_back(source);
        } else {
          ++dropped;
        }
      }
      require(!test.empty(), "no gold entries usable with these vocabularies");
      RetrievalConfig eval_retrieval = retrieval;
      std::vector<Index> k_values = config.eval_k;
      std::sort(k_values.begin(), k_values.end());
      eval_retrieval.top_k = std::min<Index>(k_values.back(), y_full.size());
      auto predictions = detail::predict_tokens(result.transform, test,
                                                x_full, y_full,
                                                eval_retrieval);
      EvalReport report = precision_at_k(predictions, gold.value(), k_values);
      report.n_excluded += dropped;
      report.settings["metric"] = to_string(eval_retrieval.metric);
      report.settings["correction"] = to_string(eval_retrieval.correction);
      report.settings["seed"] = config.seed;
      report.settings["init"] = to_string(config.init);
      report.settings["gold_dropped_oov"] = dropped;
      return report;
    });
  }

  // Artifacts.
  detail::stage("write", [&] {
    if (config.init == InitMethod::kSpectral) {
      detail::write_text_file(out_path("features_source.csv"), [&](auto& o) {
        save_features_csv(best_src_features, x_work.vocab, o);
      });
      detail::write_text_file(out_path("features_target.csv"), [&](auto& o) {
        save_features_csv(best_tgt_features, y_work.vocab, o);
      });
      detail::write_text_file(out_path("seed_pairs.tsv"), [&](auto& o) {
        save_mapping_tsv(best_seed_pairs, x_work.vocab, y_work.vocab, o);
      });
    }
    detail::write_text_file(out_path("mapping.tsv"), [&](auto& o) {
      save_mapping_tsv(result.best_mapping, x_work.vocab, y_work.vocab, o);
    });
    detail::write_text_file(out_path("loss_trace.csv"), [&](auto& o) {
      save_trace_csv(best_im->trace, o);
    });
    detail::write_text_file(out_path("transform.txt"), [&](auto& o) {
      save_transform(result.transform, o);
    });
    detail::write_text_file(out_path("translations.tsv"), [&](auto& o) {
      std::vector<std::string> tokens;
      for (Index s = 0; s < x_work.size(); ++s) {
        tokens.push_back(x_work.vocab.tokens[s]);
      }
      save_translations_tsv(tokens, induced, y_full.vocab, o);
    });
    if (result.report.has_value()) {
      detail::write_text_file(out_path("eval_report.json"), [&](auto& o) {
        o << result.report->to_json().dump(2) << '\n';
      });
      detail::write_text_file(out_path("eval_report.csv"), [&](auto& o) {
        result.report->save_csv(o);
      });
    }
    return 0;
  });

  // Manifest: everything needed to reproduce and interpret the run.
  nlohmann::json manifest;
  manifest["config"] = config.to_json();
  manifest["derived"]["virtual_distance"] = virtual_distance;
  manifest["derived"]["working_source_words"] = x_work.size();
  manifest["derived"]["working_target_words"] = y_work.size();
  manifest["derived"]["loaded_source_words"] = x_full.size();
  manifest["derived"]["loaded_target_words"] = y_full.size();
  manifest["derived"]["skipped_k"] = skipped_k;
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& entry : result.grid) {
    nlohmann::json g;
    g["k"] = entry.k;
    g["final_loss"] = entry.final_loss;
    g["restart_seed"] = entry.restart_seed;
    g["converged"] = entry.converged;
    g["epochs"] = entry.epochs;
    g["seed_pairs"] = entry.seed_pairs;
    grid.push_back(g);
  }
  manifest["grid"] = grid;
  manifest["best"]["k"] = result.best_k;
  manifest["best"]["loss"] = result.best_loss;
  manifest["best"]["restart_seed"] = best_im->restart_seed;
  manifest["fit"]["pairs"] = result.kept_pairs;
  manifest["fit"]["residual"] = result.transform.fit_residual;
  if (result.report.has_value()) {
    manifest["eval"] = result.report->to_json();
  }
  result.manifest = manifest;
  detail::stage("write", [&] {
    detail::write_text_file(out_path("manifest.json"),
                            [&](auto& o) { o << manifest.dump(2) << '\n'; });
    return 0;
  });

  return result;
}

}  // namespace wordmap
