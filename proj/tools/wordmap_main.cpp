// Command-line front end: every pipeline stage as a subcommand, plus the
// end-to-end `pipeline` run. All outputs are plain text files with a JSON
// manifest where a stage has one.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wordmap/wordmap.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

wordmap::EmbeddingSpace load_space(const std::string& path,
                                   wordmap::Index limit,
                                   const std::string& normalize_mode) {
  std::ifstream in(path);
  if (!in.good()) throw wordmap::Error("cannot open embedding file: " + path);
  auto space = wordmap::load_embeddings(in, limit);
  return wordmap::normalize(space,
                            wordmap::normalize_mode_from_string(normalize_mode));
}

wordmap::BilingualDictionary load_gold(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw wordmap::Error("cannot open gold dictionary: " + path);
  return wordmap::load_dictionary_tsv(in);
}

wordmap::TransformMatrix load_transform_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw wordmap::Error("cannot open transform file: " + path);
  return wordmap::load_transform(in);
}

void write_file(const std::string& path,
                const std::function<void(std::ostream&)>& fn) {
  if (fs::path(path).has_parent_path()) {
    fs::create_directories(fs::path(path).parent_path());
  }
  std::ofstream out(path);
  if (!out.good()) throw wordmap::Error("cannot write file: " + path);
  fn(out);
  out.flush();
  if (!out.good()) throw wordmap::Error("write failed: " + path);
}

void write_manifest(const std::string& path, const json& manifest) {
  write_file(path, [&](std::ostream& o) { o << manifest.dump(2) << '\n'; });
}

struct EmbeddingOptions {
  std::string source_path;
  std::string target_path;
  wordmap::Index limit = -1;
  std::string normalize_mode = "none";

  void attach(CLI::App* cmd) {
    cmd->add_option("--source", source_path, "source embeddings (word2vec text)")
        ->required();
    cmd->add_option("--target", target_path, "target embeddings (word2vec text)")
        ->required();
    cmd->add_option("--limit", limit,
                    "load only the first N words of each file");
    cmd->add_option("--normalize", normalize_mode,
                    "none | unit-length | center-then-unit");
  }

  std::pair<wordmap::EmbeddingSpace, wordmap::EmbeddingSpace> load() const {
    return {load_space(source_path, limit, normalize_mode),
            load_space(target_path, limit, normalize_mode)};
  }
};

std::vector<std::string> read_token_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw wordmap::Error("cannot open query file: " + path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) tokens.push_back(line);
  }
  return tokens;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"wordmap: unsupervised alignment of monolingual word "
               "embedding spaces"};
  app.require_subcommand(1);
  app.fallthrough();  // allow global flags after the subcommand name
  app.set_config("--config", "", "read options from an INI/TOML file");

  unsigned threads = 0;
  app.add_option("--threads", threads,
                 "worker threads (0 = hardware concurrency)");

  int exit_code = 0;

  // ---- synth ------------------------------------------------------------
  auto* synth = app.add_subcommand(
      "synth", "generate a ground-truth benchmark instance");
  struct {
    wordmap::Index n = 500;
    wordmap::Index dim = 50;
    std::string map_kind = "orthogonal";
    std::string cloud = "gaussian";
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::string out_dir;
  } synth_opts;
  synth->add_option("--n", synth_opts.n, "number of words per language");
  synth->add_option("--dim", synth_opts.dim, "embedding dimension");
  synth->add_option("--map-kind", synth_opts.map_kind,
                    "orthogonal | general-linear");
  synth->add_option("--cloud", synth_opts.cloud, "gaussian | clustered");
  synth->add_option("--noise", synth_opts.noise,
                    "noise std relative to mean pairwise distance");
  synth->add_option("--seed", synth_opts.seed, "rng seed");
  synth->add_option("--out", synth_opts.out_dir, "output directory")
      ->required();
  synth->callback([&] {
    auto instance = wordmap::generate(
        synth_opts.n, synth_opts.dim,
        wordmap::map_kind_from_string(synth_opts.map_kind), synth_opts.noise,
        synth_opts.seed, wordmap::cloud_shape_from_string(synth_opts.cloud));
    fs::create_directories(synth_opts.out_dir);
    wordmap::save_instance(instance, synth_opts.out_dir);
    std::cout << "wrote instance to " << synth_opts.out_dir << '\n';
  });

  // ---- spectral-init ------------------------------------------------------
  auto* spectral = app.add_subcommand(
      "spectral-init", "spectral features and mutual-NN seed pairs");
  EmbeddingOptions spectral_emb;
  spectral_emb.attach(spectral);
  struct {
    wordmap::Index k = 10;
    double bandwidth = 0.0;  // 0 = auto
    wordmap::Index working_set = 2000;
    std::string out_dir;
  } spectral_opts;
  spectral->add_option("--k", spectral_opts.k, "neighborhood size");
  spectral->add_option("--bandwidth", spectral_opts.bandwidth,
                       "fixed similarity bandwidth (default: auto)");
  spectral->add_option("--working-set", spectral_opts.working_set,
                       "most-frequent words to use per language");
  spectral->add_option("--out", spectral_opts.out_dir, "output directory")
      ->required();
  spectral->callback([&] {
    auto [x, y] = spectral_emb.load();
    const auto xw = wordmap::top_subset(
        x, std::min(spectral_opts.working_set, x.size()));
    const auto yw = wordmap::top_subset(
        y, std::min(spectral_opts.working_set, y.size()));
    const auto bandwidth = spectral_opts.bandwidth > 0.0
                               ? wordmap::Bandwidth::fixed(spectral_opts.bandwidth)
                               : wordmap::Bandwidth::auto_tuned();
    const auto src =
        wordmap::spectral_features(xw, spectral_opts.k, bandwidth, threads);
    const auto tgt =
        wordmap::spectral_features(yw, spectral_opts.k, bandwidth, threads);
    const auto pairs = wordmap::mutual_nn_pairs(src, tgt, threads);

    const fs::path dir(spectral_opts.out_dir);
    fs::create_directories(dir);
    write_file((dir / "features_source.csv").string(), [&](std::ostream& o) {
      wordmap::save_features_csv(src, xw.vocab, o);
    });
    write_file((dir / "features_target.csv").string(), [&](std::ostream& o) {
      wordmap::save_features_csv(tgt, yw.vocab, o);
    });
    write_file((dir / "seed_pairs.tsv").string(), [&](std::ostream& o) {
      wordmap::save_mapping_tsv(pairs, xw.vocab, yw.vocab, o);
    });
    json manifest;
    manifest["k"] = spectral_opts.k;
    manifest["bandwidth"] = spectral_opts.bandwidth > 0.0
                                ? json(spectral_opts.bandwidth)
                                : json("auto");
    manifest["working_source_words"] = xw.size();
    manifest["working_target_words"] = yw.size();
    manifest["seed_pairs"] = pairs.assigned_count();
    manifest["normalize"] = spectral_emb.normalize_mode;
    write_manifest((dir / "manifest.json").string(), manifest);
    std::cout << "seed pairs: " << pairs.assigned_count() << " / "
              << xw.size() << '\n';
  });

  // ---- im -----------------------------------------------------------------
  auto* im = app.add_subcommand(
      "im", "iterative mapping from seed pairs or random initialization");
  EmbeddingOptions im_emb;
  im_emb.attach(im);
  struct {
    std::string seed_pairs_path;
    bool random_init = false;
    double c = 0.0;  // 0 = mean pairwise source distance
    wordmap::Index epochs = 200;
    wordmap::Index restarts = 10;
    std::uint64_t rng_seed = 0;
    std::string candidates = "real-only";
    wordmap::Index working_set = 2000;
    std::string out_dir;
  } im_opts;
  im->add_option("--seed-pairs", im_opts.seed_pairs_path,
                 "seed pairs TSV from spectral-init");
  im->add_flag("--random-init", im_opts.random_init,
               "start from uniform random assignments (IM-Rand baseline)");
  im->add_option("--c", im_opts.c,
                 "virtual token distance (default: mean pairwise distance)");
  im->add_option("--epochs", im_opts.epochs, "maximum epochs");
  im->add_option("--restarts", im_opts.restarts, "independent restarts");
  im->add_option("--rng-seed", im_opts.rng_seed, "base rng seed");
  im->add_option("--candidates", im_opts.candidates,
                 "real-only | real-plus-virtual");
  im->add_option("--working-set", im_opts.working_set,
                 "most-frequent words to use per language");
  im->add_option("--out", im_opts.out_dir, "output directory")->required();
  im->callback([&] {
    const bool has_pairs = !im_opts.seed_pairs_path.empty();
    if (im_opts.random_init == has_pairs) {
      throw wordmap::Error(
          "im: exactly one of --seed-pairs and --random-init is required");
    }
    auto [x, y] = im_emb.load();
    const auto xw =
        wordmap::top_subset(x, std::min(im_opts.working_set, x.size()));
    const auto yw =
        wordmap::top_subset(y, std::min(im_opts.working_set, y.size()));
    const double c =
        im_opts.c > 0.0
            ? im_opts.c
            : wordmap::mean_pairwise_distance(wordmap::pairwise_distances(xw));

    wordmap::ImConfig config;
    config.max_epochs = im_opts.epochs;
    config.restarts = im_opts.restarts;
    config.rng_seed = im_opts.rng_seed;
    config.threads = threads;
    config.candidates = im_opts.candidates == "real-plus-virtual"
                            ? wordmap::CandidateSet::kRealPlusVirtual
                            : wordmap::CandidateSet::kRealOnly;

    wordmap::ImResult result;
    if (im_opts.random_init) {
      result = wordmap::im_optimize_random_init(xw, yw, c, config);
    } else {
      std::ifstream in(im_opts.seed_pairs_path);
      if (!in.good()) {
        throw wordmap::Error("cannot open seed pairs: " +
                             im_opts.seed_pairs_path);
      }
      auto seeds = wordmap::load_mapping_tsv(in, xw.vocab, yw.vocab);
      const auto init = wordmap::make_initial_mapping(std::move(seeds), c);
      result = wordmap::im_optimize(xw, yw, init, config);
    }

    const fs::path dir(im_opts.out_dir);
    fs::create_directories(dir);
    write_file((dir / "mapping.tsv").string(), [&](std::ostream& o) {
      wordmap::save_mapping_tsv(result.mapping, xw.vocab, yw.vocab, o);
    });
    write_file((dir / "loss_trace.csv").string(), [&](std::ostream& o) {
      wordmap::save_trace_csv(result.trace, o);
    });
    json manifest;
    manifest["final_loss"] = result.final_loss;
    manifest["converged"] = result.converged;
    manifest["epochs"] = result.trace.size() - 1;
    manifest["restart_seed"] = result.restart_seed;
    manifest["virtual_distance"] = c;
    manifest["init"] = im_opts.random_init ? "random" : "seed-pairs";
    manifest["restarts"] = im_opts.restarts;
    manifest["rng_seed"] = im_opts.rng_seed;
    write_manifest((dir / "manifest.json").string(), manifest);
    std::cout << "final loss: " << result.final_loss << '\n';
  });

  // ---- fit ----------------------------------------------------------------
  auto* fit = app.add_subcommand(
      "fit", "least-squares linear transform from a mapping TSV");
  EmbeddingOptions fit_emb;
  fit_emb.attach(fit);
  struct {
    std::string mapping_path;
    std::string out_path;
    bool procrustes = false;
  } fit_opts;
  fit->add_option("--mapping", fit_opts.mapping_path,
                  "mapping TSV (virtual entries are skipped)")
      ->required();
  fit->add_option("--out", fit_opts.out_path, "output transform file")
      ->required();
  fit->add_flag("--procrustes", fit_opts.procrustes,
                "constrain the fit to an orthogonal map (ablation)");
  fit->callback([&] {
    auto [x, y] = fit_emb.load();
    std::ifstream in(fit_opts.mapping_path);
    if (!in.good()) {
      throw wordmap::Error("cannot open mapping: " + fit_opts.mapping_path);
    }
    const auto mapping = wordmap::load_mapping_tsv(in, x.vocab, y.vocab);
    const auto pairs = mapping.real_pairs();
    const auto transform = fit_opts.procrustes
                               ? wordmap::fit_procrustes(pairs, x, y)
                               : wordmap::fit_linear(pairs, x, y);
    write_file(fit_opts.out_path, [&](std::ostream& o) {
      wordmap::save_transform(transform, o);
    });
    json manifest;
    manifest["pairs"] = pairs.size();
    manifest["fit_residual"] = transform.fit_residual;
    manifest["procrustes"] = fit_opts.procrustes;
    write_manifest(fit_opts.out_path + ".manifest.json", manifest);
    std::cout << "fit residual: " << transform.fit_residual << " over "
              << pairs.size() << " pairs\n";
  });

  // ---- translate ------------------------------------------------------------
  auto* translate = app.add_subcommand(
      "translate", "retrieve translations for query words through T");
  EmbeddingOptions translate_emb;
  translate_emb.attach(translate);
  struct {
    std::string transform_path;
    std::string queries_path;
    std::vector<std::string> query_tokens;
    std::string metric = "cosine";
    std::string correction = "none";
    wordmap::Index gc_pool = 5000;
    wordmap::Index top_k = 10;
    std::string out_path;
  } tr_opts;
  translate->add_option("--transform", tr_opts.transform_path,
                        "transform file from fit")
      ->required();
  translate->add_option("--queries", tr_opts.queries_path,
                        "file with one source token per line");
  translate->add_option("--query", tr_opts.query_tokens,
                        "source tokens given inline");
  translate->add_option("--metric", tr_opts.metric, "euclidean | cosine");
  translate->add_option("--correction", tr_opts.correction,
                        "none | global-correction");
  translate->add_option("--gc-pool", tr_opts.gc_pool,
                        "pivot pool size for global correction");
  translate->add_option("--top-k", tr_opts.top_k, "results per query");
  translate->add_option("--out", tr_opts.out_path, "output TSV")->required();
  translate->callback([&] {
    const auto spaces = translate_emb.load();
    const auto& x = spaces.first;
    const auto& y = spaces.second;
    const auto transform = load_transform_file(tr_opts.transform_path);

    std::vector<std::string> tokens = tr_opts.query_tokens;
    if (!tr_opts.queries_path.empty()) {
      auto file_tokens = read_token_lines(tr_opts.queries_path);
      tokens.insert(tokens.end(), file_tokens.begin(), file_tokens.end());
    }
    if (tokens.empty()) {
      throw wordmap::Error("translate: no queries (--query or --queries)");
    }
    std::vector<wordmap::Index> ids;
    for (const auto& token : tokens) ids.push_back(x.vocab.require_id(token));

    wordmap::RetrievalConfig config;
    config.metric = wordmap::metric_from_string(tr_opts.metric);
    config.correction = wordmap::correction_from_string(tr_opts.correction);
    config.gc_pool_size = tr_opts.gc_pool;
    config.top_k = tr_opts.top_k;
    config.threads = threads;

    const auto lists =
        config.correction == wordmap::Correction::kGlobalCorrection
            ? wordmap::gc_retrieve(transform, ids, x, y, config)
            : wordmap::translate_many(transform, ids, x, y, config);
    write_file(tr_opts.out_path, [&](std::ostream& o) {
      wordmap::save_translations_tsv(tokens, lists, y.vocab, o);
    });
    std::cout << "wrote " << lists.size() << " query results to "
              << tr_opts.out_path << '\n';
  });

  // ---- eval -----------------------------------------------------------------
  auto* eval = app.add_subcommand(
      "eval", "precision@k of a transform against a gold dictionary");
  EmbeddingOptions eval_emb;
  eval_emb.attach(eval);
  struct {
    std::string transform_path;
    std::string gold_path;
    std::string metric = "cosine";
    std::string correction = "none";
    wordmap::Index gc_pool = 5000;
    std::vector<wordmap::Index> k_values = {1, 5, 10, 20, 50, 100};
    std::string out_prefix;
  } ev_opts;
  eval->add_option("--transform", ev_opts.transform_path)->required();
  eval->add_option("--gold", ev_opts.gold_path, "gold dictionary TSV")
      ->required();
  eval->add_option("--metric", ev_opts.metric, "euclidean | cosine");
  eval->add_option("--correction", ev_opts.correction,
                   "none | global-correction");
  eval->add_option("--gc-pool", ev_opts.gc_pool, "pivot pool size");
  eval->add_option("--k-values", ev_opts.k_values, "precision@k grid")
      ->delimiter(',');
  eval->add_option("--out", ev_opts.out_prefix,
                   "output prefix (.json and .csv are appended)")
      ->required();
  eval->callback([&] {
    const auto spaces = eval_emb.load();
    const auto& x = spaces.first;
    const auto& y = spaces.second;
    const auto transform = load_transform_file(ev_opts.transform_path);
    const auto gold = load_gold(ev_opts.gold_path);

    std::vector<std::string> test;
    wordmap::Index dropped = 0;
    for (const auto& [source, targets] : gold.entries) {
      const bool source_ok = x.vocab.contains(source);
      const bool target_ok =
          std::any_of(targets.begin(), targets.end(),
                      [&](const std::string& t) { return y.vocab.contains(t); });
      if (source_ok && target_ok) {
        test.push_back(source);
      } else {
        ++dropped;
      }
    }
    if (test.empty()) {
      throw wordmap::Error("eval: no gold entries usable with these "
                           "vocabularies");
    }

    wordmap::RetrievalConfig config;
    config.metric = wordmap::metric_from_string(ev_opts.metric);
    config.correction = wordmap::correction_from_string(ev_opts.correction);
    config.gc_pool_size = ev_opts.gc_pool;
    config.threads = threads;
    std::vector<wordmap::Index> k_values = ev_opts.k_values;
    std::sort(k_values.begin(), k_values.end());
    config.top_k = std::min<wordmap::Index>(k_values.back(), y.size());

    auto predictions =
        wordmap::detail::predict_tokens(transform, test, x, y, config);
    auto report = wordmap::precision_at_k(predictions, gold, k_values);
    report.n_excluded += dropped;
    report.settings["metric"] = ev_opts.metric;
    report.settings["correction"] = ev_opts.correction;
    report.settings["gold_dropped_oov"] = dropped;
    write_file(ev_opts.out_prefix + ".json", [&](std::ostream& o) {
      o << report.to_json().dump(2) << '\n';
    });
    write_file(ev_opts.out_prefix + ".csv",
               [&](std::ostream& o) { report.save_csv(o); });
    for (std::size_t i = 0; i < report.k_values.size(); ++i) {
      std::cout << "P@" << report.k_values[i] << " = " << report.precision[i]
                << '\n';
    }
  });

  // ---- freq-overlap ----------------------------------------------------------
  auto* freq = app.add_subcommand(
      "freq-overlap", "frequency-band overlap of gold translations");
  EmbeddingOptions freq_emb;
  freq_emb.attach(freq);
  struct {
    std::string gold_path;
    wordmap::Index band_size = 1000;
    wordmap::Index n_bands = 10;
    std::string out_path;
  } fo_opts;
  freq->add_option("--gold", fo_opts.gold_path)->required();
  freq->add_option("--band-size", fo_opts.band_size, "words per band");
  freq->add_option("--bands", fo_opts.n_bands, "number of bands");
  freq->add_option("--out", fo_opts.out_path, "output CSV")->required();
  freq->callback([&] {
    auto [x, y] = freq_emb.load();
    const auto gold = load_gold(fo_opts.gold_path);
    const auto overlap = wordmap::frequency_band_overlap(
        gold, x.vocab, y.vocab, fo_opts.band_size, fo_opts.n_bands);
    write_file(fo_opts.out_path,
               [&](std::ostream& o) { overlap.save_csv(o); });
    std::cout << "wrote " << overlap.fraction.size() << " bands to "
              << fo_opts.out_path << '\n';
  });

  // ---- sensitivity -------------------------------------------------------------
  auto* sens = app.add_subcommand(
      "sensitivity", "dictionary size / noise sweep of the supervised fit");
  EmbeddingOptions sens_emb;
  sens_emb.attach(sens);
  struct {
    std::string gold_path;
    std::vector<wordmap::Index> sizes = {100, 500, 1000, 2000};
    std::vector<double> noise = {0.0, 0.25, 0.5};
    std::uint64_t seed = 0;
    std::string metric = "cosine";
    std::vector<wordmap::Index> k_values = {1, 5, 10, 20, 50, 100};
    std::string out_path;
  } se_opts;
  sens->add_option("--gold", se_opts.gold_path)->required();
  sens->add_option("--sizes", se_opts.sizes, "dictionary sizes")
      ->delimiter(',');
  sens->add_option("--noise", se_opts.noise, "corruption fractions in [0,1]")
      ->delimiter(',');
  sens->add_option("--seed", se_opts.seed, "rng seed");
  sens->add_option("--metric", se_opts.metric, "euclidean | cosine");
  sens->add_option("--k-values", se_opts.k_values, "precision@k grid")
      ->delimiter(',');
  sens->add_option("--out", se_opts.out_path, "output CSV")->required();
  sens->callback([&] {
    auto [x, y] = sens_emb.load();
    const auto gold = load_gold(se_opts.gold_path);
    wordmap::RetrievalConfig config;
    config.metric = wordmap::metric_from_string(se_opts.metric);
    config.threads = threads;
    const auto grid = wordmap::dictionary_sensitivity(
        x, y, gold, se_opts.sizes, se_opts.noise, se_opts.seed,
        se_opts.k_values, config);
    write_file(se_opts.out_path, [&](std::ostream& o) { grid.save_csv(o); });
    std::cout << "wrote " << grid.cells.size() << " grid cells to "
              << se_opts.out_path << '\n';
  });

  // ---- pipeline -----------------------------------------------------------------
  auto* pipeline = app.add_subcommand(
      "pipeline", "full unsupervised run: spectral-init, im, fit, eval");
  struct {
    std::string source_path;
    std::string target_path;
    std::string gold_path;
    std::string out_dir;
    wordmap::Index working_set = 2000;
    std::vector<wordmap::Index> knn_grid = {10, 20, 30, 40, 50};
    double bandwidth = 0.0;
    std::string normalize_mode = "none";
    std::string init = "spectral";
    wordmap::Index epochs = 200;
    wordmap::Index restarts = 10;
    std::uint64_t rng_seed = 0;
    double c = 0.0;
    wordmap::Index transform_vocab = 50000;
    std::string metric = "cosine";
    std::string correction = "none";
    wordmap::Index gc_pool = 5000;
    wordmap::Index top_k = 10;
    std::vector<wordmap::Index> eval_k = {1, 5, 10, 20, 50, 100};
    bool procrustes = false;
  } pl_opts;
  pipeline->add_option("--source", pl_opts.source_path)->required();
  pipeline->add_option("--target", pl_opts.target_path)->required();
  pipeline->add_option("--gold", pl_opts.gold_path,
                       "gold dictionary TSV (enables evaluation)");
  pipeline->add_option("--out", pl_opts.out_dir, "output directory")
      ->required();
  pipeline->add_option("--working-set", pl_opts.working_set,
                       "most-frequent words for spectral + IM");
  pipeline->add_option("--knn-grid", pl_opts.knn_grid,
                       "neighborhood sizes to try")
      ->delimiter(',');
  pipeline->add_option("--bandwidth", pl_opts.bandwidth,
                       "fixed similarity bandwidth (default: auto)");
  pipeline->add_option("--normalize", pl_opts.normalize_mode,
                       "none | unit-length | center-then-unit");
  pipeline->add_option("--init", pl_opts.init,
                       "spectral | random (IM-Rand baseline)");
  pipeline->add_option("--epochs", pl_opts.epochs, "IM maximum epochs");
  pipeline->add_option("--restarts", pl_opts.restarts, "IM restarts");
  pipeline->add_option("--rng-seed", pl_opts.rng_seed, "IM base rng seed");
  pipeline->add_option("--c", pl_opts.c,
                       "virtual distance (default: mean pairwise)");
  pipeline->add_option("--transform-vocab", pl_opts.transform_vocab,
                       "vocabulary size for the linear fit and retrieval");
  pipeline->add_option("--metric", pl_opts.metric, "euclidean | cosine");
  pipeline->add_option("--correction", pl_opts.correction,
                       "none | global-correction");
  pipeline->add_option("--gc-pool", pl_opts.gc_pool, "pivot pool size");
  pipeline->add_option("--top-k", pl_opts.top_k,
                       "induced translations per source word");
  pipeline->add_option("--eval-k", pl_opts.eval_k, "precision@k grid")
      ->delimiter(',');
  pipeline->add_flag("--procrustes", pl_opts.procrustes,
                     "constrain the fit to an orthogonal map (ablation)");
  pipeline->callback([&] {
    wordmap::PipelineConfig config;
    config.source_path = pl_opts.source_path;
    config.target_path = pl_opts.target_path;
    config.gold_path = pl_opts.gold_path;
    config.output_dir = pl_opts.out_dir;
    config.working_set_size = pl_opts.working_set;
    config.knn_grid = pl_opts.knn_grid;
    config.bandwidth = pl_opts.bandwidth > 0.0
                           ? wordmap::Bandwidth::fixed(pl_opts.bandwidth)
                           : wordmap::Bandwidth::auto_tuned();
    config.normalize_mode =
        wordmap::normalize_mode_from_string(pl_opts.normalize_mode);
    config.init = wordmap::init_method_from_string(pl_opts.init);
    config.im.max_epochs = pl_opts.epochs;
    config.im.restarts = pl_opts.restarts;
    config.im.rng_seed = pl_opts.rng_seed;
    config.virtual_distance = pl_opts.c;
    config.transform_vocab_size = pl_opts.transform_vocab;
    config.procrustes = pl_opts.procrustes;
    config.retrieval.metric = wordmap::metric_from_string(pl_opts.metric);
    config.retrieval.correction =
        wordmap::correction_from_string(pl_opts.correction);
    config.retrieval.gc_pool_size = pl_opts.gc_pool;
    config.retrieval.top_k = pl_opts.top_k;
    config.eval_k = pl_opts.eval_k;
    config.seed = pl_opts.rng_seed;
    config.threads = threads;

    const auto result = wordmap::run_pipeline(config);
    std::cout << "best k: " << result.best_k
              << ", loss: " << result.best_loss
              << ", pairs: " << result.kept_pairs << '\n';
    if (result.report.has_value()) {
      for (std::size_t i = 0; i < result.report->k_values.size(); ++i) {
        std::cout << "P@" << result.report->k_values[i] << " = "
                  << result.report->precision[i] << '\n';
      }
    }
  });

  CLI11_PARSE(app, argc, argv);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const wordmap::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
