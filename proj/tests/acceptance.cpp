// Acceptance suite: one check per criterion, one PASS/FAIL line each.
// Returns nonzero if any required criterion fails. The real-data smoke test
// is optional and reports SKIP when no data directory is configured.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wordmap/wordmap.hpp"

namespace fs = std::filesystem;
using namespace wordmap;

namespace {

int g_failures = 0;

class Criterion {
 public:
  Criterion(int number, std::string name)
      : number_(number), name_(std::move(name)),
        start_(std::chrono::steady_clock::now()) {}

  void expect(bool ok, const std::string& detail) {
    if (!ok) {
      failed_ = true;
      details_ += (details_.empty() ? "" : "; ") + detail;
    }
  }

  void note(const std::string& detail) {
    details_ += (details_.empty() ? "" : "; ") + detail;
  }

  void finish(bool skipped = false) {
    const auto elapsed =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::steady_clock::now() - start_).count();
    std::string status = skipped ? "SKIP" : (failed_ ? "FAIL" : "PASS");
    std::cout << status << ": criterion " << number_ << " (" << name_ << ")";
    if (!details_.empty()) std::cout << " — " << details_;
    std::cout << " [" << elapsed << "s]" << std::endl;
    if (failed_ && !skipped) ++g_failures;
  }

 private:
  int number_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
  bool failed_ = false;
  std::string details_;
};

std::string fmt(double v) { return format_significant(v, 6); }

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

EmbeddingSpace permuted_copy(const EmbeddingSpace& x,
                             const std::vector<Index>& perm) {
  EmbeddingSpace y = x;
  for (Index i = 0; i < x.size(); ++i) {
    y.vectors.row(perm[i]) = x.vectors.row(i);
  }
  return y;
}

EmbeddingSpace random_cloud(Index n, Index d, std::uint64_t seed,
                            char prefix = 'w') {
  Rng rng(seed);
  EmbeddingSpace space;
  space.vectors.resize(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) space.vectors(i, j) = rng.next_normal();
    space.vocab.tokens.push_back(std::string(1, prefix) + std::to_string(i));
    space.vocab.rank.push_back(i);
  }
  space.vocab.rebuild_index();
  return space;
}

// Criterion 1: noiseless orthogonal instance through the whole pipeline.
void criterion_1() {
  Criterion c(1, "exact-isometry recovery end-to-end");
  const auto instance_dir = fresh_dir("wordmap_acc1_instance");
  const auto out_dir = fresh_dir("wordmap_acc1_run");
  const auto instance = generate(500, 50, MapKind::kOrthogonal, 0.0, 2024);
  save_instance(instance, instance_dir.string());

  PipelineConfig config;
  config.source_path = (instance_dir / "source.vec").string();
  config.target_path = (instance_dir / "target.vec").string();
  config.gold_path = (instance_dir / "gold.tsv").string();
  config.output_dir = out_dir.string();
  config.working_set_size = 500;
  config.transform_vocab_size = 500;
  config.knn_grid = {10, 20, 30, 40, 50};
  config.im.restarts = 10;
  config.im.max_epochs = 200;
  config.eval_k = {1, 5, 10};

  const auto result = run_pipeline(config);
  const double p1 = result.report->precision_at(1);
  c.expect(p1 >= 0.99, "P@1 below 0.99");
  c.note("P@1 = " + fmt(p1) + ", loss = " + fmt(result.best_loss) +
         ", best k = " + std::to_string(result.best_k));
  c.finish();
}

// Criterion 2: least-squares exactness at full embedding dimensionality.
void criterion_2() {
  Criterion c(2, "least-squares exactness");
  const Index d = 100;
  const Index n = 2 * d;
  const auto instance = generate(n, d, MapKind::kGeneralLinear, 0.0, 7);
  std::vector<std::pair<Index, Index>> pairs;
  for (Index i = 0; i < n; ++i) pairs.emplace_back(i, instance.true_map[i]);
  const auto fit = fit_linear(pairs, instance.x, instance.y);
  const double rel_error =
      (fit.t - instance.generator_t).norm() / instance.generator_t.norm();
  c.expect(rel_error < 1e-8, "relative Frobenius error " + fmt(rel_error));
  c.expect(fit.fit_residual < 1e-12, "residual " + fmt(fit.fit_residual));
  c.note("relative error = " + fmt(rel_error) +
         ", residual = " + fmt(fit.fit_residual));
  c.finish();
}

// Criterion 3: the supervised fit survives 50% dictionary corruption.
// Calibration: across seeds 0..4 of this exact setup the observed
// corrupted/clean P@1 ratio is 1.0 under cosine retrieval (uniform
// corruption mostly shrinks the fitted map, which cosine ranking ignores);
// the asserted floor is pinned at 0.95.
void criterion_3() {
  Criterion c(3, "noise robustness of the supervised fit");
  const double pinned_ratio = 0.95;
  const Index n = 2000;
  const Index d = 100;
  double ratio_sum = 0.0;
  double min_ratio = 1.0;

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto instance = generate(n, d, MapKind::kGeneralLinear, 0.0, seed);
    const auto gold = gold_dictionary(instance);

    std::vector<std::pair<std::string, std::string>> pairs;
    for (Index i = 0; i < n; ++i) {
      pairs.emplace_back(instance.x.vocab.tokens[i],
                         instance.y.vocab.tokens[instance.true_map[i]]);
    }
    Rng rng(derive_seed(seed, 3));
    const auto corrupted =
        corrupt_pairs(pairs, gold, instance.y, 0.5, rng);

    const auto fit_pairs = [&](const auto& token_pairs) {
      std::vector<std::pair<Index, Index>> ids;
      for (const auto& [s, t] : token_pairs) {
        ids.emplace_back(instance.x.vocab.require_id(s),
                         instance.y.vocab.require_id(t));
      }
      return fit_linear(ids, instance.x, instance.y);
    };
    const auto clean_fit = fit_pairs(pairs);
    const auto noisy_fit = fit_pairs(corrupted);

    RetrievalConfig config;
    config.top_k = 1;
    std::vector<Index> queries;
    for (Index i = 0; i < n; ++i) queries.push_back(i);
    const auto score = [&](const TransformMatrix& t) {
      const auto lists =
          translate_many(t, queries, instance.x, instance.y, config);
      Index hits = 0;
      for (Index i = 0; i < n; ++i) {
        hits += lists[i][0].target_id == instance.true_map[i] ? 1 : 0;
      }
      return static_cast<double>(hits) / static_cast<double>(n);
    };
    const double clean_p1 = score(clean_fit);
    const double noisy_p1 = score(noisy_fit);
    const double ratio = clean_p1 > 0.0 ? noisy_p1 / clean_p1 : 0.0;
    ratio_sum += ratio;
    min_ratio = std::min(min_ratio, ratio);
  }
  const double mean_ratio = ratio_sum / 5.0;
  c.expect(mean_ratio >= pinned_ratio,
           "mean ratio " + fmt(mean_ratio) + " below pinned " +
               fmt(pinned_ratio));
  c.note("mean corrupted/clean P@1 ratio = " + fmt(mean_ratio) +
         ", min = " + fmt(min_ratio) + ", pinned floor = " +
         fmt(pinned_ratio));
  c.finish();
}

// Criterion 4: iterative-mapping invariant suite.
void criterion_4() {
  Criterion c(4, "IM invariant suite");

  // (a) non-increasing loss trace on 20 random instances.
  Rng seeds(404);
  bool monotone = true;
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = random_cloud(20, 4, seeds.next_u64());
    const auto y = random_cloud(22, 4, seeds.next_u64());
    const Mapping init = random_init(x, y, seeds.next_u64());
    ImConfig config;
    config.max_epochs = 40;
    config.rng_seed = trial;
    const auto result = im_optimize(x, y, init, config);
    for (std::size_t e = 1; e < result.trace.size(); ++e) {
      monotone = monotone &&
                 result.trace[e].loss <= result.trace[e - 1].loss;
    }
  }
  c.expect(monotone, "(a) trace increased");

  // (b) incremental deltas match full recomputation on 1000 random moves.
  {
    const auto x = random_cloud(18, 5, 11);
    const auto y = random_cloud(21, 5, 12);
    const Matrix dx = pairwise_distances(x);
    const Matrix dy = pairwise_distances(y);
    Rng rng(13);
    bool all_close = true;
    for (int move = 0; move < 1000; ++move) {
      Mapping m = make_unassigned_mapping(18);
      m.virtual_distance = 1.3;
      for (Index s = 0; s < 18; ++s) {
        m.assignment[s] = rng.next_double() < 0.15
                              ? TargetRef::virtual_token()
                              : TargetRef::real(static_cast<Index>(
                                    rng.next_index(21)));
      }
      const Index source = static_cast<Index>(rng.next_index(18));
      const TargetRef target =
          rng.next_double() < 0.15
              ? TargetRef::virtual_token()
              : TargetRef::real(static_cast<Index>(rng.next_index(21)));
      const double before = mapping_loss(dx, dy, m);
      const double delta = loss_delta(dx, dy, m, source, target);
      Mapping moved = m;
      moved.assignment[source] = target;
      const double after = mapping_loss(dx, dy, moved);
      all_close = all_close && std::abs(delta - (after - before)) <=
                                   1e-9 * std::max(1.0, before);
    }
    c.expect(all_close, "(b) delta mismatch");
  }

  // (c) ground-truth initialization on an exact isometric copy is a fixed
  // point: zero accepted updates, loss stays 0.
  {
    const auto x = random_cloud(40, 6, 21);
    Rng rng(22);
    const auto perm = random_permutation(40, rng);
    const auto y = permuted_copy(x, perm);
    Mapping truth = make_unassigned_mapping(40);
    for (Index i = 0; i < 40; ++i) {
      truth.assignment[i] = TargetRef::real(perm[i]);
    }
    ImConfig config;
    config.max_epochs = 5;
    const auto result = im_optimize(x, y, truth, config);
    c.expect(result.final_loss == 0.0, "(c) loss nonzero");
    c.expect(result.trace.size() == 2 &&
                 result.trace[1].accepted_updates == 0,
             "(c) updates accepted");
  }

  // (d) determinism under parallel candidate scanning.
  {
    const auto x = random_cloud(40, 5, 31);
    const auto y = random_cloud(40, 5, 32);
    const Mapping init = random_init(x, y, 33);
    ImConfig config;
    config.max_epochs = 20;
    config.rng_seed = 3;
    config.threads = 1;
    const auto a = im_optimize(x, y, init, config);
    config.threads = 2;
    const auto b = im_optimize(x, y, init, config);
    bool identical = a.final_loss == b.final_loss &&
                     a.trace.size() == b.trace.size();
    for (Index s = 0; identical && s < 40; ++s) {
      identical = *a.mapping.assignment[s] == *b.mapping.assignment[s];
    }
    c.expect(identical, "(d) outputs differ across thread counts");
  }

  c.finish();
}

// Criterion 5: spectral invariant suite.
void criterion_5() {
  Criterion c(5, "spectral invariant suite");
  const Index n = 60;
  const Index d = 8;
  const Index k = 10;
  const auto space = random_cloud(n, d, 55);

  // Permutation invariance of individual embeddings.
  {
    Rng rng(56);
    bool invariant = true;
    for (int trial = 0; trial < 10; ++trial) {
      const Index word = static_cast<Index>(rng.next_index(n));
      const auto graph =
          build_neighborhood(space, word, k, Bandwidth::auto_tuned());
      const Vector base = spectral_embedding(graph);
      const auto perm = random_permutation(k, rng);
      NeighborhoodGraph shuffled;
      shuffled.sigma = graph.sigma;
      shuffled.member_ids.resize(k);
      shuffled.distances.resize(k, k);
      for (Index a = 0; a < k; ++a) {
        shuffled.member_ids[a] = graph.member_ids[perm[a]];
        for (Index b = 0; b < k; ++b) {
          shuffled.distances(a, b) = graph.distances(perm[a], perm[b]);
        }
      }
      const Vector v = spectral_embedding(shuffled);
      invariant = invariant && (v - base).cwiseAbs().maxCoeff() < 1e-9;
    }
    c.expect(invariant, "permutation invariance violated");
  }

  // Trace-zero rows.
  {
    const auto features = spectral_features(space, k, Bandwidth::auto_tuned());
    bool zero = true;
    for (Index i = 0; i < n; ++i) {
      zero = zero && std::abs(features.features.row(i).sum()) <=
                         1e-6 * static_cast<double>(k);
    }
    c.expect(zero, "feature rows do not sum to zero");
  }

  // Isometry equivariance under random orthogonal maps plus translations.
  {
    Rng rng(57);
    const auto base = spectral_features(space, k, Bandwidth::auto_tuned());
    bool equivariant = true;
    for (int trial = 0; trial < 3; ++trial) {
      const Matrix q = wordmap::detail::haar_orthogonal(d, rng);
      Eigen::RowVectorXd shift(d);
      for (Index j = 0; j < d; ++j) shift(j) = rng.next_normal();
      EmbeddingSpace moved = space;
      moved.vectors = space.vectors * q.transpose();
      moved.vectors.rowwise() += shift;
      const auto after = spectral_features(moved, k, Bandwidth::auto_tuned());
      equivariant = equivariant &&
                    (base.features - after.features).cwiseAbs().maxCoeff() <
                        1e-6;
    }
    c.expect(equivariant, "isometry equivariance violated");
  }

  // Double-argmin verification of every emitted mutual pair.
  {
    const auto other = random_cloud(70, d, 58);
    const auto src = spectral_features(space, k, Bandwidth::auto_tuned());
    const auto tgt = spectral_features(other, k, Bandwidth::auto_tuned());
    const auto mapping = mutual_nn_pairs(src, tgt);
    const auto nearest = [](const Matrix& from, Index row, const Matrix& to) {
      Index best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < to.rows(); ++j) {
        const double dist = (from.row(row) - to.row(j)).squaredNorm();
        if (dist < best_dist) {
          best_dist = dist;
          best = j;
        }
      }
      return best;
    };
    bool verified = true;
    Index emitted = 0;
    for (Index i = 0; i < n; ++i) {
      if (!mapping.assignment[i].has_value()) continue;
      ++emitted;
      const Index j = mapping.assignment[i]->id();
      verified = verified && nearest(src.features, i, tgt.features) == j &&
                 nearest(tgt.features, j, src.features) == i;
    }
    c.expect(verified, "a pair fails the double-argmin check");
    c.expect(emitted >= 1, "no mutual pairs emitted");
    c.note(std::to_string(emitted) + " mutual pairs verified");
  }

  c.finish();
}

// Criterion 6: spectral initialization never loses to random initialization
// on near-isometric instances (property form of the headline comparison).
void criterion_6() {
  Criterion c(6, "spectral-vs-random baseline ordering");
  double spectral_sum = 0.0;
  double random_sum = 0.0;
  int runs = 0;

  for (const double noise : {0.0, 0.01}) {
    for (std::uint64_t seed = 100; seed < 105; ++seed) {
      const auto instance_dir =
          fresh_dir("wordmap_acc6_" + std::to_string(runs));
      const auto instance =
          generate(500, 50, MapKind::kOrthogonal, noise, seed);
      save_instance(instance, instance_dir.string());

      PipelineConfig config;
      config.source_path = (instance_dir / "source.vec").string();
      config.target_path = (instance_dir / "target.vec").string();
      config.gold_path = (instance_dir / "gold.tsv").string();
      config.working_set_size = 500;
      config.transform_vocab_size = 500;
      config.knn_grid = {20};
      config.im.restarts = 3;
      config.im.max_epochs = 60;
      config.eval_k = {1};

      config.init = InitMethod::kSpectral;
      config.output_dir =
          (instance_dir / "run_spectral").string();
      const double p_spectral =
          run_pipeline(config).report->precision_at(1);

      config.init = InitMethod::kRandom;
      config.output_dir = (instance_dir / "run_random").string();
      const double p_random = run_pipeline(config).report->precision_at(1);

      spectral_sum += p_spectral;
      random_sum += p_random;
      ++runs;
      fs::remove_all(instance_dir);
    }
  }
  const double spectral_mean = spectral_sum / runs;
  const double random_mean = random_sum / runs;
  c.expect(spectral_mean >= random_mean,
           "spectral mean " + fmt(spectral_mean) + " < random mean " +
               fmt(random_mean));
  c.note("mean P@1 spectral = " + fmt(spectral_mean) +
         ", random = " + fmt(random_mean) + " over " +
         std::to_string(runs) + " runs");
  c.finish();
}

// Criterion 7: hubness correction on a constructed hub instance, plus the
// small-instance rank-table oracle.
void criterion_7() {
  Criterion c(7, "hubness correction sanity");

  // One target at the centroid of 50 queries; 50 extra pool words.
  {
    const Index n_queries = 50;
    const Index d = 10;
    Rng rng(71);
    EmbeddingSpace x;
    x.vectors.resize(100, d);
    for (Index i = 0; i < 100; ++i) {
      for (Index j = 0; j < d; ++j) x.vectors(i, j) = rng.next_normal();
      x.vocab.tokens.push_back("q" + std::to_string(i));
      x.vocab.rank.push_back(i);
    }
    x.vocab.rebuild_index();

    EmbeddingSpace y;
    y.vectors.resize(20, d);
    y.vectors.row(0) =
        x.vectors.topRows(n_queries).colwise().mean();
    for (Index t = 1; t < 20; ++t) {
      for (Index j = 0; j < d; ++j) {
        y.vectors(t, j) = 12.0 + 2.0 * rng.next_normal();
      }
    }
    for (Index t = 0; t < 20; ++t) {
      y.vocab.tokens.push_back("t" + std::to_string(t));
      y.vocab.rank.push_back(t);
    }
    y.vocab.rebuild_index();

    TransformMatrix identity;
    identity.t = Matrix::Identity(d, d);
    std::vector<Index> queries;
    for (Index i = 0; i < n_queries; ++i) queries.push_back(i);

    const Index top_k = 5;
    const auto plain_counts = hub_statistics(identity, queries, x, y, top_k,
                                             Metric::kEuclidean);
    const Index plain_max =
        *std::max_element(plain_counts.begin(), plain_counts.end());

    RetrievalConfig config;
    config.metric = Metric::kEuclidean;
    config.correction = Correction::kGlobalCorrection;
    config.gc_pool_size = 50;
    config.top_k = top_k;
    const auto gc_lists = gc_retrieve(identity, queries, x, y, config);
    const auto gc_counts = hub_counts_from_lists(gc_lists, y.size());
    const Index gc_max =
        *std::max_element(gc_counts.begin(), gc_counts.end());

    c.expect(plain_max == n_queries,
             "constructed hub not dominant without correction");
    c.expect(gc_max < plain_max, "correction did not reduce the max hub "
                                 "count (" + std::to_string(gc_max) + " vs " +
                                 std::to_string(plain_max) + ")");
    c.note("max hub count " + std::to_string(plain_max) + " -> " +
           std::to_string(gc_max));
  }

  // Exact rank-table oracle on 10 targets and 5 pivots.
  {
    const auto x = random_cloud(8, 4, 72);
    const auto y = random_cloud(10, 4, 73);
    TransformMatrix t;
    t.t = random_cloud(4, 4, 74).vectors;
    RetrievalConfig config;
    config.metric = Metric::kEuclidean;
    config.correction = Correction::kGlobalCorrection;
    config.gc_pool_size = 3;
    config.top_k = 10;
    const std::vector<Index> queries = {5, 2};
    const auto lists = gc_retrieve(t, queries, x, y, config);

    // Pivots: queries first, then the most frequent non-query words.
    const std::vector<Index> pivot_ids = {5, 2, 0, 1, 3};
    Matrix scores(5, 10);
    for (Index p = 0; p < 5; ++p) {
      const Eigen::RowVectorXd pv =
          (t.t * x.vectors.row(pivot_ids[p]).transpose()).transpose();
      for (Index tt = 0; tt < 10; ++tt) {
        scores(p, tt) = (y.vectors.row(tt) - pv).norm();
      }
    }
    bool match = true;
    for (Index qi = 0; qi < 2; ++qi) {
      std::vector<std::pair<std::pair<Index, double>, Index>> oracle;
      for (Index tt = 0; tt < 10; ++tt) {
        Index rank = 1;
        for (Index p = 0; p < 5; ++p) {
          if (p == qi) continue;
          if (scores(p, tt) < scores(qi, tt) ||
              (scores(p, tt) == scores(qi, tt) && p < qi)) {
            ++rank;
          }
        }
        oracle.push_back({{rank, scores(qi, tt)}, tt});
      }
      std::sort(oracle.begin(), oracle.end());
      for (Index r = 0; r < 10; ++r) {
        match = match && lists[qi][r].target_id == oracle[r].second;
      }
    }
    c.expect(match, "gc ranking deviates from the rank-table oracle");
  }

  c.finish();
}

// Criterion 8: frequency-band overlap on rank-consistent and rank-shuffled
// gold dictionaries.
void criterion_8() {
  Criterion c(8, "frequency-band overlap correctness");
  const auto instance = generate(100, 10, MapKind::kOrthogonal, 0.0, 81);
  const auto gold = gold_dictionary(instance);
  const Index band_size = 10;
  const Index n_bands = 10;

  const auto overlap = frequency_band_overlap(
      gold, instance.x.vocab, instance.y.vocab, band_size, n_bands);
  bool all_one = true;
  for (double f : overlap.fraction) all_one = all_one && f == 1.0;
  c.expect(all_one, "rank-consistent gold is not fully in-band");

  // Shuffle the gold targets across sources and compare against a direct
  // hand count.
  Rng rng(82);
  std::vector<std::string> sources;
  std::vector<std::string> targets;
  for (const auto& [s, ts] : gold.entries) {
    sources.push_back(s);
    targets.push_back(*ts.begin());
  }
  shuffle(targets, rng);
  BilingualDictionary shuffled;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    shuffled.add(sources[i], targets[i]);
  }
  const auto shuffled_overlap = frequency_band_overlap(
      shuffled, instance.x.vocab, instance.y.vocab, band_size, n_bands);

  std::vector<Index> numer(n_bands, 0);
  std::vector<Index> denom(n_bands, 0);
  for (const auto& [s, ts] : shuffled.entries) {
    const Index sid = instance.x.vocab.find(s);
    if (sid < 0) continue;
    const Index band = instance.x.vocab.rank[sid] / band_size;
    if (band >= n_bands) continue;
    bool in_band = false;
    bool in_vocab = false;
    for (const auto& t : ts) {
      const Index tid = instance.y.vocab.find(t);
      if (tid < 0) continue;
      in_vocab = true;
      in_band = in_band ||
                instance.y.vocab.rank[tid] / band_size == band;
    }
    if (!in_vocab) continue;
    ++denom[band];
    if (in_band) ++numer[band];
  }
  bool match = true;
  for (Index b = 0; b < n_bands; ++b) {
    match = match && shuffled_overlap.numerator[b] == numer[b] &&
            shuffled_overlap.denominator[b] == denom[b];
  }
  c.expect(match, "shuffled-gold overlap deviates from the hand count");
  c.finish();
}

// Criterion 9 (optional): small real-data smoke test. Point
// WORDMAP_REALDATA_DIR at a directory with source.vec, target.vec and
// gold.tsv to enable it.
void criterion_9() {
  Criterion c(9, "real-data smoke test");
  const char* dir = std::getenv("WORDMAP_REALDATA_DIR");
  if (dir == nullptr) {
    c.note("set WORDMAP_REALDATA_DIR to run; no network data in this "
           "environment");
    c.finish(/*skipped=*/true);
    return;
  }
  PipelineConfig config;
  config.source_path = (fs::path(dir) / "source.vec").string();
  config.target_path = (fs::path(dir) / "target.vec").string();
  config.gold_path = (fs::path(dir) / "gold.tsv").string();
  config.working_set_size = 2000;
  config.knn_grid = {10, 20, 30, 40, 50};
  config.im.restarts = 10;
  config.eval_k = {1, 5, 10};

  config.init = InitMethod::kSpectral;
  config.output_dir = (fs::temp_directory_path() /
                       "wordmap_acc9_spectral").string();
  const double p_spectral = run_pipeline(config).report->precision_at(10);
  config.init = InitMethod::kRandom;
  config.output_dir = (fs::temp_directory_path() /
                       "wordmap_acc9_random").string();
  const double p_random = run_pipeline(config).report->precision_at(10);
  c.expect(p_spectral > p_random,
           "spectral P@10 " + fmt(p_spectral) + " <= random P@10 " +
               fmt(p_random));
  c.note("P@10 spectral = " + fmt(p_spectral) +
         ", random = " + fmt(p_random));
  c.finish();
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (g_failures > 0) {
    std::cout << g_failures << " criterion(s) failed" << std::endl;
    return 1;
  }
  std::cout << "all criteria passed" << std::endl;
  return 0;
}
