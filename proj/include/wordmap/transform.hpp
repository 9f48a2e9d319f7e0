#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wordmap/common.hpp"
#include "wordmap/embedding.hpp"
#include "wordmap/parallel.hpp"

namespace wordmap {

enum class Metric { kEuclidean, kCosine };
enum class Correction { kNone, kGlobalCorrection };

inline std::string to_string(Metric m) {
  return m == Metric::kEuclidean ? "euclidean" : "cosine";
}

inline std::string to_string(Correction c) {
  return c == Correction::kNone ? "none" : "global-correction";
}

inline Metric metric_from_string(std::string_view s) {
  if (s == "euclidean") return Metric::kEuclidean;
  if (s == "cosine") return Metric::kCosine;
  throw Error("unknown metric: " + std::string(s));
}

inline Correction correction_from_string(std::string_view s) {
  if (s == "none") return Correction::kNone;
  if (s == "global-correction" || s == "gc") return Correction::kGlobalCorrection;
  throw Error("unknown correction: " + std::string(s));
}

// Linear map from source into target space, with the least-squares
// objective value at the solution.
struct TransformMatrix {
  Matrix t;  // d_t x d_s
  double fit_residual = 0.0;

  Index target_dim() const { return t.rows(); }
  Index source_dim() const { return t.cols(); }
};

struct RetrievalConfig {
  Metric metric = Metric::kCosine;
  Correction correction = Correction::kNone;
  Index gc_pool_size = 5000;
  Index top_k = 10;
  unsigned threads = 0;
};

// One retrieved target. score is the raw metric value: Euclidean distance
// (smaller is better) or cosine similarity (larger is better).
struct Translation {
  Index target_id = -1;
  double score = 0.0;
};

// Minimum-norm least-squares fit of T mapping source vectors onto their
// paired target vectors. Rank deficiency is handled by the complete
// orthogonal decomposition rather than rejected.
inline TransformMatrix fit_linear(
    const std::vector<std::pair<Index, Index>>& pairs,
    const EmbeddingSpace& x, const EmbeddingSpace& y) {
  require(!pairs.empty(), "fit_linear: empty pair list");
  const Index n = static_cast<Index>(pairs.size());
  Eigen::MatrixXd a(n, x.dim());
  Eigen::MatrixXd b(n, y.dim());
  for (Index i = 0; i < n; ++i) {
    const auto [s, t] = pairs[static_cast<std::size_t>(i)];
    require(s >= 0 && s < x.size(), "fit_linear: source id out of range");
    require(t >= 0 && t < y.size(), "fit_linear: target id out of range");
    a.row(i) = x.vectors.row(s);
    b.row(i) = y.vectors.row(t);
  }
  require(a.allFinite() && b.allFinite(), "fit_linear: non-finite vectors");

  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a);
  Eigen::MatrixXd t_transposed = cod.solve(b);  // d_s x d_t, minimum norm

  TransformMatrix result;
  result.t = t_transposed.transpose();
  result.fit_residual = (a * t_transposed - b).squaredNorm();
  return result;
}

// Ablation variant: the best orthogonal map (Procrustes). Requires equal
// dimensions; the unconstrained fit above is the default everywhere.
inline TransformMatrix fit_procrustes(
    const std::vector<std::pair<Index, Index>>& pairs,
    const EmbeddingSpace& x, const EmbeddingSpace& y) {
  require(!pairs.empty(), "fit_procrustes: empty pair list");
  require(x.dim() == y.dim(),
          "fit_procrustes: source and target dimensions must match");
  const Index n = static_cast<Index>(pairs.size());
  Eigen::MatrixXd a(n, x.dim());
  Eigen::MatrixXd b(n, y.dim());
  for (Index i = 0; i < n; ++i) {
    const auto [s, t] = pairs[static_cast<std::size_t>(i)];
    require(s >= 0 && s < x.size(), "fit_procrustes: source id out of range");
    require(t >= 0 && t < y.size(), "fit_procrustes: target id out of range");
    a.row(i) = x.vectors.row(s);
    b.row(i) = y.vectors.row(t);
  }
  require(a.allFinite() && b.allFinite(), "fit_procrustes: non-finite vectors");

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      b.transpose() * a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TransformMatrix result;
  result.t = svd.matrixU() * svd.matrixV().transpose();
  result.fit_residual = (a * result.t.transpose() - b).squaredNorm();
  return result;
}

namespace detail {

struct ScoreContext {
  const Matrix& targets;
  Vector target_norms;  // only filled for cosine
  Metric metric;

  explicit ScoreContext(const Matrix& y, Metric m) : targets(y), metric(m) {
    if (metric == Metric::kCosine) {
      target_norms = targets.rowwise().norm();
    }
  }

  // Raw metric score of target t for the (already transformed) query row.
  template <typename Derived>
  double score(const Eigen::MatrixBase<Derived>& query, double query_norm,
               Index t) const {
    if (metric == Metric::kEuclidean) {
      return (targets.row(t) - query).norm();
    }
    const double denom = query_norm * target_norms(t);
    if (denom == 0.0) return 0.0;
    return targets.row(t).dot(query) / denom;
  }

  // True when score a beats score b under this metric.
  bool better(double a, double b) const {
    return metric == Metric::kEuclidean ? a < b : a > b;
  }
};

inline std::vector<Translation> rank_targets(const ScoreContext& ctx,
                                             const Eigen::RowVectorXd& query,
                                             Index top_k) {
  const Index m = ctx.targets.rows();
  const double query_norm = query.norm();
  std::vector<Translation> all(static_cast<std::size_t>(m));
  for (Index t = 0; t < m; ++t) {
    all[t] = Translation{t, ctx.score(query, query_norm, t)};
  }
  const auto ahead = [&](const Translation& a, const Translation& b) {
    if (a.score != b.score) return ctx.better(a.score, b.score);
    return a.target_id < b.target_id;
  };
  std::partial_sort(all.begin(), all.begin() + top_k, all.end(), ahead);
  all.resize(static_cast<std::size_t>(top_k));
  return all;
}

}  // namespace detail

// Nearest-neighbor retrieval of the transformed query, no hubness
// correction. Ties broken by lower target id.
inline std::vector<std::vector<Translation>> translate_many(
    const TransformMatrix& transform, const std::vector<Index>& source_ids,
    const EmbeddingSpace& x, const EmbeddingSpace& y,
    const RetrievalConfig& config) {
  require(config.top_k >= 1 && config.top_k <= y.size(),
          "translate: top_k out of range");
  require(transform.source_dim() == x.dim() &&
              transform.target_dim() == y.dim(),
          "translate: transform dimensions do not match the spaces");
  detail::ScoreContext ctx(y.vectors, config.metric);
  std::vector<std::vector<Translation>> results(source_ids.size());
  parallel_for(
      static_cast<Index>(source_ids.size()),
      [&](Index begin, Index end) {
        for (Index i = begin; i < end; ++i) {
          const Index s = source_ids[static_cast<std::size_t>(i)];
          require(s >= 0 && s < x.size(),
                  "translate: source id out of range");
          const Eigen::RowVectorXd query =
              (transform.t * x.vectors.row(s).transpose()).transpose();
          results[i] = detail::rank_targets(ctx, query, config.top_k);
        }
      },
      config.threads);
  return results;
}

inline std::vector<Translation> translate(const TransformMatrix& transform,
                                          Index source_id,
                                          const EmbeddingSpace& x,
                                          const EmbeddingSpace& y,
                                          const RetrievalConfig& config) {
  return translate_many(transform, {source_id}, x, y, config).front();
}

// Globally corrected retrieval: the pivot set is the transformed queries
// plus the gc_pool_size most frequent source words outside the query set.
// Each target ranks all pivots by raw similarity (ties to the lower pivot
// index); a target's corrected score for a query is the query's rank in
// that list. Targets are returned by ascending corrected rank, ties by raw
// metric, then lower id.
inline std::vector<std::vector<Translation>> gc_retrieve(
    const TransformMatrix& transform, const std::vector<Index>& query_ids,
    const EmbeddingSpace& x, const EmbeddingSpace& y,
    const RetrievalConfig& config) {
  require(!query_ids.empty(), "gc_retrieve: empty query list");
  require(config.top_k >= 1 && config.top_k <= y.size(),
          "gc_retrieve: top_k out of range");
  require(config.gc_pool_size >= 0, "gc_retrieve: negative pool size");

  const Index n_queries = static_cast<Index>(query_ids.size());
  std::vector<char> is_query(static_cast<std::size_t>(x.size()), 0);
  for (Index s : query_ids) {
    require(s >= 0 && s < x.size(), "gc_retrieve: query id out of range");
    is_query[static_cast<std::size_t>(s)] = 1;
  }

  // Pool: most frequent source words not in the query set.
  std::vector<Index> pivot_sources = query_ids;
  {
    Index added = 0;
    for (Index id : x.vocab.ids_by_rank()) {
      if (added == config.gc_pool_size) break;
      if (is_query[static_cast<std::size_t>(id)]) continue;
      pivot_sources.push_back(id);
      ++added;
    }
    if (added < config.gc_pool_size) {
      throw Error("gc_retrieve: pivot pool exhausted (need " +
                  std::to_string(config.gc_pool_size) + ", have " +
                  std::to_string(added) + " non-query source words)");
    }
  }

  const Index n_pivots = static_cast<Index>(pivot_sources.size());
  Matrix pivots(n_pivots, y.dim());
  for (Index p = 0; p < n_pivots; ++p) {
    pivots.row(p) =
        (transform.t * x.vectors.row(pivot_sources[p]).transpose())
            .transpose();
  }

  detail::ScoreContext ctx(y.vectors, config.metric);
  Vector pivot_norms = pivots.rowwise().norm();

  const Index m = y.size();
  // corrected_rank(q, t) and raw score(q, t) for the query pivots only.
  Matrix corrected(n_queries, m);
  Matrix raw(n_queries, m);
  parallel_for(
      m,
      [&](Index begin, Index end) {
        std::vector<double> scores(static_cast<std::size_t>(n_pivots));
        for (Index t = begin; t < end; ++t) {
          for (Index p = 0; p < n_pivots; ++p) {
            scores[p] = ctx.score(pivots.row(p), pivot_norms(p), t);
          }
          for (Index qi = 0; qi < n_queries; ++qi) {
            Index rank = 1;
            for (Index p = 0; p < n_pivots; ++p) {
              if (p == qi) continue;
              if (ctx.better(scores[p], scores[qi]) ||
                  (scores[p] == scores[qi] && p < qi)) {
                ++rank;
              }
            }
            corrected(qi, t) = static_cast<double>(rank);
            raw(qi, t) = scores[qi];
          }
        }
      },
      config.threads);

  std::vector<std::vector<Translation>> results(
      static_cast<std::size_t>(n_queries));
  for (Index qi = 0; qi < n_queries; ++qi) {
    std::vector<Index> order(static_cast<std::size_t>(m));
    for (Index t = 0; t < m; ++t) order[t] = t;
    const auto ahead = [&](Index a, Index b) {
      if (corrected(qi, a) != corrected(qi, b)) {
        return corrected(qi, a) < corrected(qi, b);
      }
      if (raw(qi, a) != raw(qi, b)) {
        return ctx.better(raw(qi, a), raw(qi, b));
      }
      return a < b;
    };
    std::partial_sort(order.begin(), order.begin() + config.top_k,
                      order.end(), ahead);
    auto& out = results[static_cast<std::size_t>(qi)];
    out.reserve(static_cast<std::size_t>(config.top_k));
    for (Index r = 0; r < config.top_k; ++r) {
      out.push_back(Translation{order[r], raw(qi, order[r])});
    }
  }
  return results;
}

// For each target, how many of the sampled queries contain it in their
// top-k list under plain (uncorrected) retrieval.
inline std::vector<Index> hub_statistics(const TransformMatrix& transform,
                                         const std::vector<Index>& sample,
                                         const EmbeddingSpace& x,
                                         const EmbeddingSpace& y, Index k,
                                         Metric metric = Metric::kCosine,
                                         unsigned threads = 0) {
  RetrievalConfig config;
  config.metric = metric;
  config.correction = Correction::kNone;
  config.top_k = k;
  config.threads = threads;
  const auto lists = translate_many(transform, sample, x, y, config);
  std::vector<Index> counts(static_cast<std::size_t>(y.size()), 0);
  for (const auto& list : lists) {
    for (const auto& entry : list) {
      ++counts[static_cast<std::size_t>(entry.target_id)];
    }
  }
  return counts;
}

// Hub counts over precomputed ranked lists (e.g. gc_retrieve output).
inline std::vector<Index> hub_counts_from_lists(
    const std::vector<std::vector<Translation>>& lists, Index n_targets) {
  std::vector<Index> counts(static_cast<std::size_t>(n_targets), 0);
  for (const auto& list : lists) {
    for (const auto& entry : list) {
      ++counts[static_cast<std::size_t>(entry.target_id)];
    }
  }
  return counts;
}

// TSV rows "<source_token>\t<rank>\t<target_token>\t<score>", rank 1-based.
inline void save_translations_tsv(
    const std::vector<std::string>& query_tokens,
    const std::vector<std::vector<Translation>>& lists,
    const Vocabulary& tgt_vocab, std::ostream& out) {
  require(query_tokens.size() == lists.size(),
          "save_translations_tsv: query/list count mismatch");
  for (std::size_t i = 0; i < lists.size(); ++i) {
    for (std::size_t r = 0; r < lists[i].size(); ++r) {
      const Translation& entry = lists[i][r];
      out << query_tokens[i] << '\t' << (r + 1) << '\t'
          << tgt_vocab.tokens[entry.target_id] << '\t'
          << format_significant(entry.score, 9) << '\n';
    }
  }
}

// Text format: "<d_t> <d_s>" then d_t rows of d_s values, 9 significant
// digits.
inline void save_transform(const TransformMatrix& transform,
                           std::ostream& out) {
  out << transform.target_dim() << ' ' << transform.source_dim() << '\n';
  for (Index i = 0; i < transform.target_dim(); ++i) {
    for (Index j = 0; j < transform.source_dim(); ++j) {
      if (j > 0) out << ' ';
      out << format_significant(transform.t(i, j), 9);
    }
    out << '\n';
  }
}

inline TransformMatrix load_transform(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error("transform header: empty stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto fields = detail::split_fields(line);
  Index rows = 0;
  Index cols = 0;
  if (fields.size() != 2 || !parse_index(fields[0], rows) ||
      !parse_index(fields[1], cols) || rows <= 0 || cols <= 0) {
    throw Error("transform header: expected \"<d_t> <d_s>\"");
  }
  TransformMatrix transform;
  transform.t.resize(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    if (!std::getline(in, line)) {
      throw Error("transform row " + std::to_string(i + 1) +
                  ": unexpected end of stream");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto row_fields = detail::split_fields(line);
    if (static_cast<Index>(row_fields.size()) != cols) {
      throw Error("transform row " + std::to_string(i + 1) +
                  ": expected " + std::to_string(cols) + " values");
    }
    for (Index j = 0; j < cols; ++j) {
      double value = 0.0;
      if (!parse_double(row_fields[static_cast<std::size_t>(j)], value) ||
          !std::isfinite(value)) {
        throw Error("transform row " + std::to_string(i + 1) +
                    ": unparseable value");
      }
      transform.t(i, j) = value;
    }
  }
  return transform;
}

}  // namespace wordmap
