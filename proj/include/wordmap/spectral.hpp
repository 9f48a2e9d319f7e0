#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "wordmap/common.hpp"
#include "wordmap/embedding.hpp"
#include "wordmap/mapping.hpp"
#include "wordmap/parallel.hpp"

namespace wordmap {

// Similarity bandwidth: mean off-diagonal neighborhood distance by default,
// or a fixed global value.
struct Bandwidth {
  static Bandwidth auto_tuned() { return Bandwidth{true, 0.0}; }
  static Bandwidth fixed(double sigma) {
    require(sigma > 0.0, "bandwidth: fixed sigma must be > 0");
    return Bandwidth{false, sigma};
  }

  bool is_auto = true;
  double value = 0.0;
};

// The knn neighborhood of one word: the word itself plus its k-1 nearest
// neighbors, with exact pairwise distances.
struct NeighborhoodGraph {
  std::vector<Index> member_ids;  // member_ids[0] is the center word
  Matrix distances;               // k x k, symmetric, zero diagonal
  double sigma = 1.0;
  bool degenerate = false;  // all members coincident; sigma fell back to 1
};

// Per-word feature rows: sorted (descending) eigenvalues of I - S where
// S holds the pairwise Gaussian similarities of the word's neighborhood.
struct SpectralFeatures {
  Index k = 0;
  Matrix features;  // n x k
};

inline double gaussian_similarity(double distance, double sigma) {
  require(distance >= 0.0, "gaussian_similarity: distance must be >= 0");
  require(sigma > 0.0, "gaussian_similarity: sigma must be > 0");
  return std::exp(-(distance * distance) / (2.0 * sigma * sigma));
}

namespace detail {

// k-1 nearest neighbors of `word` given one row of a distance matrix,
// ties broken by lower id. Returns the member list with the word first.
inline std::vector<Index> select_members(const double* dist_row, Index n,
                                         Index word, Index k) {
  std::vector<Index> others;
  others.reserve(n - 1);
  for (Index j = 0; j < n; ++j) {
    if (j != word) others.push_back(j);
  }
  const auto closer = [&](Index a, Index b) {
    if (dist_row[a] != dist_row[b]) return dist_row[a] < dist_row[b];
    return a < b;
  };
  std::partial_sort(others.begin(), others.begin() + (k - 1), others.end(),
                    closer);
  std::vector<Index> members;
  members.reserve(k);
  members.push_back(word);
  members.insert(members.end(), others.begin(), others.begin() + (k - 1));
  return members;
}

template <typename DistanceFn>
NeighborhoodGraph graph_from_members(std::vector<Index> members,
                                     DistanceFn&& distance,
                                     const Bandwidth& bandwidth) {
  const Index k = static_cast<Index>(members.size());
  NeighborhoodGraph graph;
  graph.member_ids = std::move(members);
  graph.distances.resize(k, k);
  double off_diag_sum = 0.0;
  for (Index a = 0; a < k; ++a) {
    graph.distances(a, a) = 0.0;
    for (Index b = a + 1; b < k; ++b) {
      const double d = distance(graph.member_ids[a], graph.member_ids[b]);
      graph.distances(a, b) = d;
      graph.distances(b, a) = d;
      off_diag_sum += d;
    }
  }
  if (bandwidth.is_auto) {
    const double pairs = static_cast<double>(k) * (k - 1) / 2.0;
    const double sigma = pairs > 0.0 ? off_diag_sum / pairs : 0.0;
    if (sigma > 0.0) {
      graph.sigma = sigma;
    } else {
      graph.sigma = 1.0;
      graph.degenerate = true;
    }
  } else {
    graph.sigma = bandwidth.value;
  }
  return graph;
}

}  // namespace detail

inline NeighborhoodGraph build_neighborhood(const EmbeddingSpace& space,
                                            Index word, Index k,
                                            const Bandwidth& bandwidth) {
  const Index n = space.size();
  require(word >= 0 && word < n, "build_neighborhood: word id out of range");
  require(k >= 2 && k <= n,
          "build_neighborhood: k out of range (k=" + std::to_string(k) +
              ", n=" + std::to_string(n) + ")");
  std::vector<double> dist_row(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    dist_row[j] = (space.vectors.row(word) - space.vectors.row(j)).norm();
  }
  std::vector<Index> members =
      detail::select_members(dist_row.data(), n, word, k);
  return detail::graph_from_members(
      std::move(members),
      [&](Index a, Index b) {
        return (space.vectors.row(a) - space.vectors.row(b)).norm();
      },
      bandwidth);
}

// Eigenvalues of I - S, sorted descending. Invariant under permutation of
// member order; rows sum to zero because the diagonal of I - S vanishes.
inline Vector spectral_embedding(const NeighborhoodGraph& graph) {
  const Index k = graph.distances.rows();
  require(k >= 1 && graph.distances.cols() == k,
          "spectral_embedding: invalid neighborhood");
  Eigen::MatrixXd laplacian(k, k);
  for (Index a = 0; a < k; ++a) {
    for (Index b = 0; b < k; ++b) {
      const double s = gaussian_similarity(graph.distances(a, b), graph.sigma);
      laplacian(a, b) = (a == b ? 1.0 : 0.0) - s;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.compute(laplacian, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    const Index center = graph.member_ids.empty() ? -1 : graph.member_ids[0];
    throw Error("spectral_embedding: eigensolver failed to converge (word " +
                std::to_string(center) + ")");
  }
  return solver.eigenvalues().reverse();
}

// One feature row per word. Parallel over words; per-word results do not
// depend on the partition, so output is identical to a sequential run.
inline SpectralFeatures spectral_features(const EmbeddingSpace& space,
                                          Index k, const Bandwidth& bandwidth,
                                          unsigned threads = 0) {
  const Index n = space.size();
  require(k >= 2 && k <= n,
          "spectral_features: k out of range (k=" + std::to_string(k) +
              ", n=" + std::to_string(n) + ")");
  const Matrix all_distances = pairwise_distances(space);

  SpectralFeatures result;
  result.k = k;
  result.features.resize(n, k);
  parallel_for(
      n,
      [&](Index begin, Index end) {
        for (Index w = begin; w < end; ++w) {
          try {
            std::vector<Index> members = detail::select_members(
                all_distances.data() + w * n, n, w, k);
            NeighborhoodGraph graph = detail::graph_from_members(
                std::move(members),
                [&](Index a, Index b) { return all_distances(a, b); },
                bandwidth);
            result.features.row(w) = spectral_embedding(graph).transpose();
          } catch (const Error& e) {
            throw Error("spectral_features: word " + std::to_string(w) +
                        " (\"" + space.vocab.tokens[w] + "\"): " + e.what());
          }
        }
      },
      threads);
  return result;
}

// Seed pairs across two feature spaces: (p, q) is kept only when p and q are
// each other's nearest neighbor (Euclidean over feature rows, ties to the
// lower id). Everything else stays unassigned.
inline Mapping mutual_nn_pairs(const SpectralFeatures& src,
                               const SpectralFeatures& tgt,
                               unsigned threads = 0) {
  require(src.k == tgt.k, "mutual_nn_pairs: feature dimension mismatch (" +
                              std::to_string(src.k) + " vs " +
                              std::to_string(tgt.k) + ")");
  const Index n = src.features.rows();
  const Index m = tgt.features.rows();
  require(n > 0 && m > 0, "mutual_nn_pairs: empty feature matrix");

  // Squared distances give the same argmin and exact tie behavior.
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

  std::vector<Index> nn_of_src(static_cast<std::size_t>(n));
  std::vector<Index> nn_of_tgt(static_cast<std::size_t>(m));
  parallel_for(
      n,
      [&](Index begin, Index end) {
        for (Index i = begin; i < end; ++i) {
          nn_of_src[i] = nearest(src.features, i, tgt.features);
        }
      },
      threads);
  parallel_for(
      m,
      [&](Index begin, Index end) {
        for (Index j = begin; j < end; ++j) {
          nn_of_tgt[j] = nearest(tgt.features, j, src.features);
        }
      },
      threads);

  Mapping mapping = make_unassigned_mapping(n);
  for (Index i = 0; i < n; ++i) {
    const Index j = nn_of_src[i];
    if (nn_of_tgt[j] == i) mapping.assignment[i] = TargetRef::real(j);
  }
  return mapping;
}

// CSV export: token plus the k eigenvalues, 9 significant digits.
inline void save_features_csv(const SpectralFeatures& features,
                              const Vocabulary& vocab, std::ostream& out) {
  require(features.features.rows() == vocab.size(),
          "save_features_csv: vocabulary size mismatch");
  out << "token";
  for (Index j = 0; j < features.k; ++j) out << ",e" << (j + 1);
  out << '\n';
  for (Index i = 0; i < features.features.rows(); ++i) {
    out << vocab.tokens[i];
    for (Index j = 0; j < features.k; ++j) {
      out << ',' << format_significant(features.features(i, j), 9);
    }
    out << '\n';
  }
}

}  // namespace wordmap
