#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "wordmap/common.hpp"
#include "wordmap/embedding.hpp"
#include "wordmap/eval.hpp"
#include "wordmap/mapping.hpp"
#include "wordmap/random.hpp"

namespace wordmap {

enum class MapKind { kOrthogonal, kGeneralLinear };
enum class CloudShape { kGaussian, kClustered };

inline std::string to_string(MapKind kind) {
  return kind == MapKind::kOrthogonal ? "orthogonal" : "general-linear";
}

inline MapKind map_kind_from_string(std::string_view s) {
  if (s == "orthogonal") return MapKind::kOrthogonal;
  if (s == "general-linear" || s == "linear") return MapKind::kGeneralLinear;
  throw Error("unknown map kind: " + std::string(s));
}

inline std::string to_string(CloudShape shape) {
  return shape == CloudShape::kGaussian ? "gaussian" : "clustered";
}

inline CloudShape cloud_shape_from_string(std::string_view s) {
  if (s == "gaussian") return CloudShape::kGaussian;
  if (s == "clustered") return CloudShape::kClustered;
  throw Error("unknown cloud shape: " + std::string(s));
}

// A ground-truth alignment problem: a source cloud X and a target copy
// Y = T X + noise whose rows sit in a hidden random order. Frequency ranks
// of corresponding words agree, mirroring the cross-lingual rank
// consistency the mapping pipeline relies on.
struct SynthInstance {
  EmbeddingSpace x;
  EmbeddingSpace y;
  std::vector<Index> true_map;  // source id -> target id
  Matrix generator_t;           // the applied d x d map
  double noise_level = 0.0;     // std relative to mean pairwise distance

  std::uint64_t seed = 0;
  MapKind map_kind = MapKind::kOrthogonal;
  CloudShape cloud = CloudShape::kGaussian;

  nlohmann::json manifest() const {
    nlohmann::json j;
    j["n"] = x.size();
    j["d"] = x.dim();
    j["map_kind"] = to_string(map_kind);
    j["cloud"] = to_string(cloud);
    j["noise_level"] = noise_level;
    j["seed"] = seed;
    return j;
  }
};

namespace detail {

inline std::string synth_token(char prefix, Index index, Index total) {
  int width = 4;
  for (Index v = total; v >= 10000; v /= 10) ++width;
  std::string digits = std::to_string(index + 1);
  std::string token(1, prefix);
  token.append(static_cast<std::size_t>(width) - std::min<std::size_t>(
                   digits.size(), static_cast<std::size_t>(width)),
               '0');
  token += digits;
  return token;
}

// Haar-uniform orthogonal matrix: QR of a Gaussian matrix with the R
// diagonal signs folded into Q.
inline Matrix haar_orthogonal(Index d, Rng& rng) {
  Eigen::MatrixXd g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) g(i, j) = rng.next_normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < d; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

}  // namespace detail

inline SynthInstance generate(Index n, Index d, MapKind map_kind,
                              double noise_level, std::uint64_t seed,
                              CloudShape cloud = CloudShape::kGaussian) {
  require(n >= 2 && d >= 1, "generate: need n >= 2 and d >= 1");
  require(noise_level >= 0.0, "generate: noise_level must be >= 0");
  // Independent sub-streams per phase, so e.g. the hidden permutation of a
  // seed does not depend on whether noise was drawn.
  Rng cloud_rng(derive_seed(seed, 1));
  Rng map_rng(derive_seed(seed, 2));
  Rng noise_rng(derive_seed(seed, 3));
  Rng perm_rng(derive_seed(seed, 4));

  SynthInstance instance;
  instance.seed = seed;
  instance.map_kind = map_kind;
  instance.cloud = cloud;
  instance.noise_level = noise_level;

  // Source cloud. Clustered mode places Gaussian blobs around spread-out
  // centers, which is closer to how real embedding spaces group by meaning.
  Matrix x(n, d);
  if (cloud == CloudShape::kGaussian) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) x(i, j) = cloud_rng.next_normal();
    }
  } else {
    const Index n_clusters = std::min<Index>(10, n);
    Matrix centers(n_clusters, d);
    for (Index c = 0; c < n_clusters; ++c) {
      for (Index j = 0; j < d; ++j) {
        centers(c, j) = 3.0 * cloud_rng.next_normal();
      }
    }
    for (Index i = 0; i < n; ++i) {
      const Index c = static_cast<Index>(
          cloud_rng.next_index(static_cast<std::size_t>(n_clusters)));
      for (Index j = 0; j < d; ++j) {
        x(i, j) = centers(c, j) + 0.5 * cloud_rng.next_normal();
      }
    }
  }

  if (map_kind == MapKind::kOrthogonal) {
    instance.generator_t = detail::haar_orthogonal(d, map_rng);
  } else {
    instance.generator_t.resize(d, d);
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        instance.generator_t(i, j) = map_rng.next_normal();
      }
    }
  }

  Matrix mapped = x * instance.generator_t.transpose();

  if (noise_level > 0.0) {
    double mean_distance = 0.0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) {
        mean_distance += (mapped.row(i) - mapped.row(j)).norm();
      }
    }
    mean_distance /=
        static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    const double sigma = noise_level * mean_distance;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < d; ++j) {
        mapped(i, j) += sigma * noise_rng.next_normal();
      }
    }
  }

  instance.true_map = random_permutation(n, perm_rng);

  instance.x.vectors = std::move(x);
  instance.x.vocab.tokens.reserve(n);
  for (Index i = 0; i < n; ++i) {
    instance.x.vocab.tokens.push_back(detail::synth_token('s', i, n));
    instance.x.vocab.rank.push_back(i);
  }
  instance.x.vocab.rebuild_index();

  // Target rows live at permuted positions; ranks are stored explicitly so
  // that rank(target of source i) == rank(source i) == i.
  instance.y.vectors.resize(n, d);
  instance.y.vocab.tokens.resize(static_cast<std::size_t>(n));
  instance.y.vocab.rank.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const Index target = instance.true_map[static_cast<std::size_t>(i)];
    instance.y.vectors.row(target) = mapped.row(i);
    instance.y.vocab.rank[static_cast<std::size_t>(target)] = i;
  }
  for (Index j = 0; j < n; ++j) {
    instance.y.vocab.tokens[static_cast<std::size_t>(j)] =
        detail::synth_token('t', j, n);
  }
  instance.y.vocab.rebuild_index();

  return instance;
}

inline BilingualDictionary gold_dictionary(const SynthInstance& instance) {
  BilingualDictionary dict;
  for (Index i = 0; i < instance.x.size(); ++i) {
    const Index target = instance.true_map[static_cast<std::size_t>(i)];
    dict.add(instance.x.vocab.tokens[i], instance.y.vocab.tokens[target]);
  }
  return dict;
}

// The true mapping as a Mapping over source ids (for loss oracles).
inline Mapping true_mapping(const SynthInstance& instance,
                            double virtual_distance = 1.0) {
  Mapping m = make_unassigned_mapping(instance.x.size());
  m.virtual_distance = virtual_distance;
  for (Index i = 0; i < instance.x.size(); ++i) {
    m.assignment[i] =
        TargetRef::real(instance.true_map[static_cast<std::size_t>(i)]);
  }
  return m;
}

// Writes <dir>/{source.vec,target.vec,gold.tsv,manifest.json}.
inline void save_instance(const SynthInstance& instance,
                          const std::string& dir) {
  {
    std::ofstream out(dir + "/source.vec");
    require(out.good(), "save_instance: cannot write " + dir + "/source.vec");
    save_embeddings(instance.x, out);
  }
  {
    std::ofstream out(dir + "/target.vec");
    require(out.good(), "save_instance: cannot write " + dir + "/target.vec");
    save_embeddings(instance.y, out);
  }
  {
    std::ofstream out(dir + "/gold.tsv");
    require(out.good(), "save_instance: cannot write " + dir + "/gold.tsv");
    save_dictionary_tsv(gold_dictionary(instance), out);
  }
  {
    std::ofstream out(dir + "/manifest.json");
    require(out.good(),
            "save_instance: cannot write " + dir + "/manifest.json");
    out << instance.manifest().dump(2) << '\n';
  }
}

}  // namespace wordmap
