#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "wordmap/common.hpp"

namespace wordmap {

// Frequency-ranked vocabulary. Word ids are dense 0..n-1; rank is a
// permutation of 0..n-1 with 0 = most frequent. For spaces loaded from file
// the two coincide; synthetic spaces may decouple them.
struct Vocabulary {
  std::vector<std::string> tokens;  // index = word id
  std::vector<Index> rank;          // word id -> frequency rank

  Index size() const { return static_cast<Index>(tokens.size()); }

  // -1 when the token is unknown.
  Index find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? Index{-1} : it->second;
  }

  bool contains(std::string_view token) const { return find(token) >= 0; }

  Index require_id(std::string_view token) const {
    Index id = find(token);
    if (id < 0) throw Error("unknown token: " + std::string(token));
    return id;
  }

  // Word ids ordered by ascending rank.
  std::vector<Index> ids_by_rank() const {
    std::vector<Index> by_rank(tokens.size());
    for (Index id = 0; id < size(); ++id) by_rank[rank[id]] = id;
    return by_rank;
  }

  void rebuild_index() {
    index_.clear();
    index_.reserve(tokens.size());
    for (Index id = 0; id < size(); ++id) index_.emplace(tokens[id], id);
  }

 private:
  std::unordered_map<std::string, Index> index_;
};

// Immutable after construction; safe for concurrent readers.
struct EmbeddingSpace {
  Vocabulary vocab;
  Matrix vectors;  // n x d, row i = embedding of word id i

  // For subsets: id -> id in the originally loaded space. Empty for roots.
  std::vector<Index> origin_ids;

  Index size() const { return vectors.rows(); }
  Index dim() const { return vectors.cols(); }

  Index origin_of(Index id) const {
    return origin_ids.empty() ? id : origin_ids[id];
  }
};

enum class NormalizeMode { kNone, kUnitLength, kCenterThenUnit };

inline std::string to_string(NormalizeMode mode) {
  switch (mode) {
    case NormalizeMode::kNone: return "none";
    case NormalizeMode::kUnitLength: return "unit-length";
    case NormalizeMode::kCenterThenUnit: return "center-then-unit";
  }
  return "none";
}

inline NormalizeMode normalize_mode_from_string(std::string_view s) {
  if (s == "none") return NormalizeMode::kNone;
  if (s == "unit-length" || s == "unit") return NormalizeMode::kUnitLength;
  if (s == "center-then-unit" || s == "center-unit")
    return NormalizeMode::kCenterThenUnit;
  throw Error("unknown normalize mode: " + std::string(s));
}

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t next = line.find(' ', pos);
    if (next == std::string_view::npos) {
      fields.push_back(line.substr(pos));
      break;
    }
    fields.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return fields;
}

}  // namespace detail

// Reads word2vec text format: header "<n> <d>", then one "<token> <v1> ...
// <vd>" line per word, single-space separated. File order defines frequency
// rank. With a limit only the first min(limit, n) entries are read.
inline EmbeddingSpace load_embeddings(std::istream& in, Index limit = -1) {
  require(limit != 0 && limit >= -1, "load_embeddings: limit must be >= 1");
  std::string line;
  if (!std::getline(in, line)) throw Error("embedding header: empty stream");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  Index n = 0;
  Index d = 0;
  {
    auto fields = detail::split_fields(line);
    if (fields.size() != 2 || !parse_index(fields[0], n) ||
        !parse_index(fields[1], d) || n < 0 || d <= 0) {
      throw Error("embedding header: expected \"<n> <d>\", got \"" + line +
                  "\"");
    }
  }

  const Index count = limit < 0 ? n : std::min(limit, n);
  EmbeddingSpace space;
  space.vocab.tokens.reserve(count);
  space.vectors.resize(count, d);
  std::unordered_map<std::string, Index> seen;
  seen.reserve(static_cast<std::size_t>(count));

  for (Index i = 0; i < count; ++i) {
    const Index line_number = i + 2;  // 1-based, header is line 1
    if (!std::getline(in, line)) {
      throw Error("embedding line " + std::to_string(line_number) +
                  ": unexpected end of stream");
    }
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = detail::split_fields(line);
    if (static_cast<Index>(fields.size()) != d + 1) {
      throw Error("embedding line " + std::to_string(line_number) +
                  ": expected " + std::to_string(d + 1) + " fields, got " +
                  std::to_string(fields.size()));
    }
    if (fields[0].empty()) {
      throw Error("embedding line " + std::to_string(line_number) +
                  ": empty token");
    }
    std::string token(fields[0]);
    if (!seen.emplace(token, i).second) {
      throw Error("embedding line " + std::to_string(line_number) +
                  ": duplicate token \"" + token + "\"");
    }
    for (Index j = 0; j < d; ++j) {
      double value = 0.0;
      if (!parse_double(fields[static_cast<std::size_t>(j) + 1], value)) {
        throw Error("embedding line " + std::to_string(line_number) +
                    ": unparseable value \"" +
                    std::string(fields[static_cast<std::size_t>(j) + 1]) +
                    "\"");
      }
      if (!std::isfinite(value)) {
        throw Error("embedding line " + std::to_string(line_number) +
                    ": non-finite value for token \"" + token + "\"");
      }
      space.vectors(i, j) = value;
    }
    space.vocab.tokens.push_back(std::move(token));
    space.vocab.rank.push_back(i);
  }
  space.vocab.rebuild_index();
  return space;
}

// Writes word2vec text format in frequency-rank order (the format carries
// ranks implicitly, so rank order is what round-trips them).
inline void save_embeddings(const EmbeddingSpace& space, std::ostream& out,
                            int significant_digits = 6) {
  out << space.size() << ' ' << space.dim() << '\n';
  for (Index id : space.vocab.ids_by_rank()) {
    out << space.vocab.tokens[id];
    for (Index j = 0; j < space.dim(); ++j) {
      out << ' ' << format_significant(space.vectors(id, j),
                                       significant_digits);
    }
    out << '\n';
  }
}

inline EmbeddingSpace normalize(const EmbeddingSpace& space,
                                NormalizeMode mode) {
  EmbeddingSpace out = space;
  if (mode == NormalizeMode::kNone) return out;
  if (mode == NormalizeMode::kCenterThenUnit && out.size() > 0) {
    Eigen::RowVectorXd mean = out.vectors.colwise().mean();
    out.vectors.rowwise() -= mean;
  }
  for (Index i = 0; i < out.size(); ++i) {
    const double norm = out.vectors.row(i).norm();
    if (norm == 0.0) {
      throw Error("normalize: zero vector for token \"" +
                  out.vocab.tokens[i] + "\"");
    }
    out.vectors.row(i) /= norm;
  }
  return out;
}

// The n lowest-rank words, renumbered 0..n-1 in rank order. origin_ids maps
// back to the originally loaded space, so nested subsets stay translatable.
inline EmbeddingSpace top_subset(const EmbeddingSpace& space, Index n) {
  require(n >= 1 && n <= space.size(),
          "top_subset: n out of range (n=" + std::to_string(n) + ", vocab=" +
              std::to_string(space.size()) + ")");
  const std::vector<Index> by_rank = space.vocab.ids_by_rank();
  EmbeddingSpace out;
  out.vocab.tokens.reserve(n);
  out.vectors.resize(n, space.dim());
  out.origin_ids.reserve(n);
  for (Index new_id = 0; new_id < n; ++new_id) {
    const Index old_id = by_rank[new_id];
    out.vocab.tokens.push_back(space.vocab.tokens[old_id]);
    out.vocab.rank.push_back(new_id);
    out.vectors.row(new_id) = space.vectors.row(old_id);
    out.origin_ids.push_back(space.origin_of(old_id));
  }
  out.vocab.rebuild_index();
  return out;
}

// Full pairwise Euclidean distance matrix (symmetric, zero diagonal).
inline Matrix pairwise_distances(const EmbeddingSpace& space) {
  const Index n = space.size();
  Matrix dist(n, n);
  for (Index i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (Index j = i + 1; j < n; ++j) {
      const double d = (space.vectors.row(i) - space.vectors.row(j)).norm();
      dist(i, j) = d;
      dist(j, i) = d;
    }
  }
  return dist;
}

inline double mean_pairwise_distance(const Matrix& distances) {
  const Index n = distances.rows();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) sum += distances(i, j);
  }
  return sum / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

}  // namespace wordmap
