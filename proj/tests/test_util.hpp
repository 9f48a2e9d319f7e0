#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "wordmap/embedding.hpp"
#include "wordmap/random.hpp"

namespace testutil {

// Space with tokens w0..w{n-1}, rank = id, given row vectors.
inline wordmap::EmbeddingSpace make_space(const wordmap::Matrix& vectors,
                                          char prefix = 'w') {
  wordmap::EmbeddingSpace space;
  space.vectors = vectors;
  for (wordmap::Index i = 0; i < vectors.rows(); ++i) {
    space.vocab.tokens.push_back(std::string(1, prefix) + std::to_string(i));
    space.vocab.rank.push_back(i);
  }
  space.vocab.rebuild_index();
  return space;
}

inline wordmap::EmbeddingSpace random_space(wordmap::Index n, wordmap::Index d,
                                            std::uint64_t seed,
                                            char prefix = 'w') {
  wordmap::Rng rng(seed);
  wordmap::Matrix m(n, d);
  for (wordmap::Index i = 0; i < n; ++i) {
    for (wordmap::Index j = 0; j < d; ++j) m(i, j) = rng.next_normal();
  }
  return make_space(m, prefix);
}

inline std::string word2vec_text(const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& line : lines) {
    text += line;
    text += '\n';
  }
  return text;
}

inline wordmap::EmbeddingSpace load_from_string(const std::string& text,
                                                wordmap::Index limit = -1) {
  std::istringstream in(text);
  return wordmap::load_embeddings(in, limit);
}

}  // namespace testutil
