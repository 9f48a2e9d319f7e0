#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wordmap/common.hpp"
#include "wordmap/embedding.hpp"
#include "wordmap/random.hpp"
#include "wordmap/transform.hpp"

namespace wordmap {

// Gold translations: source token -> acceptable target tokens. Ordered
// containers keep every traversal deterministic.
struct BilingualDictionary {
  std::map<std::string, std::set<std::string>> entries;

  Index size() const { return static_cast<Index>(entries.size()); }

  void add(const std::string& source, const std::string& target) {
    entries[source].insert(target);
  }

  const std::set<std::string>* find(const std::string& source) const {
    auto it = entries.find(source);
    return it == entries.end() ? nullptr : &it->second;
  }
};

// TSV: "<source>\t<target>", repeated sources merge into one entry.
inline BilingualDictionary load_dictionary_tsv(std::istream& in) {
  BilingualDictionary dict;
  std::string line;
  Index line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw Error("dictionary line " + std::to_string(line_number) +
                  ": expected <source>\\t<target>");
    }
    dict.add(line.substr(0, tab), line.substr(tab + 1));
  }
  return dict;
}

inline void save_dictionary_tsv(const BilingualDictionary& dict,
                                std::ostream& out) {
  for (const auto& [source, targets] : dict.entries) {
    for (const auto& target : targets) {
      out << source << '\t' << target << '\n';
    }
  }
}

struct EvalReport {
  std::vector<Index> k_values;
  std::vector<double> precision;  // parallel to k_values
  Index n_test = 0;               // scored test words
  Index n_excluded = 0;           // skipped (missing from gold or vocabulary)
  nlohmann::json settings;        // provenance: metric, correction, seed, ...

  double precision_at(Index k) const {
    for (std::size_t i = 0; i < k_values.size(); ++i) {
      if (k_values[i] == k) return precision[i];
    }
    throw Error("EvalReport: no precision recorded for k=" +
                std::to_string(k));
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["n_test"] = n_test;
    j["n_excluded"] = n_excluded;
    j["settings"] = settings;
    nlohmann::json prec = nlohmann::json::object();
    for (std::size_t i = 0; i < k_values.size(); ++i) {
      prec[std::to_string(k_values[i])] = precision[i];
    }
    j["precision_at_k"] = prec;
    return j;
  }

  // CSV rows "k,precision".
  void save_csv(std::ostream& out) const {
    out << "k,precision\n";
    for (std::size_t i = 0; i < k_values.size(); ++i) {
      out << k_values[i] << ',' << format_significant(precision[i], 9)
          << '\n';
    }
  }
};

inline const std::vector<Index>& default_k_values() {
  static const std::vector<Index> k_values = {1, 5, 10, 20, 50, 100};
  return k_values;
}

// Fraction of test words whose top-k predictions hit any gold translation.
// predictions: (source token, ranked target tokens). Sources missing from
// the gold dictionary are excluded and counted, not scored.
inline EvalReport precision_at_k(
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        predictions,
    const BilingualDictionary& gold, std::vector<Index> k_values) {
  require(!k_values.empty(), "precision_at_k: no k values");
  for (Index k : k_values) require(k >= 1, "precision_at_k: k must be >= 1");
  std::sort(k_values.begin(), k_values.end());

  EvalReport report;
  report.k_values = k_values;
  report.precision.assign(k_values.size(), 0.0);

  std::vector<Index> hits(k_values.size(), 0);
  for (const auto& [source, ranked] : predictions) {
    const auto* gold_targets = gold.find(source);
    if (gold_targets == nullptr) {
      ++report.n_excluded;
      continue;
    }
    ++report.n_test;
    // First rank (1-based) at which a gold target appears, if any.
    Index first_hit = -1;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      if (gold_targets->count(ranked[r]) > 0) {
        first_hit = static_cast<Index>(r) + 1;
        break;
      }
    }
    if (first_hit < 0) continue;
    for (std::size_t i = 0; i < k_values.size(); ++i) {
      if (first_hit <= k_values[i]) ++hits[i];
    }
  }
  if (report.n_test > 0) {
    for (std::size_t i = 0; i < k_values.size(); ++i) {
      report.precision[i] =
          static_cast<double>(hits[i]) / static_cast<double>(report.n_test);
    }
  }
  return report;
}

struct BandOverlap {
  Index band_size = 0;
  std::vector<double> fraction;   // per band
  std::vector<Index> numerator;   // sources with an in-band translation
  std::vector<Index> denominator; // sources with any in-vocabulary target

  void save_csv(std::ostream& out) const {
    out << "band,fraction,numerator,denominator\n";
    for (std::size_t b = 0; b < fraction.size(); ++b) {
      out << b << ',' << format_significant(fraction[b], 9) << ','
          << numerator[b] << ',' << denominator[b] << '\n';
    }
  }
};

// Per frequency band, the fraction of gold source words with at least one
// translation in the same band of the target vocabulary. Sources without
// any in-vocabulary translation are left out of the denominator.
inline BandOverlap frequency_band_overlap(const BilingualDictionary& gold,
                                          const Vocabulary& src_vocab,
                                          const Vocabulary& tgt_vocab,
                                          Index band_size, Index n_bands) {
  require(band_size >= 1 && n_bands >= 1,
          "frequency_band_overlap: band configuration must be positive");
  require(band_size * n_bands <= src_vocab.size() &&
              band_size * n_bands <= tgt_vocab.size(),
          "frequency_band_overlap: band configuration exceeds vocabulary");

  BandOverlap overlap;
  overlap.band_size = band_size;
  overlap.fraction.assign(static_cast<std::size_t>(n_bands), 0.0);
  overlap.numerator.assign(static_cast<std::size_t>(n_bands), 0);
  overlap.denominator.assign(static_cast<std::size_t>(n_bands), 0);

  for (const auto& [source, targets] : gold.entries) {
    const Index sid = src_vocab.find(source);
    if (sid < 0) continue;
    const Index src_rank = src_vocab.rank[sid];
    const Index band = src_rank / band_size;
    if (band >= n_bands) continue;

    bool any_in_vocab = false;
    bool any_in_band = false;
    for (const auto& target : targets) {
      const Index tid = tgt_vocab.find(target);
      if (tid < 0) continue;
      any_in_vocab = true;
      const Index tgt_rank = tgt_vocab.rank[tid];
      if (tgt_rank / band_size == band) {
        any_in_band = true;
        break;
      }
    }
    if (!any_in_vocab) continue;
    ++overlap.denominator[static_cast<std::size_t>(band)];
    if (any_in_band) ++overlap.numerator[static_cast<std::size_t>(band)];
  }

  for (std::size_t b = 0; b < overlap.fraction.size(); ++b) {
    overlap.fraction[b] =
        overlap.denominator[b] > 0
            ? static_cast<double>(overlap.numerator[b]) /
                  static_cast<double>(overlap.denominator[b])
            : 0.0;
  }
  return overlap;
}

namespace detail {

// Ranked token lists for the given source tokens; sources missing from the
// vocabulary get an empty list (scored as excluded later only if also
// missing from gold; otherwise as misses).
inline std::vector<std::pair<std::string, std::vector<std::string>>>
predict_tokens(const TransformMatrix& transform,
               const std::vector<std::string>& sources,
               const EmbeddingSpace& x, const EmbeddingSpace& y,
               const RetrievalConfig& config) {
  std::vector<Index> ids;
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const Index id = x.vocab.find(sources[i]);
    if (id >= 0) {
      ids.push_back(id);
      positions.push_back(i);
    }
  }
  const auto lists =
      config.correction == Correction::kGlobalCorrection
          ? gc_retrieve(transform, ids, x, y, config)
          : translate_many(transform, ids, x, y, config);

  std::vector<std::pair<std::string, std::vector<std::string>>> predictions;
  predictions.reserve(sources.size());
  for (const auto& source : sources) {
    predictions.emplace_back(source, std::vector<std::string>{});
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto& tokens = predictions[positions[i]].second;
    tokens.reserve(lists[i].size());
    for (const auto& entry : lists[i]) {
      tokens.push_back(y.vocab.tokens[entry.target_id]);
    }
  }
  return predictions;
}

}  // namespace detail

// Fits T on the train pairs and scores precision@k on the held-out test
// sources against the gold dictionary.
inline EvalReport supervised_baseline(
    const std::vector<std::pair<std::string, std::string>>& train,
    const EmbeddingSpace& x, const EmbeddingSpace& y,
    const std::vector<std::string>& test, const BilingualDictionary& gold,
    std::vector<Index> k_values, RetrievalConfig config) {
  require(!test.empty(), "supervised_baseline: empty test set");
  {
    std::set<std::string> train_sources;
    for (const auto& [s, t] : train) train_sources.insert(s);
    for (const auto& s : test) {
      if (train_sources.count(s) > 0) {
        throw Error("supervised_baseline: test source \"" + s +
                    "\" appears in the training pairs");
      }
    }
  }

  std::vector<std::pair<Index, Index>> id_pairs;
  Index dropped = 0;
  for (const auto& [s, t] : train) {
    const Index sid = x.vocab.find(s);
    const Index tid = y.vocab.find(t);
    if (sid < 0 || tid < 0) {
      ++dropped;
      continue;
    }
    id_pairs.emplace_back(sid, tid);
  }
  require(!id_pairs.empty(),
          "supervised_baseline: no in-vocabulary training pairs");

  const TransformMatrix transform = fit_linear(id_pairs, x, y);
  std::sort(k_values.begin(), k_values.end());
  config.top_k = std::min<Index>(k_values.back(), y.size());

  auto predictions = detail::predict_tokens(transform, test, x, y, config);
  EvalReport report = precision_at_k(predictions, gold, k_values);
  report.settings["metric"] = to_string(config.metric);
  report.settings["correction"] = to_string(config.correction);
  report.settings["n_train_pairs"] = static_cast<Index>(id_pairs.size());
  report.settings["n_train_dropped_oov"] = dropped;
  report.settings["fit_residual"] = transform.fit_residual;
  return report;
}

// One (source, target) pair per usable gold entry, sampled without
// replacement. A source is usable when it is in the source vocabulary and
// has at least one in-vocabulary target; the target is drawn uniformly
// among its in-vocabulary gold targets.
inline std::vector<std::pair<std::string, std::string>> sample_dictionary(
    const BilingualDictionary& gold, const EmbeddingSpace& x,
    const EmbeddingSpace& y, Index size, Rng& rng) {
  std::vector<std::pair<std::string, std::vector<std::string>>> usable;
  for (const auto& [source, targets] : gold.entries) {
    if (!x.vocab.contains(source)) continue;
    std::vector<std::string> in_vocab;
    for (const auto& t : targets) {
      if (y.vocab.contains(t)) in_vocab.push_back(t);
    }
    if (in_vocab.empty()) continue;
    usable.emplace_back(source, std::move(in_vocab));
  }
  require(size >= 1 && size <= static_cast<Index>(usable.size()),
          "sample_dictionary: requested " + std::to_string(size) +
              " pairs, only " + std::to_string(usable.size()) + " usable");

  std::vector<std::size_t> order(usable.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(order, rng);

  std::vector<std::pair<std::string, std::string>> pairs;
  pairs.reserve(static_cast<std::size_t>(size));
  for (Index i = 0; i < size; ++i) {
    const auto& [source, targets] = usable[order[static_cast<std::size_t>(i)]];
    pairs.emplace_back(source, targets[rng.next_index(targets.size())]);
  }
  return pairs;
}

// Replaces the targets of ceil(rho * n) sampled pairs with uniformly random
// in-vocabulary tokens that are wrong for that source (not among any of its
// gold targets).
inline std::vector<std::pair<std::string, std::string>> corrupt_pairs(
    std::vector<std::pair<std::string, std::string>> pairs,
    const BilingualDictionary& gold, const EmbeddingSpace& y, double rho,
    Rng& rng) {
  require(rho >= 0.0 && rho <= 1.0, "corrupt_pairs: rho must be in [0, 1]");
  const Index n = static_cast<Index>(pairs.size());
  const Index n_corrupt = static_cast<Index>(
      std::ceil(rho * static_cast<double>(n) - 1e-12));
  if (n_corrupt == 0) return pairs;

  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  shuffle(order, rng);

  for (Index i = 0; i < n_corrupt; ++i) {
    auto& [source, target] = pairs[order[static_cast<std::size_t>(i)]];
    const auto* gold_targets = gold.find(source);
    for (int attempts = 0; ; ++attempts) {
      require(attempts < 10000,
              "corrupt_pairs: cannot find a wrong target for \"" + source +
                  "\"");
      const Index tid = static_cast<Index>(
          rng.next_index(static_cast<std::size_t>(y.size())));
      const std::string& candidate = y.vocab.tokens[tid];
      if (gold_targets != nullptr && gold_targets->count(candidate) > 0) {
        continue;
      }
      target = candidate;
      break;
    }
  }
  return pairs;
}

struct SensitivityCell {
  Index size = 0;
  double noise = 0.0;
  std::uint64_t cell_seed = 0;
  EvalReport report;
};

struct SensitivityGrid {
  std::vector<SensitivityCell> cells;

  // CSV rows "size,noise,k,precision".
  void save_csv(std::ostream& out) const {
    out << "size,noise,k,precision\n";
    for (const auto& cell : cells) {
      for (std::size_t i = 0; i < cell.report.k_values.size(); ++i) {
        out << cell.size << ',' << format_significant(cell.noise, 9) << ','
            << cell.report.k_values[i] << ','
            << format_significant(cell.report.precision[i], 9) << '\n';
      }
    }
  }
};

// Dictionary size / noise sweep. Each cell samples `size` gold pairs with
// its own derived seed, corrupts a ceil(rho*size) subset, fits, and scores
// the remaining gold sources, so cells are reproducible independently of
// execution order.
inline SensitivityGrid dictionary_sensitivity(
    const EmbeddingSpace& x, const EmbeddingSpace& y,
    const BilingualDictionary& gold, const std::vector<Index>& sizes,
    const std::vector<double>& noise_levels, std::uint64_t seed,
    const std::vector<Index>& k_values, const RetrievalConfig& config) {
  require(!sizes.empty() && !noise_levels.empty(),
          "dictionary_sensitivity: empty grid");
  SensitivityGrid grid;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    for (std::size_t ni = 0; ni < noise_levels.size(); ++ni) {
      const std::uint64_t cell_seed = derive_seed(seed, si, ni);
      Rng rng(cell_seed);
      auto pairs = sample_dictionary(gold, x, y, sizes[si], rng);
      pairs = corrupt_pairs(std::move(pairs), gold, y, noise_levels[ni], rng);

      std::set<std::string> train_sources;
      for (const auto& [s, t] : pairs) train_sources.insert(s);
      std::vector<std::string> test;
      for (const auto& [source, targets] : gold.entries) {
        if (train_sources.count(source) > 0) continue;
        if (!x.vocab.contains(source)) continue;
        const bool any_target = std::any_of(
            targets.begin(), targets.end(),
            [&](const std::string& t) { return y.vocab.contains(t); });
        if (any_target) test.push_back(source);
      }

      SensitivityCell cell;
      cell.size = sizes[si];
      cell.noise = noise_levels[ni];
      cell.cell_seed = cell_seed;
      cell.report = supervised_baseline(pairs, x, y, test, gold, k_values,
                                        config);
      cell.report.settings["cell_seed"] = cell_seed;
      cell.report.settings["size"] = sizes[si];
      cell.report.settings["noise"] = noise_levels[ni];
      grid.cells.push_back(std::move(cell));
    }
  }
  return grid;
}

}  // namespace wordmap
