#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <ostream>
#include <utility>
#include <vector>

#include "wordmap/common.hpp"
#include "wordmap/embedding.hpp"
#include "wordmap/mapping.hpp"
#include "wordmap/parallel.hpp"
#include "wordmap/random.hpp"

namespace wordmap {

enum class CandidateSet { kRealOnly, kRealPlusVirtual };

struct ImConfig {
  Index max_epochs = 200;
  std::uint64_t rng_seed = 0;
  Index restarts = 1;
  CandidateSet candidates = CandidateSet::kRealOnly;
  unsigned threads = 0;
};

struct ImTraceEntry {
  Index epoch = 0;  // 0 is the initial state
  double loss = 0.0;
  Index accepted_updates = 0;
};

struct ImResult {
  Mapping mapping;
  double final_loss = 0.0;
  std::vector<ImTraceEntry> trace;
  std::uint64_t restart_seed = 0;  // seed of the winning restart
  bool converged = false;          // a full epoch accepted no update
};

namespace detail {

// Target-space distance under a mapping: anything involving the virtual
// token is c, including virtual-to-virtual.
inline double target_distance(const Matrix& dy, TargetRef a, TargetRef b,
                              double c) {
  if (a.is_virtual() || b.is_virtual()) return c;
  return dy(a.id(), b.id());
}

inline void check_fully_assigned(const Mapping& m) {
  for (Index s = 0; s < m.size(); ++s) {
    if (!m.assignment[s].has_value()) {
      throw Error("mapping: source id " + std::to_string(s) +
                  " is unassigned");
    }
  }
}

}  // namespace detail

// Residual sum of squares over unordered source pairs p < q:
//   sum ( D_X(p, q) - D_Y(M(p), M(q)) )^2
inline double mapping_loss(const Matrix& dx, const Matrix& dy,
                           const Mapping& mapping) {
  const Index n = dx.rows();
  require(mapping.size() == n, "mapping_loss: mapping size mismatch");
  detail::check_fully_assigned(mapping);
  const double c = mapping.virtual_distance;
  double loss = 0.0;
  for (Index p = 0; p < n; ++p) {
    const TargetRef mp = *mapping.assignment[p];
    for (Index q = p + 1; q < n; ++q) {
      const double residual =
          dx(p, q) - detail::target_distance(dy, mp, *mapping.assignment[q], c);
      loss += residual * residual;
    }
  }
  return loss;
}

inline double mapping_loss(const EmbeddingSpace& x, const EmbeddingSpace& y,
                           const Mapping& mapping) {
  return mapping_loss(pairwise_distances(x), pairwise_distances(y), mapping);
}

// Loss change of reassigning `source` to `new_target`, touching only the
// n-1 pairs containing `source`. Exactly zero for a no-op reassignment.
inline double loss_delta(const Matrix& dx, const Matrix& dy,
                         const Mapping& mapping, Index source,
                         TargetRef new_target) {
  const Index n = dx.rows();
  require(mapping.size() == n, "loss_delta: mapping size mismatch");
  require(source >= 0 && source < n, "loss_delta: source id out of range");
  require(mapping.assignment[source].has_value(),
          "loss_delta: source id " + std::to_string(source) +
              " is unassigned");
  const double c = mapping.virtual_distance;
  const TargetRef current = *mapping.assignment[source];
  double delta = 0.0;
  for (Index q = 0; q < n; ++q) {
    if (q == source) continue;
    const auto& mq = mapping.assignment[q];
    require(mq.has_value(), "loss_delta: source id " + std::to_string(q) +
                                " is unassigned");
    const double target = dx(source, q);
    const double r_new =
        target - detail::target_distance(dy, new_target, *mq, c);
    const double r_old =
        target - detail::target_distance(dy, current, *mq, c);
    delta += r_new * r_new - r_old * r_old;
  }
  return delta;
}

inline double loss_delta(const EmbeddingSpace& x, const EmbeddingSpace& y,
                         const Mapping& mapping, Index source,
                         TargetRef new_target) {
  return loss_delta(pairwise_distances(x), pairwise_distances(y), mapping,
                    source, new_target);
}

// Every source gets an independently uniform random real target.
inline Mapping random_init(const EmbeddingSpace& x, const EmbeddingSpace& y,
                           std::uint64_t seed) {
  require(y.size() >= 1, "random_init: empty target space");
  Rng rng(seed);
  Mapping mapping = make_unassigned_mapping(x.size());
  for (Index s = 0; s < x.size(); ++s) {
    mapping.assignment[s] = TargetRef::real(
        static_cast<Index>(rng.next_index(static_cast<std::size_t>(y.size()))));
  }
  return mapping;
}

// Seed pairs -> full initial mapping: unmatched sources go to the virtual
// token at distance c (default: mean pairwise distance of the source set).
inline Mapping make_initial_mapping(Mapping seed_pairs, double c) {
  require(c > 0.0, "make_initial_mapping: virtual distance must be > 0");
  seed_pairs.virtual_distance = c;
  seed_pairs.fill_unassigned_with_virtual();
  return seed_pairs;
}

namespace detail {

struct ImEngine {
  const Matrix& dx;
  const Matrix& dy;
  CandidateSet candidates;
  unsigned threads;

  // Best candidate for `source`: strict minimum of the resulting loss, ties
  // to the lower target id. Scans are chunked over the candidate range; the
  // (delta, id) lexicographic merge is order-free, so the result matches a
  // sequential scan exactly.
  std::pair<double, TargetRef> best_move(const Mapping& m,
                                         const std::vector<Index>& real_of,
                                         Index source) const {
    const Index n = dx.rows();
    const Index m_targets = dy.rows();
    const double c = m.virtual_distance;
    const TargetRef current = *m.assignment[source];

    // Per-pair contribution of the current assignment, reused by every
    // candidate scan for this word.
    std::vector<double> current_terms(static_cast<std::size_t>(n), 0.0);
    for (Index q = 0; q < n; ++q) {
      if (q == source) continue;
      const double ty = real_of[q] >= 0
                            ? (current.is_virtual() ? c : dy(current.id(),
                                                            real_of[q]))
                            : c;
      const double r = dx(source, q) - ty;
      current_terms[q] = r * r;
    }

    struct Best {
      double delta = std::numeric_limits<double>::infinity();
      Index id = -1;  // -1 only while unset
      bool is_virtual = false;
    };

    const auto scan_candidate = [&](Index t, Best& best) {
      const double* dy_row = dy.data() + t * m_targets;
      double delta = 0.0;
      for (Index q = 0; q < n; ++q) {
        if (q == source) continue;
        const double ty = real_of[q] >= 0 ? dy_row[real_of[q]] : c;
        const double r = dx(source, q) - ty;
        delta += r * r - current_terms[q];
      }
      if (delta < best.delta) {
        best.delta = delta;
        best.id = t;
        best.is_virtual = false;
      }
    };

    const unsigned workers = resolve_thread_count(threads);
    Best best;
    if (workers <= 1 || m_targets < 256) {
      for (Index t = 0; t < m_targets; ++t) scan_candidate(t, best);
    } else {
      std::vector<Best> local(workers);
      const Index chunk =
          (m_targets + static_cast<Index>(workers) - 1) /
          static_cast<Index>(workers);
      parallel_for(
          static_cast<Index>(workers),
          [&](Index wb, Index we) {
            for (Index w = wb; w < we; ++w) {
              const Index begin = w * chunk;
              const Index end = std::min(m_targets, begin + chunk);
              for (Index t = begin; t < end; ++t) {
                scan_candidate(t, local[w]);
              }
            }
          },
          workers);
      for (const Best& b : local) {
        if (b.id < 0) continue;
        if (b.delta < best.delta ||
            (b.delta == best.delta && b.id < best.id)) {
          best = b;
        }
      }
    }

    if (candidates == CandidateSet::kRealPlusVirtual) {
      double delta = 0.0;
      for (Index q = 0; q < n; ++q) {
        if (q == source) continue;
        const double r = dx(source, q) - c;
        delta += r * r - current_terms[q];
      }
      // The virtual token loses ties against every real target.
      if (delta < best.delta) {
        best.delta = delta;
        best.id = -1;
        best.is_virtual = true;
      }
    }

    const TargetRef ref = best.is_virtual ? TargetRef::virtual_token()
                                          : TargetRef::real(best.id);
    return {best.delta, ref};
  }
};

}  // namespace detail

// One optimization run from a fixed initial mapping. Each epoch visits the
// sources in a fresh seeded random order; a word moves only to the strict
// loss minimizer over the candidate set. Stops after a full epoch with no
// accepted update, or at max_epochs.
inline ImResult im_optimize_single(const Matrix& dx, const Matrix& dy,
                                   const Mapping& init, const ImConfig& config,
                                   std::uint64_t epoch_seed) {
  const Index n = dx.rows();
  require(n == init.size(), "im_optimize: mapping size mismatch");
  require(dy.rows() >= 1, "im_optimize: empty target space");
  require(config.max_epochs >= 1, "im_optimize: max_epochs must be >= 1");
  detail::check_fully_assigned(init);

  ImResult result;
  result.mapping = init;
  result.restart_seed = epoch_seed;
  Mapping& m = result.mapping;

  // real_of[q]: target id of source q, or -1 for virtual. Mirror of the
  // assignment kept flat for the hot loop.
  std::vector<Index> real_of(static_cast<std::size_t>(n));
  for (Index q = 0; q < n; ++q) {
    real_of[q] = m.assignment[q]->is_virtual() ? -1 : m.assignment[q]->id();
  }

  detail::ImEngine engine{dx, dy, config.candidates, config.threads};

  // Running loss only ever decreases by accepted (strictly negative)
  // deltas, which keeps the trace non-increasing by construction.
  double running_loss = mapping_loss(dx, dy, m);
  result.trace.push_back({0, running_loss, 0});

  Rng order_rng(epoch_seed);
  for (Index epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const std::vector<Index> order = random_permutation(n, order_rng);
    Index accepted = 0;
    for (Index source : order) {
      auto [delta, target] = engine.best_move(m, real_of, source);
      if (delta < 0.0) {
        m.assignment[source] = target;
        real_of[source] = target.is_virtual() ? -1 : target.id();
        running_loss += delta;
        ++accepted;
      }
    }
    result.trace.push_back({epoch, running_loss, accepted});
    if (accepted == 0) {
      result.converged = true;
      break;
    }
  }

  result.final_loss = mapping_loss(dx, dy, m);
  return result;
}

// Restarts re-run the optimizer with epoch-order seeds rng_seed + r for
// r in 0..restarts-1 and keep the smallest final loss (first winner on ties).
inline ImResult im_optimize(const EmbeddingSpace& x, const EmbeddingSpace& y,
                            const Mapping& init, const ImConfig& config) {
  require(config.restarts >= 1, "im_optimize: restarts must be >= 1");
  const Matrix dx = pairwise_distances(x);
  const Matrix dy = pairwise_distances(y);
  ImResult best;
  bool have_best = false;
  for (Index r = 0; r < config.restarts; ++r) {
    ImResult run =
        im_optimize_single(dx, dy, init, config, config.rng_seed + r);
    if (!have_best || run.final_loss < best.final_loss) {
      best = std::move(run);
      have_best = true;
    }
  }
  return best;
}

// IM-Rand baseline: every restart draws its own uniform random initial
// assignment (seed rng_seed + r) before optimizing with that same seed.
inline ImResult im_optimize_random_init(const EmbeddingSpace& x,
                                        const EmbeddingSpace& y,
                                        double virtual_distance,
                                        const ImConfig& config) {
  require(config.restarts >= 1, "im_optimize: restarts must be >= 1");
  const Matrix dx = pairwise_distances(x);
  const Matrix dy = pairwise_distances(y);
  ImResult best;
  bool have_best = false;
  for (Index r = 0; r < config.restarts; ++r) {
    Mapping init = random_init(x, y, config.rng_seed + r);
    init.virtual_distance = virtual_distance;
    ImResult run =
        im_optimize_single(dx, dy, init, config, config.rng_seed + r);
    if (!have_best || run.final_loss < best.final_loss) {
      best = std::move(run);
      have_best = true;
    }
  }
  return best;
}

// Loss trace CSV: "epoch,loss,accepted_updates".
inline void save_trace_csv(const std::vector<ImTraceEntry>& trace,
                           std::ostream& out) {
  out << "epoch,loss,accepted_updates\n";
  for (const auto& entry : trace) {
    out << entry.epoch << ',' << format_significant(entry.loss, 17) << ','
        << entry.accepted_updates << '\n';
  }
}

}  // namespace wordmap
