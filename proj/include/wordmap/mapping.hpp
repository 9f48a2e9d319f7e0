#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string_view>
#include <utility>
#include <vector>

#include "wordmap/common.hpp"
#include "wordmap/embedding.hpp"

namespace wordmap {

// Marker used in mapping TSV files for virtual-token assignments.
inline constexpr std::string_view kVirtualMarker = "__VIRTUAL__";

// A target word id or the virtual token.
class TargetRef {
 public:
  static TargetRef real(Index target_id) { return TargetRef(target_id); }
  static TargetRef virtual_token() { return TargetRef(kVirtual); }

  bool is_virtual() const { return value_ == kVirtual; }

  Index id() const {
    require(!is_virtual(), "TargetRef::id on virtual token");
    return value_;
  }

  friend bool operator==(TargetRef a, TargetRef b) {
    return a.value_ == b.value_;
  }

 private:
  static constexpr Index kVirtual = -1;
  explicit TargetRef(Index v) : value_(v) {}
  Index value_;
};

// Assignment from source ids to targets. Partial mappings (seed pairs)
// leave sources unassigned; the optimizer requires full assignment.
// Many-to-one is allowed. virtual_distance is the distance c attributed to
// the virtual token, including virtual-to-virtual.
struct Mapping {
  std::vector<std::optional<TargetRef>> assignment;
  double virtual_distance = 1.0;

  Index size() const { return static_cast<Index>(assignment.size()); }

  bool fully_assigned() const {
    for (const auto& a : assignment) {
      if (!a.has_value()) return false;
    }
    return true;
  }

  Index assigned_count() const {
    Index count = 0;
    for (const auto& a : assignment) count += a.has_value() ? 1 : 0;
    return count;
  }

  // (source id, target id) for every real assignment.
  std::vector<std::pair<Index, Index>> real_pairs() const {
    std::vector<std::pair<Index, Index>> pairs;
    for (Index s = 0; s < size(); ++s) {
      const auto& a = assignment[s];
      if (a.has_value() && !a->is_virtual()) pairs.emplace_back(s, a->id());
    }
    return pairs;
  }

  void fill_unassigned_with_virtual() {
    for (auto& a : assignment) {
      if (!a.has_value()) a = TargetRef::virtual_token();
    }
  }
};

inline Mapping make_unassigned_mapping(Index n_sources) {
  Mapping m;
  m.assignment.resize(static_cast<std::size_t>(n_sources));
  return m;
}

// TSV: "<source_token>\t<target_token>" per assigned source; virtual
// assignments use the __VIRTUAL__ marker; unassigned sources are omitted.
inline void save_mapping_tsv(const Mapping& mapping, const Vocabulary& src,
                             const Vocabulary& tgt, std::ostream& out) {
  require(mapping.size() == src.size(),
          "save_mapping_tsv: mapping/vocabulary size mismatch");
  for (Index s = 0; s < mapping.size(); ++s) {
    const auto& a = mapping.assignment[s];
    if (!a.has_value()) continue;
    out << src.tokens[s] << '\t';
    if (a->is_virtual()) {
      out << kVirtualMarker;
    } else {
      out << tgt.tokens[a->id()];
    }
    out << '\n';
  }
}

inline Mapping load_mapping_tsv(std::istream& in, const Vocabulary& src,
                                const Vocabulary& tgt) {
  Mapping mapping = make_unassigned_mapping(src.size());
  std::string line;
  Index line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error("mapping line " + std::to_string(line_number) +
                  ": expected <source>\\t<target>");
    }
    const std::string source = line.substr(0, tab);
    const std::string target = line.substr(tab + 1);
    const Index s = src.find(source);
    if (s < 0) {
      throw Error("mapping line " + std::to_string(line_number) +
                  ": unknown source token \"" + source + "\"");
    }
    if (mapping.assignment[s].has_value()) {
      throw Error("mapping line " + std::to_string(line_number) +
                  ": duplicate source token \"" + source + "\"");
    }
    if (target == kVirtualMarker) {
      mapping.assignment[s] = TargetRef::virtual_token();
    } else {
      const Index t = tgt.find(target);
      if (t < 0) {
        throw Error("mapping line " + std::to_string(line_number) +
                    ": unknown target token \"" + target + "\"");
      }
      mapping.assignment[s] = TargetRef::real(t);
    }
  }
  return mapping;
}

}  // namespace wordmap
