#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "strata/graph_model.hpp"

namespace strata {

/// Partition of relation kinds into generational (target at least one layer
/// below source), co-level (endpoints share a layer) and free (no
/// constraint). Kinds not listed in either set are free.
struct HierarchySpec {
  std::set<std::string> generational_kinds{std::string(kParentOf)};
  std::set<std::string> co_level_kinds{std::string(kSpouseOf)};
  std::set<std::string> free_kinds{std::string(kGodparentOf)};

  /// Throws SpecError when the sets overlap.
  void check() const;
  bool is_generational(const std::string& kind) const { return generational_kinds.count(kind) != 0; }
  bool is_co_level(const std::string& kind) const { return co_level_kinds.count(kind) != 0; }
};

enum class CyclePolicy { reject, break_back_edges };

struct LayerAssignment {
  /// Layer per person, canonical order.
  std::vector<int> layer_of;
  int layer_count = 0;
  /// Relation indices dropped to make the generational graph acyclic
  /// (only under CyclePolicy::break_back_edges).
  std::vector<std::size_t> broken_relations;

  int layer(const GraphDataset& dataset, std::string_view id) const {
    return layer_of[dataset.require_index(id)];
  }
  friend bool operator==(const LayerAssignment&, const LayerAssignment&) = default;
};

/// Connected components of the co-level subgraph, each sorted canonically;
/// clusters ordered by their smallest member.
std::vector<std::vector<std::size_t>> co_level_clusters(const GraphDataset& dataset, const HierarchySpec& spec);

/// Longest-path layering of the cluster DAG induced by generational edges.
/// Throws SpecError for contradictory constraints and CycleError when the
/// generational graph is cyclic under CyclePolicy::reject.
LayerAssignment assign_layers(const GraphDataset& dataset, const HierarchySpec& spec = {},
                              CyclePolicy policy = CyclePolicy::reject);

/// Order-preserving relabeling onto [0, L) with no empty index.
LayerAssignment compact_layers(const LayerAssignment& raw);

}  // namespace strata
