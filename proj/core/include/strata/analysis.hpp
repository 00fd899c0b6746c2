#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "strata/force_engine.hpp"
#include "strata/geometry.hpp"
#include "strata/graph_model.hpp"
#include "strata/layering.hpp"

namespace strata {

// ---------------------------------------------------------------------------
// Layout quality

/// Unordered relation pairs whose straight segments cross. Pairs sharing a
/// person never count. A proper crossing counts once, and so does a pair of
/// collinear segments overlapping along a positive length; touching at a
/// single point does not count. Orientation tests run in exact integer
/// arithmetic on coordinates quantised to 1e-9 units; a point within 1e-7
/// segment lengths of a line is treated as on it.
std::int64_t edge_crossings(std::span<const Vec2> positions, const GraphDataset& dataset);

/// Unordered node pairs with centre distance < 2 * radius - 1e-9.
std::int64_t node_overlaps(std::span<const Vec2> positions, double radius);

/// Mean over same-component pairs of ((|p_i - p_j| - L g_ij) / (L g_ij))^2,
/// g_ij = hop distance over all relations. 0 when no such pair exists.
double stress(std::span<const Vec2> positions, const GraphDataset& dataset, double ideal_edge);

/// max |y - band centre| over all nodes.
double layer_violation(std::span<const Vec2> positions, const LayerAssignment& assignment, double band_height,
                       double margin);

// ---------------------------------------------------------------------------
// Structure and exploration queries

/// Articulation points of the undirected multigraph over all relations,
/// in canonical order.
std::vector<std::string> bridge_nodes(const GraphDataset& dataset);

/// Relation count per person, ignoring direction.
std::vector<std::size_t> degrees(const GraphDataset& dataset);

/// Persons of maximum degree, canonical order. Empty for an empty dataset.
std::vector<std::string> most_connected(const GraphDataset& dataset);

/// Persons related to both `a` and `b` (any kind, any direction), excluding
/// `a` and `b`, canonical order. Throws UnknownNodeError; std::invalid_argument
/// when a == b.
std::vector<std::string> common_neighbors(const GraphDataset& dataset, std::string_view a, std::string_view b);

struct Snapshot {
  GraphDataset dataset;
  /// Persons kept only because a life date is missing.
  std::size_t undated_included = 0;
};

/// Persons alive in `year` (missing dates are inclusive) and the relations
/// among them, canonical order preserved.
Snapshot snapshot_at_year(const GraphDataset& dataset, int year);

// ---------------------------------------------------------------------------
// Reports

struct QualityReport {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::int64_t edge_crossings = 0;
  std::int64_t node_overlaps = 0;
  double stress = 0.0;
  std::optional<double> layer_violation;
  std::vector<std::string> bridge_nodes;
  LayoutMode mode = LayoutMode::force_directed;
  std::int64_t runtime_ms = 0;
};

/// All metrics for one layout. `assignment` enables layer_violation;
/// overlaps use the config's collision radius, stress its default link
/// length.
QualityReport quality_report(const Layout& layout, const GraphDataset& dataset,
                             const LayerAssignment* assignment = nullptr, std::int64_t runtime_ms = 0);

struct Comparison {
  Layout force_directed;
  Layout force_layered;
  QualityReport directed_report;
  QualityReport layered_report;
  /// Aligned plain-text table, one row per metric.
  std::string table;
};

/// Runs both modes on one dataset with a shared seed and reports every
/// metric for each. layer_violation is measured against the layered
/// assignment in both reports.
Comparison compare_report(const GraphDataset& dataset, const LayoutConfig& config_fd, const LayoutConfig& config_fl,
                          const HierarchySpec& spec = {}, CyclePolicy policy = CyclePolicy::reject);

/// Deterministic text table for two reports (runtime is left out).
std::string comparison_table(const QualityReport& fd, const QualityReport& fl);

}  // namespace strata
