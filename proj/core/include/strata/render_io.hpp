#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "strata/analysis.hpp"
#include "strata/force_engine.hpp"
#include "strata/graph_model.hpp"

namespace strata {

struct EdgeStyle {
  std::string stroke = "#444444";
  double width = 1.5;
  std::string dasharray;  // empty: solid

  friend bool operator==(const EdgeStyle&, const EdgeStyle&) = default;
};

enum class LabelVisibility { all, hover_only_metadata, none };

struct StyleSpec {
  double node_radius = 6.0;
  /// parent_of solid, spouse_of thick, godparent_of dashed.
  std::map<std::string, EdgeStyle> edge_styles{
      {"parent_of", {"#444444", 1.5, ""}},
      {"spouse_of", {"#444444", 3.5, ""}},
      {"godparent_of", {"#444444", 1.5, "6 4"}},
  };
  /// Used for kinds missing from edge_styles.
  EdgeStyle fallback_edge{"#777777", 1.5, "2 3"};
  LabelVisibility label_visibility = LabelVisibility::all;
  double font_size = 11.0;

  const EdgeStyle& style_for(const std::string& kind) const;
};

/// Coordinate text: fixed 3 decimals, round-half-even on the exact binary
/// value, "-0.000" normalised to "0.000".
std::string format_coord(double value);
/// `value` rounded to the 3-decimal grid used by every export.
double round_coord(double value);

/// SVG 1.1 document: one <line class="edge ..."> per relation and one
/// <circle> per person, in canonical order. Byte-deterministic.
std::string to_svg(const Layout& layout, const GraphDataset& dataset, const StyleSpec& style = {});

struct ModeExport {
  const Layout* layout = nullptr;
  const QualityReport* report = nullptr;
};

/// Layout interchange document with sorted keys:
///   { "dataset": {...}, "modes": { "<mode>": { "positions": [{"id","x","y"}],
///     "layers"?: {...}, "config": {...}, "report"?: {...}, ... } },
///     "comparison"?: {...} }
/// The comparison section appears only when both modes are present.
std::string export_layout_json(const GraphDataset& dataset, const std::vector<ModeExport>& modes,
                               const std::optional<std::string>& comparison_table = std::nullopt);

struct ImportedLayouts {
  GraphDataset dataset;
  std::vector<Layout> layouts;
  std::vector<std::optional<QualityReport>> reports;
};

/// Inverse of export_layout_json (coordinates at their exported precision).
/// Throws SyntaxError / SchemaError.
ImportedLayouts import_layout_json(std::string_view text, const KindRegistry& registry = {});

/// { "ticks": [ {"tick", "alpha", "positions": [...], "snap"?: true} ] }.
/// Throws TraceMissingError when the layout carries no trace.
std::string export_trace(const Layout& layout, const GraphDataset& dataset);

/// Applies a JSON object of LayoutConfig field overrides (same keys as the
/// exported "config" section). Unknown or mistyped fields throw SchemaError.
LayoutConfig apply_config_overrides(LayoutConfig base, std::string_view overrides_json);
std::string config_to_json(const LayoutConfig& config);

/// Deterministic, key-sorted report document.
std::string report_to_json(const QualityReport& report);

}  // namespace strata
