#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strata/geometry.hpp"
#include "strata/graph_model.hpp"
#include "strata/layering.hpp"
#include "strata/prng.hpp"

namespace strata {

enum class LayoutMode { force_directed, force_layered };

/// "force_directed" / "force_layered".
std::string_view to_string(LayoutMode mode) noexcept;
/// Accepts both the underscore and the dashed spelling.
std::optional<LayoutMode> parse_layout_mode(std::string_view text) noexcept;

/// Simulation parameters. Every constant is an overridable default.
struct LayoutConfig {
  LayoutMode mode = LayoutMode::force_directed;
  std::uint64_t seed = 0;
  double canvas_width = 1200.0;
  /// Only used in force_directed mode; layered height is derived from the
  /// layer count.
  double canvas_height = 800.0;
  double band_height = 120.0;
  double margin = 40.0;
  double default_link_length = 60.0;
  std::map<std::string, double> link_length{{std::string(kGodparentOf), 90.0}};
  double repulsion_strength = 30.0;
  double collision_radius = 12.0;
  double theta = 0.9;
  double alpha_start = 1.0;
  double alpha_min = 0.001;
  double alpha_decay = 0.0228;
  double damping = 0.6;
  double band_stiffness_floor = 0.1;
  int tick_limit = 1000;

  /// Throws ConfigError on the first broken invariant.
  void check() const;
  double link_length_for(const std::string& kind) const;

  friend bool operator==(const LayoutConfig&, const LayoutConfig&) = default;
};

struct NodeState {
  Vec2 position;
  Vec2 velocity;
  std::optional<Vec2> pin;

  friend bool operator==(const NodeState&, const NodeState&) = default;
};

struct PositionState {
  std::vector<NodeState> nodes;  // canonical order
  double alpha = 1.0;
  int tick_count = 0;
  Lcg rng;  // jitter source, continues the initialisation stream

  std::vector<Vec2> positions() const;
  friend bool operator==(const PositionState&, const PositionState&) = default;
};

struct TraceFrame {
  int tick = 0;
  double alpha = 0.0;
  std::vector<Vec2> positions;
  /// Terminal frame of a layered run, taken after the band snap. Its alpha
  /// is reported as 0 so the alpha sequence stays strictly decreasing.
  bool snap = false;
};

struct Layout {
  std::vector<Vec2> positions;  // canonical order
  LayoutMode mode = LayoutMode::force_directed;
  std::optional<LayerAssignment> layers;
  int ticks_run = 0;
  double final_alpha = 0.0;
  LayoutConfig config;
  std::optional<std::vector<TraceFrame>> trace;

  double canvas_height() const;
};

/// y coordinate of the centre of a layer band (layer 0 on top).
inline double band_center(const LayoutConfig& config, int layer) noexcept {
  return config.margin + (layer + 0.5) * config.band_height;
}

/// Derived canvas height: configured in force_directed mode,
/// 2 * margin + L * band_height in force_layered mode.
double canvas_height(const LayoutConfig& config, const LayerAssignment* layers);

/// Seeded initial positions. force_directed: uniform over the canvas;
/// force_layered: x uniform, y = band centre +/- band_height / 4.
/// Throws ConfigError when layers are missing in layered mode.
PositionState init_positions(const GraphDataset& dataset, const LayoutConfig& config,
                             const LayerAssignment* layers = nullptr);

/// Precomputed per-run force data (links with rest length, strength and
/// bias; band targets). Binds to the dataset and config it was built from.
class ForceModel {
 public:
  ForceModel(const GraphDataset& dataset, const LayoutConfig& config, const LayerAssignment* layers = nullptr);

  /// One integration step. Forces act in fixed order: link, repulsion,
  /// collision, centering, band. Throws NumericalError on a non-finite
  /// coordinate.
  void tick(PositionState& state) const;

  const LayoutConfig& config() const noexcept { return config_; }

 private:
  struct Link {
    std::size_t source, target;
    double rest_length, strength, bias;
  };

  void apply_links(PositionState& state) const;
  void apply_repulsion(PositionState& state) const;
  void apply_collision(PositionState& state) const;
  void apply_centering(PositionState& state) const;
  void apply_band(PositionState& state) const;

  const GraphDataset& dataset_;
  LayoutConfig config_;
  std::vector<Link> links_;
  std::vector<double> band_target_;  // empty in force_directed mode
  double height_;
};

/// Convenience wrapper that builds a ForceModel for a single step.
void tick(PositionState& state, const GraphDataset& dataset, const LayoutConfig& config,
          const LayerAssignment* layers = nullptr);

/// Fixes a node at `position`; subsequent ticks hold it there.
/// Throws UnknownNodeError, ConfigError for a non-finite position.
PositionState pin(PositionState state, const GraphDataset& dataset, std::string_view node_id, Vec2 position);
/// Releases a pin; the node keeps its current position and zero velocity.
PositionState unpin(PositionState state, const GraphDataset& dataset, std::string_view node_id);

struct PinRequest {
  std::string id;
  Vec2 position;
};

struct RunOptions {
  std::vector<PinRequest> pins;
  bool record_trace = false;
};

/// init, tick until alpha < alpha_min or tick_limit, then in layered mode
/// snap y to band centres and clamp free nodes' x to the margins.
Layout run(const GraphDataset& dataset, const LayoutConfig& config, const LayerAssignment* layers = nullptr,
           const RunOptions& options = {});

/// Per-node repulsion increments for the state's positions and alpha.
std::vector<Vec2> repulsion_brute(const PositionState& state, double strength);
std::vector<Vec2> repulsion_bh(const PositionState& state, double strength, double theta);

}  // namespace strata
