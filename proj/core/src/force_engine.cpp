#include "strata/force_engine.hpp"

#include <algorithm>
#include <cmath>

#include "strata/barnes_hut.hpp"

namespace strata {

std::string_view to_string(LayoutMode mode) noexcept {
  return mode == LayoutMode::force_layered ? "force_layered" : "force_directed";
}

std::optional<LayoutMode> parse_layout_mode(std::string_view text) noexcept {
  if (text == "force_directed" || text == "force-directed") return LayoutMode::force_directed;
  if (text == "force_layered" || text == "force-layered") return LayoutMode::force_layered;
  return std::nullopt;
}

void LayoutConfig::check() const {
  auto positive = [](double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0) throw ConfigError(std::string(name) + " must be a positive length");
  };
  positive(canvas_width, "canvas_width");
  positive(canvas_height, "canvas_height");
  positive(band_height, "band_height");
  positive(margin, "margin");
  positive(default_link_length, "link_length");
  for (const auto& [kind, length] : link_length) positive(length, ("link_length." + kind).c_str());
  positive(collision_radius, "collision_radius");
  if (!std::isfinite(repulsion_strength)) throw ConfigError("repulsion_strength must be finite");
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in [0, 1]");
  if (!(alpha_decay > 0.0 && alpha_decay < 1.0)) throw ConfigError("alpha_decay must lie in (0, 1)");
  if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("damping must lie in (0, 1]");
  if (!(band_stiffness_floor >= 0.0 && band_stiffness_floor <= 1.0)) {
    throw ConfigError("band_stiffness_floor must lie in [0, 1]");
  }
  if (!std::isfinite(alpha_start) || alpha_start < 0.0) throw ConfigError("alpha_start must be >= 0");
  if (!std::isfinite(alpha_min) || alpha_min < 0.0) throw ConfigError("alpha_min must be >= 0");
  if (tick_limit < 1) throw ConfigError("tick_limit must be >= 1");
}

double LayoutConfig::link_length_for(const std::string& kind) const {
  auto it = link_length.find(kind);
  return it == link_length.end() ? default_link_length : it->second;
}

std::vector<Vec2> PositionState::positions() const {
  std::vector<Vec2> out;
  out.reserve(nodes.size());
  for (const auto& n : nodes) out.push_back(n.position);
  return out;
}

double canvas_height(const LayoutConfig& config, const LayerAssignment* layers) {
  if (config.mode == LayoutMode::force_layered && layers) {
    return 2.0 * config.margin + layers->layer_count * config.band_height;
  }
  return config.canvas_height;
}

double Layout::canvas_height() const { return strata::canvas_height(config, layers ? &*layers : nullptr); }

namespace {

void require_layers(const GraphDataset& dataset, const LayoutConfig& config, const LayerAssignment* layers) {
  if (config.mode != LayoutMode::force_layered) return;
  if (!layers) throw ConfigError("force_layered mode requires a layer assignment");
  if (layers->layer_of.size() != dataset.size()) throw ConfigError("layer assignment does not cover the dataset");
}

/// Vector of magnitude 1e-6 in a seeded direction.
Vec2 jitter(Lcg& rng) {
  Vec2 v{rng.uniform() - 0.5, rng.uniform() - 0.5};
  const double n = v.norm();
  if (n == 0.0) return {1e-6, 0.0};
  return v * (1e-6 / n);
}

}  // namespace

PositionState init_positions(const GraphDataset& dataset, const LayoutConfig& config, const LayerAssignment* layers) {
  config.check();
  require_layers(dataset, config, layers);
  PositionState state;
  state.rng = Lcg(config.seed);
  state.alpha = config.alpha_start;
  state.nodes.resize(dataset.size());
  const double height = canvas_height(config, layers);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    auto& node = state.nodes[i];
    node.position.x = state.rng.uniform() * config.canvas_width;
    if (config.mode == LayoutMode::force_layered) {
      const double jitter_y = (state.rng.uniform() * 2.0 - 1.0) * (config.band_height / 4.0);
      node.position.y = band_center(config, layers->layer_of[i]) + jitter_y;
    } else {
      node.position.y = state.rng.uniform() * height;
    }
  }
  return state;
}

ForceModel::ForceModel(const GraphDataset& dataset, const LayoutConfig& config, const LayerAssignment* layers)
    : dataset_(dataset), config_(config), height_(canvas_height(config, layers)) {
  config_.check();
  require_layers(dataset, config_, layers);

  std::vector<double> degree(dataset.size(), 0.0);
  for (const auto& e : dataset.edges()) {
    degree[e.source] += 1.0;
    degree[e.target] += 1.0;
  }
  for (const auto& e : dataset.edges()) {
    if (e.source == e.target) continue;
    const auto& rel = dataset.relations()[e.relation];
    const double ds = degree[e.source];
    const double dt = degree[e.target];
    links_.push_back({e.source, e.target, config_.link_length_for(rel.kind), 1.0 / std::min(ds, dt), ds / (ds + dt)});
  }
  if (config_.mode == LayoutMode::force_layered) {
    band_target_.reserve(dataset.size());
    for (int layer : layers->layer_of) band_target_.push_back(band_center(config_, layer));
  }
}

void ForceModel::apply_links(PositionState& state) const {
  auto& nodes = state.nodes;
  for (const auto& link : links_) {
    auto& s = nodes[link.source];
    auto& t = nodes[link.target];
    Vec2 delta = (t.position + t.velocity) - (s.position + s.velocity);
    double d = delta.norm();
    if (d == 0.0) {
      delta = jitter(state.rng);
      d = delta.norm();
    }
    const double f = (d - link.rest_length) / d * state.alpha * link.strength;
    const Vec2 pull = delta * f;
    t.velocity -= pull * link.bias;
    s.velocity += pull * (1.0 - link.bias);
  }
}

void ForceModel::apply_repulsion(PositionState& state) const {
  if (config_.repulsion_strength == 0.0 || state.nodes.size() < 2) return;
  const auto positions = state.positions();
  const QuadTree tree(positions);
  const double sa = config_.repulsion_strength * state.alpha;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    state.nodes[i].velocity += tree.repulsion_on(i, sa, config_.theta);
  }
}

void ForceModel::apply_collision(PositionState& state) const {
  const std::size_t n = state.nodes.size();
  if (n < 2) return;
  const double reach = 2.0 * config_.collision_radius;

  // Overlapping pairs are detected on the positions at the start of the
  // pass and the displacements applied together, so the result does not
  // depend on the order pairs are found in.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const double xa = state.nodes[a].position.x, xb = state.nodes[b].position.x;
    return xa < xb || (xa == xb && a < b);
  });
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n; ++a) {
    const Vec2 pa = state.nodes[order[a]].position;
    for (std::size_t b = a + 1; b < n; ++b) {
      const Vec2 pb = state.nodes[order[b]].position;
      if (pb.x - pa.x >= reach) break;
      if ((pb - pa).norm2() < reach * reach) pairs.emplace_back(std::min(order[a], order[b]), std::max(order[a], order[b]));
    }
  }
  if (pairs.empty()) return;
  std::sort(pairs.begin(), pairs.end());

  std::vector<Vec2> shift(n);
  for (const auto& [i, j] : pairs) {
    Vec2 delta = state.nodes[j].position - state.nodes[i].position;
    double d = delta.norm();
    if (d == 0.0) {
      delta = jitter(state.rng);
      d = delta.norm();
    }
    const double overlap = reach - d;
    if (overlap <= 0.0) continue;
    const Vec2 push = delta * (0.7 * overlap / 2.0 / d);
    shift[j] += push;
    shift[i] -= push;
  }
  for (std::size_t i = 0; i < n; ++i) state.nodes[i].position += shift[i];
}

void ForceModel::apply_centering(PositionState& state) const {
  if (state.nodes.empty()) return;
  Vec2 sum;
  for (const auto& node : state.nodes) sum += node.position;
  const double n = static_cast<double>(state.nodes.size());
  Vec2 shift{config_.canvas_width / 2.0 - sum.x / n, height_ / 2.0 - sum.y / n};
  if (config_.mode == LayoutMode::force_layered) shift.y = 0.0;
  for (auto& node : state.nodes) node.position += shift;
}

void ForceModel::apply_band(PositionState& state) const {
  if (band_target_.empty()) return;
  const double floor = config_.band_stiffness_floor;
  const double k = floor + (1.0 - floor) * (1.0 - state.alpha);
  for (std::size_t i = 0; i < state.nodes.size(); ++i) {
    auto& node = state.nodes[i];
    node.velocity.y += (band_target_[i] - node.position.y) * k * state.alpha;
  }
}

void ForceModel::tick(PositionState& state) const {
  state.alpha += (0.0 - state.alpha) * config_.alpha_decay;

  apply_links(state);
  apply_repulsion(state);
  apply_collision(state);
  apply_centering(state);
  apply_band(state);

  for (auto& node : state.nodes) {
    if (node.pin) {
      node.position = *node.pin;
      node.velocity = {};
    } else {
      node.velocity *= config_.damping;
      node.position += node.velocity;
    }
  }
  ++state.tick_count;

  for (std::size_t i = 0; i < state.nodes.size(); ++i) {
    if (!state.nodes[i].position.finite() || !state.nodes[i].velocity.finite()) {
      throw NumericalError(state.tick_count, dataset_.persons()[i].id);
    }
  }
}

void tick(PositionState& state, const GraphDataset& dataset, const LayoutConfig& config, const LayerAssignment* layers) {
  ForceModel(dataset, config, layers).tick(state);
}

PositionState pin(PositionState state, const GraphDataset& dataset, std::string_view node_id, Vec2 position) {
  const auto i = dataset.require_index(node_id);
  if (!position.finite()) throw ConfigError("pin position must be finite");
  if (i >= state.nodes.size()) throw UnknownNodeError(std::string(node_id));
  auto& node = state.nodes[i];
  node.pin = position;
  node.position = position;
  node.velocity = {};
  return state;
}

PositionState unpin(PositionState state, const GraphDataset& dataset, std::string_view node_id) {
  const auto i = dataset.require_index(node_id);
  if (i >= state.nodes.size()) throw UnknownNodeError(std::string(node_id));
  state.nodes[i].pin.reset();
  return state;
}

Layout run(const GraphDataset& dataset, const LayoutConfig& config, const LayerAssignment* layers,
           const RunOptions& options) {
  const ForceModel model(dataset, config, layers);
  PositionState state = init_positions(dataset, config, layers);
  // Layered pins fix x only; the band owns y.
  for (const auto& p : options.pins) {
    Vec2 at = p.position;
    if (config.mode == LayoutMode::force_layered) at.y = band_center(config, layers->layer(dataset, p.id));
    state = pin(std::move(state), dataset, p.id, at);
  }

  Layout layout;
  layout.mode = config.mode;
  layout.config = config;
  if (config.mode == LayoutMode::force_layered) layout.layers = *layers;
  if (options.record_trace) layout.trace.emplace().push_back({0, state.alpha, state.positions(), false});

  while (state.alpha >= config.alpha_min && state.tick_count < config.tick_limit) {
    model.tick(state);
    if (layout.trace) layout.trace->push_back({state.tick_count, state.alpha, state.positions(), false});
  }

  if (config.mode == LayoutMode::force_layered) {
    const double lo = config.margin;
    const double hi = config.canvas_width - config.margin;
    for (std::size_t i = 0; i < state.nodes.size(); ++i) {
      auto& node = state.nodes[i];
      node.position.y = band_center(config, layers->layer_of[i]);
      if (!node.pin) node.position.x = std::clamp(node.position.x, lo, std::max(lo, hi));
    }
    if (layout.trace) layout.trace->push_back({state.tick_count, 0.0, state.positions(), true});
  }

  layout.positions = state.positions();
  layout.ticks_run = state.tick_count;
  layout.final_alpha = state.alpha;
  return layout;
}

std::vector<Vec2> repulsion_brute(const PositionState& state, double strength) {
  const auto positions = state.positions();
  return repulsion_brute(positions, strength, state.alpha);
}

std::vector<Vec2> repulsion_bh(const PositionState& state, double strength, double theta) {
  const auto positions = state.positions();
  return repulsion_bh(positions, strength, state.alpha, theta);
}

}  // namespace strata
