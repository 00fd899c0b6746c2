#include "strata/analysis.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace strata {

// ---------------------------------------------------------------------------
// edge_crossings

namespace {

struct FixedPoint {
  std::int64_t x, y;
};

constexpr double kQuantum = 1e9;        // fixed-point units per coordinate unit
constexpr double kFixedLimit = 4.0e18;  // keeps differences and products in range
// A point closer to a segment's supporting line than this fraction of the
// segment length counts as on the line. Rigid transforms then preserve
// touching and collinear configurations instead of resolving them by noise.
constexpr double kCollinearTolerance = 1e-7;

std::int64_t quantise(double v) {
  const double scaled = std::nearbyint(v * kQuantum);
  return static_cast<std::int64_t>(std::clamp(scaled, -kFixedLimit, kFixedLimit));
}

int orientation(FixedPoint a, FixedPoint b, FixedPoint c) {
  const __int128 dx = b.x - a.x, dy = b.y - a.y;
  const __int128 cross = dx * (c.y - a.y) - dy * (c.x - a.x);
  if (cross == 0) return 0;
  const double base2 = static_cast<double>(dx * dx + dy * dy);
  const double cross_d = static_cast<double>(cross);
  if (cross_d * cross_d <= kCollinearTolerance * kCollinearTolerance * base2 * base2) return 0;
  return cross > 0 ? 1 : -1;
}

bool segments_cross(FixedPoint a, FixedPoint b, FixedPoint c, FixedPoint d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 * o2 < 0 && o3 * o4 < 0) return true;
  if (o1 == 0 && o2 == 0 && o3 == 0 && o4 == 0) {
    // Collinear: overlap of positive length along the dominant axis.
    const bool use_x = std::max(std::abs(b.x - a.x), std::abs(d.x - c.x)) >=
                       std::max(std::abs(b.y - a.y), std::abs(d.y - c.y));
    auto lo = [&](FixedPoint p, FixedPoint q) { return use_x ? std::min(p.x, q.x) : std::min(p.y, q.y); };
    auto hi = [&](FixedPoint p, FixedPoint q) { return use_x ? std::max(p.x, q.x) : std::max(p.y, q.y); };
    return std::min(hi(a, b), hi(c, d)) > std::max(lo(a, b), lo(c, d));
  }
  return false;
}

}  // namespace

std::int64_t edge_crossings(std::span<const Vec2> positions, const GraphDataset& dataset) {
  struct Segment {
    std::size_t u, v;
    FixedPoint a, b;
    std::int64_t min_x, max_x;
  };
  std::vector<Segment> segments;
  segments.reserve(dataset.edges().size());
  for (const auto& e : dataset.edges()) {
    if (e.source >= positions.size() || e.target >= positions.size()) continue;
    const FixedPoint a{quantise(positions[e.source].x), quantise(positions[e.source].y)};
    const FixedPoint b{quantise(positions[e.target].x), quantise(positions[e.target].y)};
    segments.push_back({e.source, e.target, a, b, std::min(a.x, b.x), std::max(a.x, b.x)});
  }
  std::sort(segments.begin(), segments.end(), [](const Segment& s, const Segment& t) { return s.min_x < t.min_x; });

  std::int64_t count = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    for (std::size_t j = i + 1; j < segments.size() && segments[j].min_x <= s.max_x; ++j) {
      const auto& t = segments[j];
      if (s.u == t.u || s.u == t.v || s.v == t.u || s.v == t.v) continue;
      if (segments_cross(s.a, s.b, t.a, t.b)) ++count;
    }
  }
  return count;
}

// ---------------------------------------------------------------------------
// node_overlaps / stress / layer_violation

std::int64_t node_overlaps(std::span<const Vec2> positions, double radius) {
  const double limit = 2.0 * radius - 1e-9;
  std::vector<std::size_t> order(positions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return positions[a].x < positions[b].x; });
  std::int64_t count = 0;
  for (std::size_t a = 0; a < order.size(); ++a) {
    const Vec2 pa = positions[order[a]];
    for (std::size_t b = a + 1; b < order.size(); ++b) {
      const Vec2 pb = positions[order[b]];
      if (pb.x - pa.x >= limit) break;
      if ((pb - pa).norm() < limit) ++count;
    }
  }
  return count;
}

double stress(std::span<const Vec2> positions, const GraphDataset& dataset, double ideal_edge) {
  const std::size_t n = dataset.size();
  const auto& adjacency = dataset.adjacency();
  double total = 0.0;
  std::size_t pairs = 0;
  std::vector<int> hops(n);
  std::vector<std::size_t> queue;
  queue.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(hops.begin(), hops.end(), -1);
    hops[i] = 0;
    queue.assign(1, i);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto u = queue[head];
      for (auto v : adjacency[u]) {
        if (hops[v] < 0) {
          hops[v] = hops[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      if (hops[j] <= 0) continue;
      const double target = ideal_edge * hops[j];
      const double r = ((positions[i] - positions[j]).norm() - target) / target;
      total += r * r;
      ++pairs;
    }
  }
  return pairs == 0 ? 0.0 : total / static_cast<double>(pairs);
}

double layer_violation(std::span<const Vec2> positions, const LayerAssignment& assignment, double band_height,
                       double margin) {
  double worst = 0.0;
  for (std::size_t i = 0; i < positions.size() && i < assignment.layer_of.size(); ++i) {
    const double center = margin + (assignment.layer_of[i] + 0.5) * band_height;
    worst = std::max(worst, std::abs(positions[i].y - center));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Structure queries

std::vector<std::string> bridge_nodes(const GraphDataset& dataset) {
  const std::size_t n = dataset.size();
  const auto& adjacency = dataset.adjacency();
  constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> discovered(n, kUnvisited), low(n, 0), parent(n, kUnvisited);
  std::vector<std::size_t> tree_children(n, 0);
  std::vector<bool> articulation(n, false);
  std::size_t clock = 0;

  struct Frame {
    std::size_t node;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (std::size_t root = 0; root < n; ++root) {
    if (discovered[root] != kUnvisited) continue;
    discovered[root] = low[root] = clock++;
    stack.push_back({root, 0});
    while (!stack.empty()) {
      auto& frame = stack.back();
      const auto u = frame.node;
      if (frame.next < adjacency[u].size()) {
        const auto v = adjacency[u][frame.next++];
        if (v == u) continue;
        if (discovered[v] == kUnvisited) {
          parent[v] = u;
          ++tree_children[u];
          discovered[v] = low[v] = clock++;
          stack.push_back({v, 0});
        } else if (v != parent[u]) {
          low[u] = std::min(low[u], discovered[v]);
        }
        continue;
      }
      stack.pop_back();
      if (parent[u] != kUnvisited) {
        const auto p = parent[u];
        low[p] = std::min(low[p], low[u]);
        if (parent[p] != kUnvisited && low[u] >= discovered[p]) articulation[p] = true;
      }
    }
    if (tree_children[root] > 1) articulation[root] = true;
  }

  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (articulation[i]) out.push_back(dataset.persons()[i].id);
  }
  return out;
}

std::vector<std::size_t> degrees(const GraphDataset& dataset) {
  std::vector<std::size_t> out;
  out.reserve(dataset.size());
  for (const auto& neighbours : dataset.adjacency()) out.push_back(neighbours.size());
  return out;
}

std::vector<std::string> most_connected(const GraphDataset& dataset) {
  const auto deg = degrees(dataset);
  std::vector<std::string> out;
  if (deg.empty()) return out;
  const auto best = *std::max_element(deg.begin(), deg.end());
  for (std::size_t i = 0; i < deg.size(); ++i) {
    if (deg[i] == best) out.push_back(dataset.persons()[i].id);
  }
  return out;
}

std::vector<std::string> common_neighbors(const GraphDataset& dataset, std::string_view a, std::string_view b) {
  const auto ia = dataset.require_index(a);
  const auto ib = dataset.require_index(b);
  if (ia == ib) throw std::invalid_argument("common_neighbors needs two distinct persons");
  std::vector<bool> near_a(dataset.size(), false), near_b(dataset.size(), false);
  for (auto v : dataset.adjacency()[ia]) near_a[v] = true;
  for (auto v : dataset.adjacency()[ib]) near_b[v] = true;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (i != ia && i != ib && near_a[i] && near_b[i]) out.push_back(dataset.persons()[i].id);
  }
  return out;
}

Snapshot snapshot_at_year(const GraphDataset& dataset, int year) {
  std::vector<Person> persons;
  std::vector<bool> kept(dataset.size(), false);
  std::size_t undated = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& p = dataset.persons()[i];
    const bool born = !p.birth_year || *p.birth_year <= year;
    const bool alive = !p.death_year || *p.death_year >= year;
    if (born && alive) {
      kept[i] = true;
      if (!p.birth_year || !p.death_year) ++undated;
      persons.push_back(p);
    }
  }
  std::vector<Relation> relations;
  for (const auto& e : dataset.edges()) {
    if (kept[e.source] && kept[e.target]) relations.push_back(dataset.relations()[e.relation]);
  }
  return {GraphDataset(std::move(persons), std::move(relations), dataset.meta(), dataset.registry()), undated};
}

// ---------------------------------------------------------------------------
// Reports

QualityReport quality_report(const Layout& layout, const GraphDataset& dataset, const LayerAssignment* assignment,
                             std::int64_t runtime_ms) {
  QualityReport r;
  r.node_count = dataset.size();
  r.edge_count = dataset.relations().size();
  r.edge_crossings = edge_crossings(layout.positions, dataset);
  r.node_overlaps = node_overlaps(layout.positions, layout.config.collision_radius);
  r.stress = stress(layout.positions, dataset, layout.config.default_link_length);
  if (assignment) {
    r.layer_violation = layer_violation(layout.positions, *assignment, layout.config.band_height, layout.config.margin);
  }
  r.bridge_nodes = bridge_nodes(dataset);
  r.mode = layout.mode;
  r.runtime_ms = runtime_ms;
  return r;
}

namespace {

std::string fixed(double v, int precision) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

template <typename F>
std::pair<Layout, std::int64_t> timed(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  Layout layout = f();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
  return {std::move(layout), static_cast<std::int64_t>(ms.count())};
}

}  // namespace

Comparison compare_report(const GraphDataset& dataset, const LayoutConfig& config_fd, const LayoutConfig& config_fl,
                          const HierarchySpec& spec, CyclePolicy policy) {
  if (config_fd.seed != config_fl.seed) throw ConfigError("compared layouts must share one seed");
  LayoutConfig fd = config_fd;
  fd.mode = LayoutMode::force_directed;
  LayoutConfig fl = config_fl;
  fl.mode = LayoutMode::force_layered;

  const auto layers = assign_layers(dataset, spec, policy);
  auto [fd_layout, fd_ms] = timed([&] { return run(dataset, fd); });
  auto [fl_layout, fl_ms] = timed([&] { return run(dataset, fl, &layers); });

  Comparison c;
  c.directed_report = quality_report(fd_layout, dataset, &layers, fd_ms);
  c.layered_report = quality_report(fl_layout, dataset, &layers, fl_ms);
  c.force_directed = std::move(fd_layout);
  c.force_layered = std::move(fl_layout);
  c.table = comparison_table(c.directed_report, c.layered_report);
  return c;
}

std::string comparison_table(const QualityReport& fd, const QualityReport& fl) {
  auto violation = [](const QualityReport& r) { return r.layer_violation ? fixed(*r.layer_violation, 3) : "-"; };
  auto bridges = [](const QualityReport& r) {
    std::string s = std::to_string(r.bridge_nodes.size());
    if (!r.bridge_nodes.empty()) {
      s += " (";
      for (std::size_t i = 0; i < r.bridge_nodes.size(); ++i) s += (i ? "," : "") + r.bridge_nodes[i];
      s += ")";
    }
    return s;
  };
  const std::vector<std::array<std::string, 3>> rows = {
      {"metric", std::string(to_string(fd.mode)), std::string(to_string(fl.mode))},
      {"node_count", std::to_string(fd.node_count), std::to_string(fl.node_count)},
      {"edge_count", std::to_string(fd.edge_count), std::to_string(fl.edge_count)},
      {"crossings", std::to_string(fd.edge_crossings), std::to_string(fl.edge_crossings)},
      {"overlaps", std::to_string(fd.node_overlaps), std::to_string(fl.node_overlaps)},
      {"stress", fixed(fd.stress, 6), fixed(fl.stress, 6)},
      {"layer_violation", violation(fd), violation(fl)},
      {"bridges", bridges(fd), bridges(fl)},
  };
  std::size_t width[3] = {0, 0, 0};
  for (const auto& row : rows) {
    for (int c = 0; c < 3; ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    out += row[0] + std::string(width[0] - row[0].size() + 2, ' ');
    out += std::string(width[1] - row[1].size(), ' ') + row[1] + "  ";
    out += std::string(width[2] - row[2].size(), ' ') + row[2] + "\n";
  }
  return out;
}

}  // namespace strata
