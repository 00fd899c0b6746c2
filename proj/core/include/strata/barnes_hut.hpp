#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "strata/geometry.hpp"

namespace strata {

/// Velocity increment on a node at `self` from a unit charge at `other`:
///   (self - other) * strength * alpha / max(d^2, 1)
/// Coincident points contribute nothing (no direction exists); the
/// collision pass separates them.
inline Vec2 repulsion_term(Vec2 self, Vec2 other, double strength_alpha, double charge = 1.0) noexcept {
  const Vec2 delta = self - other;
  double d2 = delta.norm2();
  if (d2 < 1.0) d2 = 1.0;
  return delta * (strength_alpha * charge / d2);
}

/// Exact O(n^2) repulsion, each node's sum accumulated in canonical order.
std::vector<Vec2> repulsion_brute(std::span<const Vec2> positions, double strength, double alpha);

/// Region quadtree over a point set. Internal cells carry total charge
/// (point count) and center of mass; coincident points share a leaf.
class QuadTree {
 public:
  explicit QuadTree(std::span<const Vec2> positions);

  /// Repulsion on point `index`. A cell is taken as one pseudo-charge when
  /// cell_width / distance_to_center_of_mass <= theta and the cell does not
  /// contain the point itself; otherwise the traversal descends. Leaves are
  /// summed exactly.
  Vec2 repulsion_on(std::size_t index, double strength_alpha, double theta) const;

  std::size_t cell_count() const noexcept { return cells_.size(); }

 private:
  static constexpr std::int32_t kNone = -1;
  static constexpr int kMaxDepth = 48;

  struct Cell {
    double x0, y0, size;
    std::int32_t children[4] = {kNone, kNone, kNone, kNone};
    std::int32_t parent = kNone;
    int depth = 0;
    std::int32_t first_point = kNone;  // leaf chain head
    double charge = 0.0;
    Vec2 center;  // center of mass once finalized
    bool leaf() const noexcept { return children[0] == kNone && children[1] == kNone &&
                                        children[2] == kNone && children[3] == kNone; }
  };

  std::int32_t new_cell(double x0, double y0, double size, std::int32_t parent, int depth);
  void insert(std::int32_t point);
  int quadrant(const Cell& c, Vec2 p) const noexcept;
  void finalize();

  std::span<const Vec2> points_;
  std::vector<Cell> cells_;
  std::vector<std::int32_t> next_point_;
  std::vector<std::int32_t> leaf_of_;
};

/// Barnes-Hut repulsion for every node. theta = 0 forces full descent.
std::vector<Vec2> repulsion_bh(std::span<const Vec2> positions, double strength, double alpha, double theta);

}  // namespace strata
