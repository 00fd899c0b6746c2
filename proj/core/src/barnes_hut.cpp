#include "strata/barnes_hut.hpp"

#include <algorithm>
#include <array>

namespace strata {

std::vector<Vec2> repulsion_brute(std::span<const Vec2> positions, double strength, double alpha) {
  const double sa = strength * alpha;
  std::vector<Vec2> out(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    Vec2 acc;
    for (std::size_t j = 0; j < positions.size(); ++j) {
      if (j != i) acc += repulsion_term(positions[i], positions[j], sa);
    }
    out[i] = acc;
  }
  return out;
}

QuadTree::QuadTree(std::span<const Vec2> positions)
    : points_(positions), next_point_(positions.size(), kNone), leaf_of_(positions.size(), kNone) {
  if (positions.empty()) return;
  double min_x = positions[0].x, max_x = positions[0].x;
  double min_y = positions[0].y, max_y = positions[0].y;
  for (const auto& p : positions) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  double size = std::max(max_x - min_x, max_y - min_y);
  if (!(size > 0.0)) size = 1.0;
  cells_.reserve(positions.size() * 2);
  new_cell(min_x, min_y, size, kNone, 0);
  for (std::size_t i = 0; i < positions.size(); ++i) insert(static_cast<std::int32_t>(i));
  finalize();
}

std::int32_t QuadTree::new_cell(double x0, double y0, double size, std::int32_t parent, int depth) {
  Cell c;
  c.x0 = x0;
  c.y0 = y0;
  c.size = size;
  c.parent = parent;
  c.depth = depth;
  cells_.push_back(c);
  return static_cast<std::int32_t>(cells_.size() - 1);
}

int QuadTree::quadrant(const Cell& c, Vec2 p) const noexcept {
  const double half = c.size / 2.0;
  return (p.x >= c.x0 + half ? 1 : 0) + (p.y >= c.y0 + half ? 2 : 0);
}

void QuadTree::insert(std::int32_t point) {
  const Vec2 p = points_[point];
  std::int32_t cell = 0;
  for (;;) {
    if (cells_[cell].leaf()) {
      const std::int32_t head = cells_[cell].first_point;
      if (head == kNone) {
        cells_[cell].first_point = point;
        leaf_of_[point] = cell;
        return;
      }
      if (points_[head] == p || cells_[cell].depth >= kMaxDepth) {
        next_point_[point] = head;
        cells_[cell].first_point = point;
        leaf_of_[point] = cell;
        return;
      }
      // Split: push the resident chain one level down, then retry here.
      const Cell c = cells_[cell];
      const int q = quadrant(c, points_[head]);
      const double half = c.size / 2.0;
      const auto child = new_cell(c.x0 + (q & 1) * half, c.y0 + (q >> 1) * half, half, cell, c.depth + 1);
      cells_[cell].children[q] = child;
      cells_[cell].first_point = kNone;
      cells_[child].first_point = head;
      for (auto j = head; j != kNone; j = next_point_[j]) leaf_of_[j] = child;
      continue;
    }
    const Cell c = cells_[cell];
    const int q = quadrant(c, p);
    if (c.children[q] == kNone) {
      const double half = c.size / 2.0;
      const auto child = new_cell(c.x0 + (q & 1) * half, c.y0 + (q >> 1) * half, half, cell, c.depth + 1);
      cells_[cell].children[q] = child;
      cells_[child].first_point = point;
      leaf_of_[point] = child;
      return;
    }
    cell = c.children[q];
  }
}

void QuadTree::finalize() {
  // Children are always created after their parent, so a reverse sweep
  // sees every child before its parent.
  for (std::size_t k = cells_.size(); k-- > 0;) {
    Cell& c = cells_[k];
    Vec2 sum;
    double charge = 0.0;
    if (c.leaf()) {
      for (auto j = c.first_point; j != kNone; j = next_point_[j]) {
        sum += points_[j];
        charge += 1.0;
      }
    } else {
      for (auto child : c.children) {
        if (child == kNone) continue;
        sum += cells_[child].center * cells_[child].charge;
        charge += cells_[child].charge;
      }
    }
    c.charge = charge;
    c.center = charge > 0.0 ? sum * (1.0 / charge) : Vec2{};
  }
}

Vec2 QuadTree::repulsion_on(std::size_t index, double strength_alpha, double theta) const {
  if (cells_.empty()) return {};
  const Vec2 self = points_[index];

  std::array<std::int32_t, kMaxDepth + 1> ancestors{};
  const int own_depth = cells_[leaf_of_[index]].depth;
  for (auto c = leaf_of_[index]; c != kNone; c = cells_[c].parent) ancestors[cells_[c].depth] = c;

  const double theta2 = theta * theta;
  Vec2 acc;
  std::vector<std::int32_t> stack{0};
  while (!stack.empty()) {
    const auto k = stack.back();
    stack.pop_back();
    const Cell& c = cells_[k];
    if (c.leaf()) {
      for (auto j = c.first_point; j != kNone; j = next_point_[j]) {
        if (static_cast<std::size_t>(j) != index) acc += repulsion_term(self, points_[j], strength_alpha);
      }
      continue;
    }
    const bool contains_self = c.depth <= own_depth && ancestors[c.depth] == k;
    if (!contains_self && c.size * c.size <= theta2 * (self - c.center).norm2()) {
      acc += repulsion_term(self, c.center, strength_alpha, c.charge);
      continue;
    }
    for (int q = 3; q >= 0; --q) {
      if (c.children[q] != kNone) stack.push_back(c.children[q]);
    }
  }
  return acc;
}

std::vector<Vec2> repulsion_bh(std::span<const Vec2> positions, double strength, double alpha, double theta) {
  const QuadTree tree(positions);
  std::vector<Vec2> out(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) out[i] = tree.repulsion_on(i, strength * alpha, theta);
  return out;
}

}  // namespace strata
