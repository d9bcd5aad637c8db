#pragma once

// Static R-tree over (id, Rect) entries, bulk loaded with Sort-Tile-Recursive
// packing. Queries are exact: the tree only prunes, it never approximates.

#include <algorithm>
#include <cmath>
#include <queue>
#include <span>
#include <tuple>
#include <vector>

#include "cortex/geometry.hpp"

namespace cortex {

class SpatialIndex {
 public:
  struct Entry {
    int id = 0;
    Rect box;
  };

  static constexpr std::size_t kNodeCapacity = 16;

  SpatialIndex() = default;

  explicit SpatialIndex(std::span<const Entry> entries) : entries_(entries.begin(), entries.end()) {
    if (entries_.empty()) return;
    std::vector<std::size_t> level;
    level.reserve(entries_.size());
    std::vector<std::size_t> order(entries_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    level = pack(order, /*leaf=*/true);
    while (level.size() > 1) level = pack(level, /*leaf=*/false);
    root_ = level.front();
  }

  std::size_t size() const { return entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

  /// The k entries closest to `query` by box distance, ordered by (distance, id).
  /// Entries whose id equals `exclude` are skipped.
  std::vector<int> nearest(const Rect& query, std::size_t k, int exclude = -1) const {
    std::vector<int> out;
    if (entries_.empty() || k == 0) return out;
    // (distance, is_entry, id-or-node). Nodes sort before entries at equal distance
    // so every entry at distance d is queued before the first one at d is emitted.
    using Item = std::tuple<double, int, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    queue.emplace(box_distance(nodes_[root_].box, query), 0, root_);
    while (!queue.empty() && out.size() < k) {
      const auto [dist, is_entry, ref] = queue.top();
      queue.pop();
      if (is_entry) {
        out.push_back(static_cast<int>(ref));
        continue;
      }
      const Node& node = nodes_[ref];
      for (std::size_t child : node.children) {
        if (node.leaf) {
          const Entry& e = entries_[child];
          if (e.id == exclude) continue;
          queue.emplace(box_distance(e.box, query), 1, static_cast<std::size_t>(e.id));
        } else {
          queue.emplace(box_distance(nodes_[child].box, query), 0, child);
        }
      }
    }
    return out;
  }

  /// Ids of entries whose closed box intersects `query`, ascending.
  std::vector<int> intersecting(const Rect& query) const {
    std::vector<int> out;
    visit([&](const Rect& b) { return intersection(b, query).has_value(); },
          [&](const Entry& e) {
            if (intersection(e.box, query)) out.push_back(e.id);
          });
    std::sort(out.begin(), out.end());
    return out;
  }

  /// Ids of entries whose open interior the segment passes through, ascending.
  std::vector<int> crossed_by(const Segment2D& seg) const {
    const Rect bounds = Rect::from_edges(std::min(seg.a.x, seg.b.x), std::min(seg.a.y, seg.b.y),
                                         std::max(seg.a.x, seg.b.x), std::max(seg.a.y, seg.b.y));
    std::vector<int> out;
    visit([&](const Rect& b) { return intersection(b, bounds).has_value(); },
          [&](const Entry& e) {
            if (segment_hits_interior(seg, e.box)) out.push_back(e.id);
          });
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  struct Node {
    Rect box;
    bool leaf = true;
    std::vector<std::size_t> children;  // entry indices for leaves, node indices otherwise
  };

  Rect bounds_of(std::size_t ref, bool leaf) const {
    return leaf ? entries_[ref].box : nodes_[ref].box;
  }

  // Sort-Tile-Recursive: sort by center x into vertical slices, each slice by center y,
  // then chunk into nodes. Returns the indices of the new nodes.
  std::vector<std::size_t> pack(std::vector<std::size_t> refs, bool leaf) {
    const std::size_t n = refs.size();
    const std::size_t node_count = (n + kNodeCapacity - 1) / kNodeCapacity;
    const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(node_count))));
    const std::size_t per_slice = slices * kNodeCapacity;
    auto center_less = [&](bool by_x) {
      return [&, by_x](std::size_t a, std::size_t b) {
        const Point pa = bounds_of(a, leaf).center();
        const Point pb = bounds_of(b, leaf).center();
        return by_x ? std::tie(pa.x, pa.y, a) < std::tie(pb.x, pb.y, b)
                    : std::tie(pa.y, pa.x, a) < std::tie(pb.y, pb.x, b);
      };
    };
    std::sort(refs.begin(), refs.end(), center_less(true));
    std::vector<std::size_t> created;
    for (std::size_t s = 0; s < n; s += per_slice) {
      const auto slice_end = refs.begin() + static_cast<std::ptrdiff_t>(std::min(n, s + per_slice));
      const auto slice_begin = refs.begin() + static_cast<std::ptrdiff_t>(s);
      std::sort(slice_begin, slice_end, center_less(false));
      for (auto it = slice_begin; it < slice_end; it += std::min<std::ptrdiff_t>(kNodeCapacity, slice_end - it)) {
        Node node;
        node.leaf = leaf;
        const auto stop = std::min(slice_end, it + static_cast<std::ptrdiff_t>(kNodeCapacity));
        node.box = bounds_of(*it, leaf);
        for (auto c = it; c < stop; ++c) {
          node.children.push_back(*c);
          node.box = hull(node.box, bounds_of(*c, leaf));
        }
        nodes_.push_back(std::move(node));
        created.push_back(nodes_.size() - 1);
      }
    }
    return created;
  }

  template <class Prune, class Visit>
  void visit(Prune&& keep, Visit&& on_entry) const {
    if (entries_.empty()) return;
    std::vector<std::size_t> stack{root_};
    while (!stack.empty()) {
      const Node& node = nodes_[stack.back()];
      stack.pop_back();
      if (!keep(node.box)) continue;
      for (std::size_t child : node.children) {
        if (node.leaf) {
          on_entry(entries_[child]);
        } else {
          stack.push_back(child);
        }
      }
    }
  }

  std::vector<Entry> entries_;
  std::vector<Node> nodes_;
  std::size_t root_ = 0;
};

}  // namespace cortex
