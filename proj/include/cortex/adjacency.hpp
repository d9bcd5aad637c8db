#pragma once

// Line-of-sight adjacency. For every object o we take its k nearest neighbors
// and keep those reachable through the minimum-distance segment without
// crossing the interior of another one of those neighbors.

#include <span>
#include <vector>

#include <json.hpp>

#include "cortex/geometry.hpp"
#include "cortex/spatial_index.hpp"

namespace cortex {

/// Nearest-neighbor count used for the adjacency candidates.
inline constexpr std::size_t kNeighborCount = 8;

struct Neighborhood {
  // Both indexed by object id; lists are ordered by (box distance, id).
  std::vector<std::vector<int>> adjacency;
  std::vector<std::vector<int>> knn;

  std::size_t size() const { return adjacency.size(); }

  friend bool operator==(const Neighborhood&, const Neighborhood&) = default;
};

inline SpatialIndex make_index(std::span<const Rect> boxes) {
  std::vector<SpatialIndex::Entry> entries;
  entries.reserve(boxes.size());
  for (std::size_t i = 0; i < boxes.size(); ++i) entries.push_back({static_cast<int>(i), boxes[i]});
  return SpatialIndex(entries);
}

/// The k objects nearest to `id` by box distance, ties broken by id.
inline std::vector<int> knn(const SpatialIndex& index, int id, std::size_t k) {
  return index.nearest(index.entries().at(static_cast<std::size_t>(id)).box, k, id);
}

/// Boxes are indexed by object id.
inline Neighborhood build_adjacency(std::span<const Rect> boxes, std::size_t k = kNeighborCount) {
  const SpatialIndex index = make_index(boxes);
  Neighborhood nb;
  nb.adjacency.resize(boxes.size());
  nb.knn.resize(boxes.size());
  for (std::size_t o = 0; o < boxes.size(); ++o) {
    nb.knn[o] = knn(index, static_cast<int>(o), k);
    for (int n : nb.knn[o]) {
      const Segment2D sight = min_distance_segment(boxes[o], boxes[static_cast<std::size_t>(n)]);
      bool blocked = false;
      for (int other : nb.knn[o]) {
        if (other == n) continue;
        if (segment_hits_interior(sight, boxes[static_cast<std::size_t>(other)])) {
          blocked = true;
          break;
        }
      }
      if (!blocked) nb.adjacency[o].push_back(n);
    }
  }
  return nb;
}

/// Debug dump: directed edges {from, to} of the adjacency relation.
inline nlohmann::json adjacency_to_json(const Neighborhood& nb) {
  nlohmann::json edges = nlohmann::json::array();
  for (std::size_t o = 0; o < nb.adjacency.size(); ++o)
    for (int n : nb.adjacency[o]) edges.push_back({{"from", o}, {"to", n}});
  return {{"objects", nb.adjacency.size()}, {"edges", std::move(edges)}};
}

}  // namespace cortex
