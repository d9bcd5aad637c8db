#pragma once

// Contextual clustering. The adjacency neighborhoods yield two data-driven
// thresholds (a distance factor and an alignment factor); pairwise distances
// below them clamp to unity, are multiplied with a normalized color
// difference, and the result is density-clustered at eps = 1.

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "cortex/abstraction.hpp"
#include "cortex/adjacency.hpp"
#include "cortex/error.hpp"
#include "cortex/features.hpp"

namespace cortex {

// ---------------------------------------------------------------------------
// Scaling factors

struct HistogramBin {
  double value = 0.0;  // bin center
  std::size_t frequency = 0;
  double score = 0.0;

  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

struct FactorEstimate {
  double sigma = 0.0;
  std::vector<HistogramBin> bins;  // ascending by value
};

struct ScalingFactors {
  double sigma_d = 0.0;
  double sigma_a = 0.0;
  std::vector<HistogramBin> distance_bins;
  std::vector<HistogramBin> alignment_bins;

  friend bool operator==(const ScalingFactors&, const ScalingFactors&) = default;
};

namespace detail {

inline void require_samples(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyAdjacency, "no adjacent pairs to measure");
}

// 1-px bins with centers at 0.5, 1.5, ...; bin center stands for the bin's value.
inline std::vector<HistogramBin> unit_histogram(std::span<const double> values) {
  std::map<long long, std::size_t> counts;
  for (double v : values) ++counts[static_cast<long long>(std::floor(std::max(v, 0.0)))];
  std::vector<HistogramBin> bins;
  bins.reserve(counts.size());
  for (const auto& [index, count] : counts)
    bins.push_back({static_cast<double>(index) + 0.5, count, 0.0});
  return bins;
}

template <class Score>
FactorEstimate weighted_mode(std::span<const double> values, Score score) {
  require_samples(values);
  FactorEstimate est;
  est.bins = unit_histogram(values);
  double best = -1.0;
  for (auto& bin : est.bins) {
    bin.score = score(bin.value, static_cast<double>(bin.frequency));
    if (bin.score > best) {  // strict: ties keep the smaller value
      best = bin.score;
      est.sigma = bin.value;
    }
  }
  return est;
}

}  // namespace detail

/// Box distances over every directed adjacency pair (o, n in adjacency(o)).
inline std::vector<double> pairwise_adjacent_distances(std::span<const Rect> boxes,
                                                       const Neighborhood& nb) {
  std::vector<double> out;
  for (std::size_t o = 0; o < nb.adjacency.size(); ++o)
    for (int n : nb.adjacency[o]) out.push_back(box_distance(boxes[o], boxes[static_cast<std::size_t>(n)]));
  detail::require_samples(out);
  return out;
}

/// Smallest of the left, right, top, bottom, horizontal-center and
/// vertical-center alignment offsets.
inline double alignment_difference(const Rect& a, const Rect& b) {
  const Point ca = a.center();
  const Point cb = b.center();
  return std::min({std::abs(a.left() - b.left()), std::abs(a.right() - b.right()),
                   std::abs(a.top() - b.top()), std::abs(a.bottom() - b.bottom()),
                   std::abs(ca.x - cb.x), std::abs(ca.y - cb.y)});
}

inline std::vector<double> pairwise_alignment_differences(std::span<const Rect> boxes,
                                                          const Neighborhood& nb) {
  std::vector<double> out;
  for (std::size_t o = 0; o < nb.adjacency.size(); ++o)
    for (int n : nb.adjacency[o])
      out.push_back(alignment_difference(boxes[o], boxes[static_cast<std::size_t>(n)]));
  detail::require_samples(out);
  return out;
}

/// Distance-weighted mode: argmax of value * frequency.
inline FactorEstimate distance_factor(std::span<const double> distances) {
  return detail::weighted_mode(distances, [](double v, double f) { return v * f; });
}

/// Smallness-weighted mode: argmax of frequency / value.
inline FactorEstimate alignment_factor(std::span<const double> alignments) {
  return detail::weighted_mode(alignments, [](double v, double f) { return f / v; });
}

inline ScalingFactors compute_factors(std::span<const Rect> boxes, const Neighborhood& nb) {
  const auto d = distance_factor(pairwise_adjacent_distances(boxes, nb));
  const auto a = alignment_factor(pairwise_alignment_differences(boxes, nb));
  return {d.sigma, a.sigma, d.bins, a.bins};
}

// ---------------------------------------------------------------------------
// Contextual distance

/// Values at or below the threshold become 1; the rest pass through unchanged.
inline double clamp_to_unity(double x, double sigma) { return x <= sigma ? 1.0 : x; }

/// Clamp against a modal bin center: everything in the modal 1-px bin or
/// below it counts as at the threshold, including the upper half of the bin.
inline double clamp_to_bin(double x, double sigma) {
  const bool in_bin = sigma > 0.0 && std::floor(x) <= std::floor(sigma);
  return in_bin ? 1.0 : clamp_to_unity(x, sigma);
}

/// CIE76 just-noticeable difference.
inline constexpr double kJustNoticeableDifference = 2.3;

/// Mean fg/bg CIE76 difference in units of the just-noticeable difference,
/// floored at 1.
inline double color_distance(const FeatureVector& fa, const FeatureVector& fb) {
  const double mean = (delta_e76(fa.bg, fb.bg) + delta_e76(fa.fg, fb.fg)) / 2.0;
  return std::max(mean, kJustNoticeableDifference) / kJustNoticeableDifference;
}

class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

  void set_symmetric(std::size_t i, std::size_t j, double v) {
    values_[i * n_ + j] = v;
    values_[j * n_ + i] = v;
  }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(values_).subspan(i * n_, n_);
  }

  friend bool operator==(const DistanceMatrix&, const DistanceMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

inline double contextual_distance(const FeatureVector& a, const FeatureVector& b,
                                  const ScalingFactors& factors) {
  const Rect ra = a.box();
  const Rect rb = b.box();
  return clamp_to_bin(box_distance(ra, rb), factors.sigma_d) *
         clamp_to_bin(alignment_difference(ra, rb), factors.sigma_a) * color_distance(a, b);
}

/// Contextual distance for every pair of objects; zero diagonal.
inline DistanceMatrix build_distance_matrix(std::span<const FeatureVector> features,
                                            const ScalingFactors& factors) {
  DistanceMatrix m(features.size());
  for (std::size_t i = 0; i < features.size(); ++i)
    for (std::size_t j = i + 1; j < features.size(); ++j)
      m.set_symmetric(i, j, contextual_distance(features[i], features[j], factors));
  return m;
}

// ---------------------------------------------------------------------------
// Density clustering

inline constexpr int kNoise = -1;

/// DBSCAN over a precomputed distance matrix. Neighborhoods are closed
/// (distance <= eps) and include the point itself. Returns one label per point,
/// numbered in order of discovery; kNoise marks noise.
inline std::vector<int> dbscan(const DistanceMatrix& d, double eps, std::size_t min_pts) {
  constexpr int kUnvisited = -2;
  const std::size_t n = d.size();
  std::vector<int> label(n, kUnvisited);
  auto region = [&](std::size_t p) {
    std::vector<std::size_t> out;
    const auto row = d.row(p);
    for (std::size_t q = 0; q < n; ++q)
      if (q == p || row[q] <= eps) out.push_back(q);
    return out;
  };
  int next = 0;
  for (std::size_t p = 0; p < n; ++p) {
    if (label[p] != kUnvisited) continue;
    auto seeds = region(p);
    if (seeds.size() < min_pts) {
      label[p] = kNoise;
      continue;
    }
    const int c = next++;
    label[p] = c;
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      const std::size_t q = seeds[i];
      if (label[q] == kNoise) label[q] = c;
      if (label[q] != kUnvisited) continue;
      label[q] = c;
      auto more = region(q);
      if (more.size() < min_pts) continue;
      for (std::size_t r : more)
        if (label[r] == kUnvisited || label[r] == kNoise) seeds.push_back(r);
    }
  }
  return label;
}

/// DBSCAN at eps = 1 with minPts = 1, so every object lands in a cluster.
/// Clusters are ordered by their smallest member; members ascend.
inline std::vector<std::vector<int>> cluster(const DistanceMatrix& d) {
  const auto labels = dbscan(d, 1.0, 1);
  int count = 0;
  for (int l : labels) count = std::max(count, l + 1);
  std::vector<std::vector<int>> parts(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < labels.size(); ++i)
    parts[static_cast<std::size_t>(labels[i])].push_back(static_cast<int>(i));
  return parts;
}

// ---------------------------------------------------------------------------
// Segments

struct Segment {
  int id = 0;
  std::vector<int> member_ids;
  std::vector<std::string> xpaths;
  Rect bbox;

  friend bool operator==(const Segment&, const Segment&) = default;
};

/// One segment per cluster, ordered by (bbox.y, bbox.x); ids follow that order.
inline std::vector<Segment> segments_from_clusters(const std::vector<std::vector<int>>& partition,
                                                   std::span<const VisualObject> objects) {
  std::vector<Segment> out;
  for (const auto& members : partition) {
    if (members.empty()) continue;
    Segment s;
    s.member_ids = members;
    s.bbox = objects[static_cast<std::size_t>(members.front())].box;
    for (int m : members) {
      const auto& o = objects[static_cast<std::size_t>(m)];
      s.xpaths.push_back(o.xpath);
      s.bbox = hull(s.bbox, o.box);
    }
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(), [](const Segment& a, const Segment& b) {
    return std::tie(a.bbox.y, a.bbox.x) < std::tie(b.bbox.y, b.bbox.x);
  });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

struct SegmentationResult {
  std::vector<Segment> segments;
  bool empty_page = false;  // nothing visible: segments is empty
  bool no_adjacency = false;  // factors defaulted to 0
  std::vector<VisualObject> objects;
  std::vector<FeatureVector> features;
  Neighborhood neighborhood;
  ScalingFactors factors;
  DistanceMatrix distances;
};

/// Abstraction -> features -> adjacency -> factors -> distances -> clusters -> segments.
inline SegmentationResult segment_page(const PageSnapshot& snapshot) {
  SegmentationResult r;
  try {
    r.objects = abstract_page(snapshot);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyPage) throw;
    r.empty_page = true;
    return r;
  }
  r.features = build_features(r.objects, snapshot.screenshot);
  std::vector<Rect> boxes;
  boxes.reserve(r.objects.size());
  for (const auto& o : r.objects) boxes.push_back(o.box);
  r.neighborhood = build_adjacency(boxes);
  try {
    r.factors = compute_factors(boxes, r.neighborhood);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyAdjacency) throw;
    r.no_adjacency = true;
    r.factors = {};
  }
  r.distances = build_distance_matrix(r.features, r.factors);
  r.segments = segments_from_clusters(cluster(r.distances), r.objects);
  return r;
}

inline nlohmann::json segments_to_json(const std::string& url, const std::string& generated_at,
                                       std::span<const Segment> segments) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : segments) {
    arr.push_back({{"id", s.id},
                   {"bbox", {{"x", s.bbox.x}, {"y", s.bbox.y}, {"w", s.bbox.w}, {"h", s.bbox.h}}},
                   {"xpaths", s.xpaths}});
  }
  return {{"url", url}, {"generated_at", generated_at}, {"segments", std::move(arr)}};
}

}  // namespace cortex
