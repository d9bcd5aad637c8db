#pragma once

// Area-overlap effectiveness scoring of generated segments against ground truth,
// and Welch's unequal-variance t statistic for comparing tools across subjects.
//
// Each generated segment is paired with one truth segment (and each truth
// segment with one generated segment). True positives are the paired
// intersections, false positives the unpaired remainder of generated segments,
// false negatives the unpaired remainder of truth segments. Scores are computed
// for the subject as a whole; nothing is averaged.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cortex/error.hpp"
#include "cortex/geometry.hpp"

namespace cortex {

struct TruthSegment {
  Rect box;
  std::optional<std::string> label;

  friend bool operator==(const TruthSegment&, const TruthSegment&) = default;
};

struct GroundTruth {
  std::string subject_id;
  std::vector<TruthSegment> segments;

  std::vector<Rect> boxes() const {
    std::vector<Rect> out;
    out.reserve(segments.size());
    for (const auto& s : segments) out.push_back(s.box);
    return out;
  }

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

enum class PairingMetric {
  Overlap,   // largest intersection area, nearest centroid when nothing overlaps
  Centroid,  // nearest centroid
};

namespace detail {

inline double centroid_distance(const Rect& a, const Rect& b) {
  const double dx = a.center().x - b.center().x;
  const double dy = a.center().y - b.center().y;
  return std::sqrt(dx * dx + dy * dy);
}

inline std::optional<std::size_t> nearest_centroid(const Rect& r, std::span<const Rect> others) {
  std::optional<std::size_t> best;
  double best_d = 0.0;
  for (std::size_t i = 0; i < others.size(); ++i) {
    const double d = centroid_distance(r, others[i]);
    if (!best || d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return best;
}

}  // namespace detail

/// The counterpart of `r` among `others`; nullopt when `others` is empty. Ties
/// resolve to the lowest index.
inline std::optional<std::size_t> pair_to(const Rect& r, std::span<const Rect> others,
                                          PairingMetric metric = PairingMetric::Overlap) {
  if (metric == PairingMetric::Overlap) {
    std::optional<std::size_t> best;
    double best_area = 0.0;
    for (std::size_t i = 0; i < others.size(); ++i) {
      const double a = intersection_area(r, others[i]);
      if (a > best_area) {
        best = i;
        best_area = a;
      }
    }
    if (best) return best;
  }
  return detail::nearest_centroid(r, others);
}

/// Pairs a generated segment with a truth segment.
inline std::optional<std::size_t> pair_to_truth(const Rect& output, std::span<const Rect> truth,
                                                PairingMetric metric = PairingMetric::Overlap) {
  return pair_to(output, truth, metric);
}

inline double tp_area(std::span<const Rect> outputs, std::span<const Rect> truth,
                      PairingMetric metric = PairingMetric::Overlap) {
  double total = 0.0;
  for (const Rect& psi : outputs)
    if (auto j = pair_to(psi, truth, metric)) total += intersection_area(psi, truth[*j]);
  return total;
}

inline double fp_area(std::span<const Rect> outputs, std::span<const Rect> truth,
                      PairingMetric metric = PairingMetric::Overlap) {
  double total = 0.0;
  for (const Rect& psi : outputs) {
    auto j = pair_to(psi, truth, metric);
    total += j ? difference_area(psi, truth[*j]) : psi.area();
  }
  return total;
}

inline double fn_area(std::span<const Rect> outputs, std::span<const Rect> truth,
                      PairingMetric metric = PairingMetric::Overlap) {
  double total = 0.0;
  for (const Rect& gamma : truth) {
    auto i = pair_to(gamma, outputs, metric);
    total += i ? difference_area(gamma, outputs[*i]) : gamma.area();
  }
  return total;
}

struct EvalReport {
  double tp = 0.0;
  double fp = 0.0;
  double fn = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double fmeasure = 0.0;
  std::vector<std::optional<std::size_t>> pairing;          // output -> truth
  std::vector<std::optional<std::size_t>> reverse_pairing;  // truth -> output
};

inline EvalReport evaluate(std::span<const Rect> outputs, std::span<const Rect> truth,
                           PairingMetric metric = PairingMetric::Overlap) {
  EvalReport r;
  r.tp = tp_area(outputs, truth, metric);
  r.fp = fp_area(outputs, truth, metric);
  r.fn = fn_area(outputs, truth, metric);
  for (const Rect& psi : outputs) r.pairing.push_back(pair_to(psi, truth, metric));
  for (const Rect& gamma : truth) r.reverse_pairing.push_back(pair_to(gamma, outputs, metric));

  const bool both_empty = outputs.empty() && truth.empty();
  if (r.tp + r.fp > 0.0) {
    r.precision = r.tp / (r.tp + r.fp);
  } else {
    r.precision = both_empty ? 1.0 : 0.0;
  }
  if (r.tp + r.fn > 0.0) {
    r.recall = r.tp / (r.tp + r.fn);
  } else {
    r.recall = both_empty ? 1.0 : 0.0;
  }
  const double pr = r.precision + r.recall;
  r.fmeasure = pr > 0.0 ? 2.0 * r.precision * r.recall / pr : 0.0;
  return r;
}

// ---------------------------------------------------------------------------
// Welch's t-test

struct WelchResult {
  double t = 0.0;
  double dof = 0.0;
  bool zero_variance = false;  // both samples constant; t is 0 (equal means) or +-inf
};

inline WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw Error(ErrorCode::InsufficientSamples, "Welch's t-test needs at least two samples per group");
  auto moments = [](std::span<const double> xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::pair{mean, ss / static_cast<double>(xs.size() - 1)};
  };
  const auto [mean_a, var_a] = moments(a);
  const auto [mean_b, var_b] = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double sa = var_a / na;
  const double sb = var_b / nb;
  WelchResult r;
  if (sa + sb == 0.0) {
    r.zero_variance = true;
    r.dof = na + nb - 2.0;
    if (mean_a == mean_b) {
      r.t = 0.0;
    } else {
      r.t = mean_a > mean_b ? INFINITY : -INFINITY;
    }
    return r;
  }
  r.t = (mean_a - mean_b) / std::sqrt(sa + sb);
  r.dof = (sa + sb) * (sa + sb) / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  return r;
}

// ---------------------------------------------------------------------------
// File formats

inline GroundTruth truth_from_json(const nlohmann::json& j) {
  auto bad = [](const std::string& why) { throw Error(ErrorCode::SchemaViolation, "truth: " + why); };
  if (!j.is_object() || !j.contains("segments") || !j.at("segments").is_array())
    bad("expected {subject_id, segments: [...]}");
  GroundTruth g;
  if (j.contains("subject_id")) {
    if (!j.at("subject_id").is_string()) bad("subject_id must be a string");
    g.subject_id = j.at("subject_id").get<std::string>();
  }
  for (const auto& s : j.at("segments")) {
    TruthSegment t;
    for (const char* key : {"x", "y", "w", "h"})
      if (!s.contains(key) || !s.at(key).is_number()) bad(std::string("segment.") + key + " must be a number");
    t.box = {s.at("x").get<double>(), s.at("y").get<double>(), s.at("w").get<double>(),
             s.at("h").get<double>()};
    if (t.box.w < 0.0 || t.box.h < 0.0) bad("segment with negative size");
    if (s.contains("label") && s.at("label").is_string()) t.label = s.at("label").get<std::string>();
    g.segments.push_back(std::move(t));
  }
  return g;
}

inline nlohmann::json truth_to_json(const GroundTruth& g) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& s : g.segments) {
    nlohmann::json e{{"x", s.box.x}, {"y", s.box.y}, {"w", s.box.w}, {"h", s.box.h}};
    if (s.label) e["label"] = *s.label;
    arr.push_back(std::move(e));
  }
  return {{"subject_id", g.subject_id}, {"segments", std::move(arr)}};
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, path.string() + ": cannot open");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaViolation, path.string() + ": " + e.what());
  }
}

inline GroundTruth load_truth(const std::filesystem::path& path) {
  return truth_from_json(read_json_file(path));
}

/// Bounding boxes from a segments.json document.
inline std::vector<Rect> segment_boxes_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("segments") || !j.at("segments").is_array())
    throw Error(ErrorCode::SchemaViolation, "segments: expected {segments: [...]}");
  std::vector<Rect> out;
  for (const auto& s : j.at("segments")) {
    if (!s.contains("bbox")) throw Error(ErrorCode::SchemaViolation, "segments: entry without bbox");
    const auto& b = s.at("bbox");
    out.push_back({b.at("x").get<double>(), b.at("y").get<double>(), b.at("w").get<double>(),
                   b.at("h").get<double>()});
  }
  return out;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json pairing = nlohmann::json::array();
  for (std::size_t i = 0; i < r.pairing.size(); ++i)
    pairing.push_back({{"output", i}, {"truth", r.pairing[i] ? nlohmann::json(*r.pairing[i]) : nlohmann::json()}});
  return {{"tp", r.tp},           {"fp", r.fp},
          {"fn", r.fn},           {"precision", r.precision},
          {"recall", r.recall},   {"fmeasure", r.fmeasure},
          {"pairing", pairing}};
}

}  // namespace cortex
