#pragma once

// Batch effectiveness/efficiency runs over a manifest of subjects.
//
// Timing covers segmentation only: the snapshot and truth are loaded and
// decoded first, the clock starts right before segment_page and stops once
// all segments exist.

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cortex/clustering.hpp"
#include "cortex/evaluation.hpp"
#include "cortex/snapshot.hpp"

namespace cortex {

template <class Clock = std::chrono::steady_clock, class Segmenter>
auto timed_segment(const PageSnapshot& snapshot, Segmenter&& segmenter) {
  const auto start = Clock::now();
  auto result = segmenter(snapshot);
  const auto stop = Clock::now();
  return std::pair{std::move(result), std::chrono::duration<double>(stop - start).count()};
}

template <class Clock = std::chrono::steady_clock>
auto timed_segment(const PageSnapshot& snapshot) {
  return timed_segment<Clock>(snapshot, [](const PageSnapshot& s) { return segment_page(s); });
}

struct BenchSubject {
  std::filesystem::path snapshot_dir;
  std::filesystem::path truth_file;
};

struct BenchRow {
  std::string subject_id;
  bool ok = false;
  std::string error;
  EvalReport report;
  std::size_t segment_count = 0;
  double seconds = 0.0;
};

struct MetricComparison {
  WelchResult precision;
  WelchResult recall;
  WelchResult fmeasure;
};

struct BenchSummary {
  std::vector<BenchRow> rows;
  std::size_t succeeded = 0;
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_fmeasure = 0.0;
  double mean_seconds = 0.0;
  std::optional<MetricComparison> comparison;
};

/// Replaceable stages, so instrumentation can observe the ordering of I/O and timing.
struct BenchHooks {
  std::function<PageSnapshot(const std::filesystem::path&)> load_snapshot = cortex::load_snapshot;
  std::function<GroundTruth(const std::filesystem::path&)> load_truth = cortex::load_truth;
  std::function<SegmentationResult(const PageSnapshot&)> segment = cortex::segment_page;
};

inline std::vector<Rect> segment_boxes(std::span<const Segment> segments) {
  std::vector<Rect> out;
  out.reserve(segments.size());
  for (const auto& s : segments) out.push_back(s.bbox);
  return out;
}

template <class Clock = std::chrono::steady_clock>
BenchRow run_subject(const BenchSubject& subject, const BenchHooks& hooks = {},
                     PairingMetric metric = PairingMetric::Overlap) {
  BenchRow row;
  row.subject_id = subject.snapshot_dir.filename().string();
  try {
    const GroundTruth truth = hooks.load_truth(subject.truth_file);
    if (!truth.subject_id.empty()) row.subject_id = truth.subject_id;
    const PageSnapshot snapshot = hooks.load_snapshot(subject.snapshot_dir);
    auto [result, seconds] = timed_segment<Clock>(snapshot, hooks.segment);
    row.seconds = seconds;
    row.segment_count = result.segments.size();
    row.report = evaluate(segment_boxes(result.segments), truth.boxes(), metric);
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

/// Per-subject samples of another tool, keyed by metric name.
struct ToolResults {
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> fmeasure;
};

inline MetricComparison compare(const ToolResults& ours, const ToolResults& theirs) {
  return {welch_t(ours.precision, theirs.precision), welch_t(ours.recall, theirs.recall),
          welch_t(ours.fmeasure, theirs.fmeasure)};
}

inline ToolResults tool_results(const BenchSummary& summary) {
  ToolResults r;
  for (const auto& row : summary.rows) {
    if (!row.ok) continue;
    r.precision.push_back(row.report.precision);
    r.recall.push_back(row.report.recall);
    r.fmeasure.push_back(row.report.fmeasure);
  }
  return r;
}

template <class Clock = std::chrono::steady_clock>
BenchSummary benchmark(const std::vector<BenchSubject>& subjects, const BenchHooks& hooks = {},
                       PairingMetric metric = PairingMetric::Overlap) {
  BenchSummary s;
  for (const auto& subject : subjects) {
    s.rows.push_back(run_subject<Clock>(subject, hooks, metric));
    const BenchRow& row = s.rows.back();
    if (!row.ok) continue;
    ++s.succeeded;
    s.mean_precision += row.report.precision;
    s.mean_recall += row.report.recall;
    s.mean_fmeasure += row.report.fmeasure;
    s.mean_seconds += row.seconds;
  }
  if (s.succeeded > 0) {
    const double n = static_cast<double>(s.succeeded);
    s.mean_precision /= n;
    s.mean_recall /= n;
    s.mean_fmeasure /= n;
    s.mean_seconds /= n;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Manifest and report formats

/// Manifest: JSON list of {snapshot_dir, truth_file}; relative paths resolve
/// against the manifest's directory.
inline std::vector<BenchSubject> load_manifest(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  if (!j.is_array()) throw Error(ErrorCode::SchemaViolation, path.string() + ": expected a list");
  const auto base = path.parent_path();
  std::vector<BenchSubject> out;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("snapshot_dir") || !e.contains("truth_file") ||
        !e.at("snapshot_dir").is_string() || !e.at("truth_file").is_string())
      throw Error(ErrorCode::SchemaViolation, path.string() + ": entries need snapshot_dir and truth_file");
    auto resolve = [&](const std::string& p) {
      std::filesystem::path fp(p);
      return fp.is_absolute() ? fp : base / fp;
    };
    out.push_back({resolve(e.at("snapshot_dir").get<std::string>()),
                   resolve(e.at("truth_file").get<std::string>())});
  }
  return out;
}

/// Reads a {subjects: [{subject_id, precision, recall, fmeasure}]} document
/// (the format bench writes) as another tool's samples.
inline ToolResults tool_results_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("subjects") || !j.at("subjects").is_array())
    throw Error(ErrorCode::SchemaViolation, "compare: expected {subjects: [...]}");
  ToolResults r;
  for (const auto& s : j.at("subjects")) {
    if (s.contains("ok") && s.at("ok").is_boolean() && !s.at("ok").get<bool>()) continue;
    for (const char* key : {"precision", "recall", "fmeasure"})
      if (!s.contains(key) || !s.at(key).is_number())
        throw Error(ErrorCode::SchemaViolation, std::string("compare: subject without ") + key);
    r.precision.push_back(s.at("precision").get<double>());
    r.recall.push_back(s.at("recall").get<double>());
    r.fmeasure.push_back(s.at("fmeasure").get<double>());
  }
  return r;
}

inline nlohmann::json welch_to_json(const WelchResult& w) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  return {{"t", num(w.t)}, {"dof", num(w.dof)}, {"zero_variance", w.zero_variance}};
}

inline nlohmann::json summary_to_json(const BenchSummary& s, std::string_view tool = "cortex") {
  nlohmann::json subjects = nlohmann::json::array();
  for (const auto& row : s.rows) {
    nlohmann::json e{{"subject_id", row.subject_id}, {"ok", row.ok}};
    if (row.ok) {
      e["precision"] = row.report.precision;
      e["recall"] = row.report.recall;
      e["fmeasure"] = row.report.fmeasure;
      e["tp"] = row.report.tp;
      e["fp"] = row.report.fp;
      e["fn"] = row.report.fn;
      e["segments"] = row.segment_count;
      e["seconds"] = row.seconds;
    } else {
      e["error"] = row.error;
    }
    subjects.push_back(std::move(e));
  }
  nlohmann::json out{{"tool", tool},
                     {"subjects", std::move(subjects)},
                     {"mean",
                      {{"subjects", s.succeeded},
                       {"precision", s.mean_precision},
                       {"recall", s.mean_recall},
                       {"fmeasure", s.mean_fmeasure},
                       {"seconds", s.mean_seconds}}}};
  if (s.comparison) {
    out["comparison"] = {{"precision", welch_to_json(s.comparison->precision)},
                         {"recall", welch_to_json(s.comparison->recall)},
                         {"fmeasure", welch_to_json(s.comparison->fmeasure)}};
  }
  return out;
}

}  // namespace cortex
