#pragma once

// The `cortex` command line: capture, segment, eval, bench.
//
// Exit codes: 0 success, 1 usage error, 2 capture failure, 3 invalid snapshot,
// 4 missing or invalid evaluation input.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cortex/bench.hpp"
#include "cortex/capture/capture.hpp"
#include "cortex/clustering.hpp"
#include "cortex/evaluation.hpp"
#include "cortex/overlay.hpp"
#include "cortex/snapshot.hpp"

namespace cortex::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kCaptureFailed = 2,
  kInvalidSnapshot = 3,
  kBadEvalInput = 4,
};

/// ISO-8601 UTC timestamp. $SOURCE_DATE_EPOCH pins it for reproducible output.
inline std::string timestamp_now() {
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) t = std::strtoll(epoch, nullptr, 10);
  std::tm tm{};
  ::gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

inline bool parse_viewport(const std::string& text, int& w, int& h) {
  const auto x = text.find('x');
  if (x == std::string::npos) return false;
  try {
    std::size_t used = 0;
    w = std::stoi(text.substr(0, x), &used);
    if (used != x) return false;
    h = std::stoi(text.substr(x + 1), &used);
    if (used != text.size() - x - 1) return false;
  } catch (const std::exception&) {
    return false;
  }
  return w > 0 && h > 0;
}

inline PairingMetric parse_pairing(const std::string& s) {
  return s == "centroid" ? PairingMetric::Centroid : PairingMetric::Overlap;
}

inline std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, path.string() + ": cannot write");
  out << text;
}

struct Globals {
  bool json = false;
  bool quiet = false;
};

inline std::filesystem::path default_extractor(const char* argv0) {
  if (const char* env = std::getenv("CORTEX_EXTRACTOR"); env && *env) return env;
  std::error_code ec;
  const auto exe = std::filesystem::weakly_canonical(argv0 ? argv0 : "", ec);
  return exe.parent_path().parent_path() / "share" / "cortex" / "dom_extractor.js";
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Visual web page segmentation"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json, "Machine-readable output on stdout");
  app.add_flag("--quiet", g.quiet, "Suppress informational messages");

  // capture
  auto* cap = app.add_subcommand("capture", "Capture a page snapshot with a headless browser");
  capture::CaptureConfig cfg;
  std::string cap_out = "snapshot";
  std::string viewport = "1366x768";
  std::string extractor_path;
  cap->add_option("url", cfg.url, "Page URL")->required();
  cap->add_option("-o,--out", cap_out, "Snapshot directory");
  cap->add_option("--viewport", viewport, "Viewport WxH");
  cap->add_option("--timeout", cfg.nav_timeout_s, "Navigation timeout in seconds");
  cap->add_option("--settle", cfg.settle_delay_s, "Delay after the load event in seconds");
  cap->add_option("--browser", cfg.browser, "Browser binary");
  cap->add_option("--extractor", extractor_path, "In-page node extractor script");
  cap->add_flag("--verify-idempotent", cfg.verify_idempotent, "Run the extractor twice and compare");

  // segment
  auto* seg = app.add_subcommand("segment", "Segment a captured snapshot");
  std::string seg_dir;
  std::string seg_out;
  std::string overlay_out;
  std::string generated_at;
  seg->add_option("snapshot", seg_dir, "Snapshot directory")->required();
  seg->add_option("-o,--out", seg_out, "segments.json path (default: <snapshot>/segments.json)");
  seg->add_option("--overlay", overlay_out, "Write a PNG with segments drawn on the screenshot");
  seg->add_option("--generated-at", generated_at, "Timestamp recorded in segments.json");

  // eval
  auto* ev = app.add_subcommand("eval", "Score segments against ground truth");
  std::string ev_segments;
  std::string ev_truth;
  std::string pairing = "overlap";
  ev->add_option("segments", ev_segments, "segments.json")->required();
  ev->add_option("truth", ev_truth, "truth.json")->required();
  ev->add_option("--pairing", pairing, "Segment pairing: overlap or centroid")
      ->check(CLI::IsMember({"overlap", "centroid"}));

  // bench
  auto* bench = app.add_subcommand("bench", "Segment and score a manifest of subjects");
  std::string manifest;
  std::string compare_path;
  std::string report_path;
  bench->add_option("manifest", manifest, "JSON list of {snapshot_dir, truth_file}")->required();
  bench->add_option("--compare", compare_path, "Another tool's bench report for Welch t columns");
  bench->add_option("--report", report_path, "Write the JSON report here");
  bench->add_option("--pairing", pairing, "Segment pairing: overlap or centroid")
      ->check(CLI::IsMember({"overlap", "centroid"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }
  auto info = [&](const std::string& msg) {
    if (!g.quiet) err << msg << '\n';
  };

  if (*cap) {
    if (!parse_viewport(viewport, cfg.viewport_w, cfg.viewport_h)) {
      err << "capture: bad --viewport '" << viewport << "', expected WxH\n";
      return kUsage;
    }
    try {
      const auto script_path = extractor_path.empty() ? default_extractor(argv[0]) : std::filesystem::path(extractor_path);
      std::ifstream in(script_path);
      if (!in) throw Error(ErrorCode::IoFailure, "cannot read extractor script " + script_path.string());
      cfg.extractor_script.assign(std::istreambuf_iterator<char>(in), {});
      const auto s = capture::capture(cfg, cap_out);
      info("captured " + std::to_string(s.nodes.size()) + " nodes into " + cap_out);
      if (g.json) out << nlohmann::json{{"snapshot_dir", cap_out}, {"nodes", s.nodes.size()}}.dump() << '\n';
      return kOk;
    } catch (const std::exception& e) {
      err << "capture failed: " << e.what() << '\n';
      return kCaptureFailed;
    }
  }

  if (*seg) {
    PageSnapshot snapshot;
    try {
      snapshot = load_snapshot(seg_dir);
    } catch (const std::exception& e) {
      err << "invalid snapshot: " << e.what() << '\n';
      return kInvalidSnapshot;
    }
    auto [result, seconds] = timed_segment(snapshot);
    if (result.empty_page) info("warning: page has no visible objects; no segments");
    const auto doc = segments_to_json(snapshot.url, generated_at.empty() ? timestamp_now() : generated_at,
                                      result.segments);
    const std::filesystem::path target = seg_out.empty() ? std::filesystem::path(seg_dir) / "segments.json"
                                                         : std::filesystem::path(seg_out);
    try {
      write_text(target, doc.dump(2) + "\n");
      if (!overlay_out.empty()) write_png(render_overlay(snapshot.screenshot, result.segments), overlay_out);
    } catch (const std::exception& e) {
      err << "segment: " << e.what() << '\n';
      return kUsage;
    }
    info(std::to_string(result.objects.size()) + " objects -> " + std::to_string(result.segments.size()) +
         " segments in " + fixed(seconds, 6) + " s");
    if (g.json) out << doc.dump() << '\n';
    return kOk;
  }

  if (*ev) {
    std::vector<Rect> outputs;
    GroundTruth truth;
    try {
      if (!std::filesystem::is_regular_file(ev_truth)) throw Error(ErrorCode::IoFailure, ev_truth + ": not found");
      truth = load_truth(ev_truth);
      outputs = segment_boxes_from_json(read_json_file(ev_segments));
    } catch (const std::exception& e) {
      err << "eval: " << e.what() << '\n';
      return kBadEvalInput;
    }
    const auto report = evaluate(outputs, truth.boxes(), parse_pairing(pairing));
    if (g.json) {
      out << report_to_json(report).dump() << '\n';
    } else {
      out << "precision " << fixed(report.precision) << "\nrecall    " << fixed(report.recall)
          << "\nf-measure " << fixed(report.fmeasure) << "\ntp " << fixed(report.tp, 1) << "  fp "
          << fixed(report.fp, 1) << "  fn " << fixed(report.fn, 1) << '\n';
    }
    return kOk;
  }

  if (*bench) {
    std::vector<BenchSubject> subjects;
    std::optional<ToolResults> other;
    try {
      subjects = load_manifest(manifest);
      if (!compare_path.empty()) other = tool_results_from_json(read_json_file(compare_path));
    } catch (const std::exception& e) {
      err << "bench: " << e.what() << '\n';
      return kBadEvalInput;
    }
    BenchSummary summary = benchmark(subjects, {}, parse_pairing(pairing));
    if (other) {
      try {
        summary.comparison = compare(tool_results(summary), *other);
      } catch (const std::exception& e) {
        err << "bench: comparison skipped: " << e.what() << '\n';
      }
    }
    const auto doc = summary_to_json(summary);
    if (!report_path.empty()) {
      try {
        write_text(report_path, doc.dump(2) + "\n");
      } catch (const std::exception& e) {
        err << "bench: " << e.what() << '\n';
        return kUsage;
      }
    }
    if (g.json) {
      out << doc.dump() << '\n';
      return kOk;
    }
    out << std::left << std::setw(24) << "subject" << std::right << std::setw(10) << "precision" << std::setw(10)
        << "recall" << std::setw(10) << "f" << std::setw(12) << "seconds" << "  status\n";
    for (const auto& row : summary.rows) {
      out << std::left << std::setw(24) << row.subject_id << std::right;
      if (row.ok) {
        out << std::setw(10) << fixed(row.report.precision) << std::setw(10) << fixed(row.report.recall)
            << std::setw(10) << fixed(row.report.fmeasure) << std::setw(12) << fixed(row.seconds, 6) << "  ok\n";
      } else {
        out << std::setw(10) << "-" << std::setw(10) << "-" << std::setw(10) << "-" << std::setw(12) << "-"
            << "  FAILED: " << row.error << '\n';
      }
    }
    out << std::left << std::setw(24) << ("mean (" + std::to_string(summary.succeeded) + ")") << std::right
        << std::setw(10) << fixed(summary.mean_precision) << std::setw(10) << fixed(summary.mean_recall)
        << std::setw(10) << fixed(summary.mean_fmeasure) << std::setw(12) << fixed(summary.mean_seconds, 6) << '\n';
    if (summary.comparison) {
      auto line = [&](const char* name, const WelchResult& w) {
        out << std::left << std::setw(24) << (std::string("welch t ") + name) << std::right << std::setw(10)
            << fixed(w.t) << "  dof " << fixed(w.dof, 2) << (w.zero_variance ? "  (zero variance)" : "") << '\n';
      };
      line("precision", summary.comparison->precision);
      line("recall", summary.comparison->recall);
      line("f-measure", summary.comparison->fmeasure);
    }
    return kOk;
  }
  return kUsage;
}

}  // namespace cortex::cli
