#pragma once

// The checked-in fixture set, as generated in memory. make_fixtures writes it
// to disk; test_fixtures checks the files still match.

#include <random>
#include <string>
#include <vector>

#include "cortex/evaluation.hpp"
#include "support/synthetic.hpp"

namespace cortex::test {

struct Fixture {
  std::string name;
  PageSnapshot snapshot;
  GroundTruth truth;  // empty segments for performance fixtures
};

inline GroundTruth make_truth(const std::string& id, const std::vector<Rect>& boxes,
                              const std::vector<std::string>& labels = {}) {
  GroundTruth g;
  g.subject_id = id;
  for (std::size_t i = 0; i < boxes.size(); ++i)
    g.segments.push_back({boxes[i], i < labels.size() ? std::optional<std::string>(labels[i]) : std::nullopt});
  return g;
}

inline PageSnapshot perf_page(int objects) {
  std::mt19937 rng(static_cast<unsigned>(objects));
  return random_page(rng, objects);
}

inline std::vector<Fixture> all_fixtures() {
  std::vector<Fixture> out;
  auto three = three_block_page();
  out.push_back({"three_block", three.snapshot, make_truth("three_block", three.truth, {"block-1", "block-2", "block-3"})});
  auto nav = nav_page();
  out.push_back({"nav_page", nav.snapshot, make_truth("nav_page", nav.truth, {"nav", "resources", "about"})});
  for (int n : {250, 1000}) out.push_back({"perf_" + std::to_string(n), perf_page(n), {}});
  return out;
}

}  // namespace cortex::test
