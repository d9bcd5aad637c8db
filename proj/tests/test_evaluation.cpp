#include <gtest/gtest.h>

#include <random>

#include "cortex/evaluation.hpp"
#include "support/expect.hpp"
#include "support/oracles.hpp"

using namespace cortex;

namespace {

using Rects = std::vector<Rect>;

std::vector<Rect> random_rects(std::mt19937& rng, int n, bool integer) {
  std::uniform_real_distribution<double> pos(0, 60);
  std::uniform_real_distribution<double> size(1, 30);
  Rects out;
  for (int i = 0; i < n; ++i) {
    Rect r{pos(rng), pos(rng), size(rng), size(rng)};
    if (integer) r = {std::round(r.x), std::round(r.y), std::round(r.w), std::round(r.h)};
    out.push_back(r);
  }
  return out;
}

auto raster = [](const Rects& in, const Rects& out) { return static_cast<double>(oracle::raster_area(in, out)); };
auto grid = [](const Rects& in, const Rects& out) { return oracle::grid_area(in, out); };

}  // namespace

TEST(PairToTruth, Cases) {
  const Rects truth{{0, 0, 10, 10}, {100, 0, 10, 10}};
  EXPECT_EQ(pair_to_truth({5, 5, 10, 10}, truth), 0u);
  EXPECT_EQ(pair_to_truth({80, 40, 5, 5}, truth), 1u);  // disjoint: nearest centroid
  EXPECT_FALSE(pair_to_truth({0, 0, 1, 1}, Rects{}));
}

TEST(PairToTruth, LargestOverlapWinsAndTiesGoLow) {
  const Rects truth{{0, 0, 10, 10}, {8, 0, 10, 10}, {0, 0, 10, 10}};
  EXPECT_EQ(pair_to_truth({7, 0, 10, 10}, truth), 1u);
  EXPECT_EQ(pair_to_truth({0, 0, 10, 10}, truth), 0u);
}

TEST(PairToTruth, CentroidMetric) {
  const Rects truth{{0, 0, 100, 100}, {60, 60, 10, 10}};
  EXPECT_EQ(pair_to_truth({60, 60, 12, 12}, truth, PairingMetric::Overlap), 0u);
  EXPECT_EQ(pair_to_truth({60, 60, 12, 12}, truth, PairingMetric::Centroid), 1u);
}

TEST(Areas, HandCases) {
  const Rects psi{{0, 0, 10, 10}};
  EXPECT_EQ(tp_area(psi, Rects{{0, 0, 10, 10}}), 100);
  EXPECT_EQ(fp_area(psi, Rects{{0, 0, 10, 10}}), 0);
  EXPECT_EQ(fn_area(psi, Rects{{0, 0, 10, 10}}), 0);

  EXPECT_EQ(tp_area(psi, Rects{{5, 0, 10, 10}}), 50);
  EXPECT_EQ(fp_area(psi, Rects{{5, 0, 10, 10}}), 50);
  EXPECT_EQ(fn_area(psi, Rects{{5, 0, 10, 10}}), 50);

  EXPECT_EQ(tp_area(psi, Rects{{50, 50, 10, 10}}), 0);
  EXPECT_EQ(fp_area(psi, Rects{{50, 50, 10, 10}}), 100);
  EXPECT_EQ(fn_area(psi, Rects{{50, 50, 10, 10}}), 100);

  EXPECT_EQ(fn_area(Rects{}, Rects{{0, 0, 10, 10}}), 100);
  EXPECT_EQ(fp_area(psi, Rects{}), 100);
}

TEST(Evaluate, HandCases) {
  const auto perfect = evaluate(Rects{{0, 0, 10, 10}}, Rects{{0, 0, 10, 10}});
  EXPECT_EQ(perfect.precision, 1.0);
  EXPECT_EQ(perfect.recall, 1.0);
  EXPECT_EQ(perfect.fmeasure, 1.0);

  const auto half = evaluate(Rects{{0, 0, 10, 10}}, Rects{{5, 0, 10, 10}});
  EXPECT_EQ(half.precision, 0.5);
  EXPECT_EQ(half.recall, 0.5);
  EXPECT_EQ(half.fmeasure, 0.5);

  const auto none = evaluate(Rects{}, Rects{{0, 0, 10, 10}});
  EXPECT_EQ(none.recall, 0.0);
  EXPECT_EQ(none.precision, 0.0);
  EXPECT_EQ(none.fmeasure, 0.0);

  const auto both_empty = evaluate(Rects{}, Rects{});
  EXPECT_EQ(both_empty.precision, 1.0);
  EXPECT_EQ(both_empty.recall, 1.0);
  EXPECT_EQ(both_empty.fmeasure, 1.0);
}

TEST(Evaluate, ScoresStayInUnitInterval) {
  std::mt19937 rng(10);
  for (int round = 0; round < 200; ++round) {
    const auto r = evaluate(random_rects(rng, round % 5, false), random_rects(rng, round % 4 + 1, false));
    for (double v : {r.precision, r.recall, r.fmeasure}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    EXPECT_GE(r.tp, 0.0);
    EXPECT_GE(r.fp, 0.0);
    EXPECT_GE(r.fn, 0.0);
  }
}

TEST(Evaluate, ScalingBothSetsLeavesScoresUnchanged) {
  std::mt19937 rng(12);
  for (int round = 0; round < 100; ++round) {
    const Rects out = random_rects(rng, 3, true);
    const Rects truth = random_rects(rng, 2, true);
    auto scaled = [](Rects rs) {
      for (auto& r : rs) r = {r.x * 4, r.y * 4, r.w * 4, r.h * 4};
      return rs;
    };
    const auto a = evaluate(out, truth);
    const auto b = evaluate(scaled(out), scaled(truth));
    EXPECT_NEAR(a.precision, b.precision, 1e-12);
    EXPECT_NEAR(a.recall, b.recall, 1e-12);
    EXPECT_NEAR(a.fmeasure, b.fmeasure, 1e-12);
  }
}

TEST(Areas, MatchRasterOracleOnIntegerRects) {
  std::mt19937 rng(31);
  std::uniform_int_distribution<int> count(0, 4);
  for (int round = 0; round < 200; ++round) {
    const Rects out = random_rects(rng, count(rng), true);
    const Rects truth = random_rects(rng, count(rng), true);
    for (bool overlap : {true, false}) {
      const auto metric = overlap ? PairingMetric::Overlap : PairingMetric::Centroid;
      const auto want = oracle::areas(out, truth, overlap, raster);
      ASSERT_EQ(tp_area(out, truth, metric), want.tp);
      ASSERT_EQ(fp_area(out, truth, metric), want.fp);
      ASSERT_EQ(fn_area(out, truth, metric), want.fn);
    }
  }
}

TEST(Areas, MatchGridOracleOnRealRects) {
  std::mt19937 rng(32);
  std::uniform_int_distribution<int> count(0, 4);
  for (int round = 0; round < 200; ++round) {
    const Rects out = random_rects(rng, count(rng), false);
    const Rects truth = random_rects(rng, count(rng), false);
    const auto want = oracle::areas(out, truth, true, grid);
    EXPECT_NEAR(tp_area(out, truth), want.tp, 0.5);
    EXPECT_NEAR(fp_area(out, truth), want.fp, 0.5);
    EXPECT_NEAR(fn_area(out, truth), want.fn, 0.5);
  }
}

TEST(Welch, HandComputed) {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{2, 3, 4, 5, 6};
  const auto r = welch_t(a, b);
  EXPECT_NEAR(r.t, -1.0, 1e-12);
  EXPECT_NEAR(r.dof, 8.0, 1e-12);
  EXPECT_FALSE(r.zero_variance);
  EXPECT_EQ(welch_t(b, a).t, -r.t);
}

TEST(Welch, UnequalVariances) {
  // means 2 and 6, variances 1 and 4, n = 3 each: se^2 = 1/3 + 4/3 = 5/3
  const std::vector<double> a{1, 2, 3};
  const std::vector<double> b{4, 6, 8};
  const auto r = welch_t(a, b);
  EXPECT_NEAR(r.t, -4.0 / std::sqrt(5.0 / 3.0), 1e-12);
  const double s1 = 1.0 / 3.0, s2 = 4.0 / 3.0;
  EXPECT_NEAR(r.dof, (s1 + s2) * (s1 + s2) / (s1 * s1 / 2 + s2 * s2 / 2), 1e-12);
}

TEST(Welch, IdenticalAndConstantSamples) {
  const std::vector<double> a{0.5, 0.7, 0.9};
  EXPECT_EQ(welch_t(a, a).t, 0.0);
  const std::vector<double> c{1, 1, 1};
  const auto same = welch_t(c, c);
  EXPECT_TRUE(same.zero_variance);
  EXPECT_EQ(same.t, 0.0);
  EXPECT_EQ(same.dof, 4.0);
  const std::vector<double> d{2, 2};
  EXPECT_EQ(welch_t(c, d).t, -INFINITY);
}

TEST(Welch, NeedsTwoSamplesPerGroup) {
  const std::vector<double> one{1};
  const std::vector<double> two{1, 2};
  EXPECT_EQ(test::error_code_of([&] { welch_t(one, two); }), ErrorCode::InsufficientSamples);
}

TEST(TruthJson, RoundTripAndValidation) {
  GroundTruth g;
  g.subject_id = "s1";
  g.segments = {{{1, 2, 3, 4}, "header"}, {{5, 6, 7, 8}, std::nullopt}};
  const auto back = truth_from_json(truth_to_json(g));
  EXPECT_EQ(back.subject_id, "s1");
  EXPECT_EQ(back.boxes(), g.boxes());
  EXPECT_EQ(back.segments[0].label, "header");
  EXPECT_EQ(test::error_code_of([] { truth_from_json(nlohmann::json::parse(R"({"segments":[{"x":1}]})")); }),
            ErrorCode::SchemaViolation);
  EXPECT_EQ(test::error_code_of([] { truth_from_json(nlohmann::json::array()); }), ErrorCode::SchemaViolation);
}
