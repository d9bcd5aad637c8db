#include <gtest/gtest.h>

#include <random>

#include "cortex/color.hpp"
#include "support/palette.hpp"

using namespace cortex;

TEST(SrgbToLab, NamedPaletteMatchesReference) {
  for (const auto& c : test::kPalette) {
    const LabColor lab = srgb_to_lab(c.rgb);
    EXPECT_NEAR(lab.L, c.lab.L, 0.05) << c.name;
    EXPECT_NEAR(lab.a, c.lab.a, 0.05) << c.name;
    EXPECT_NEAR(lab.b, c.lab.b, 0.05) << c.name;
  }
}

TEST(SrgbToLab, WhiteIsL100AndNeutral) {
  const LabColor w = srgb_to_lab({255, 255, 255});
  EXPECT_NEAR(w.L, 100.0, 1e-3);
  EXPECT_NEAR(w.a, 0.0, 0.01);
  EXPECT_NEAR(w.b, 0.0, 0.01);
}

TEST(DeltaE76, WhiteBlackIs100) {
  EXPECT_NEAR(delta_e76(srgb_to_lab({255, 255, 255}), srgb_to_lab({0, 0, 0})), 100.0, 0.05);
}

TEST(DeltaE76, IsAMetricOnRandomTriples) {
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> ch(0, 255);
  auto random_lab = [&] {
    return srgb_to_lab({static_cast<std::uint8_t>(ch(rng)), static_cast<std::uint8_t>(ch(rng)),
                        static_cast<std::uint8_t>(ch(rng))});
  };
  for (int i = 0; i < 1000; ++i) {
    const LabColor p = random_lab(), q = random_lab(), r = random_lab();
    EXPECT_EQ(delta_e76(p, p), 0.0);
    EXPECT_GE(delta_e76(p, q), 0.0);
    EXPECT_EQ(delta_e76(p, q), delta_e76(q, p));
    EXPECT_LE(delta_e76(p, r), delta_e76(p, q) + delta_e76(q, r) + 1e-9);
  }
}

TEST(ParseCssColor, FunctionalAndHexForms) {
  EXPECT_EQ(parse_css_color("rgb(1, 2, 3)"), (Rgb{1, 2, 3}));
  EXPECT_EQ(parse_css_color("rgba(10, 20, 30, 0.5)"), (Rgb{10, 20, 30}));
  EXPECT_EQ(parse_css_color("rgb(10 20 30 / 50%)"), (Rgb{10, 20, 30}));
  EXPECT_EQ(parse_css_color("  RGB(255,255,0) "), (Rgb{255, 255, 0}));
  EXPECT_EQ(parse_css_color("#fff"), (Rgb{255, 255, 255}));
  EXPECT_EQ(parse_css_color("#ff0000"), (Rgb{255, 0, 0}));
  EXPECT_EQ(parse_css_color("#00ff0080"), (Rgb{0, 255, 0}));
  EXPECT_EQ(parse_css_color("rgb(100%, 0%, 50%)"), (Rgb{255, 0, 128}));
}

TEST(ParseCssColor, RejectsUnsupported) {
  EXPECT_FALSE(parse_css_color(""));
  EXPECT_FALSE(parse_css_color("red"));
  EXPECT_FALSE(parse_css_color("hsl(0, 100%, 50%)"));
  EXPECT_FALSE(parse_css_color("#12"));
  EXPECT_FALSE(parse_css_color("rgb(1, 2)"));
  EXPECT_FALSE(parse_css_color("rgb(a, b, c)"));
}
