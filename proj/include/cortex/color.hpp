#pragma once

// sRGB -> CIE 1976 L*a*b* (D65, 2 degree observer) and the CIE76 color difference.

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cortex/image.hpp"

namespace cortex {

struct LabColor {
  double L = 0.0;
  double a = 0.0;
  double b = 0.0;

  friend bool operator==(const LabColor&, const LabColor&) = default;
};

namespace detail {

inline double srgb_to_linear(std::uint8_t channel) {
  const double c = channel / 255.0;
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

// IEC 61966-2-1 linear sRGB -> XYZ.
inline constexpr std::array<std::array<double, 3>, 3> kSrgbToXyz{{
    {0.4124564, 0.3575761, 0.1804375},
    {0.2126729, 0.7151522, 0.0721750},
    {0.0193339, 0.1191920, 0.9503041},
}};

// Reference white is the image of sRGB white under the same matrix, so neutral
// inputs land exactly on the L axis.
inline constexpr std::array<double, 3> kWhiteXyz{
    kSrgbToXyz[0][0] + kSrgbToXyz[0][1] + kSrgbToXyz[0][2],
    kSrgbToXyz[1][0] + kSrgbToXyz[1][1] + kSrgbToXyz[1][2],
    kSrgbToXyz[2][0] + kSrgbToXyz[2][1] + kSrgbToXyz[2][2],
};

inline double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  if (t > delta * delta * delta) return std::cbrt(t);
  return t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace detail

inline LabColor srgb_to_lab(Rgb c) {
  const std::array<double, 3> lin{detail::srgb_to_linear(c.r), detail::srgb_to_linear(c.g),
                                  detail::srgb_to_linear(c.b)};
  std::array<double, 3> xyz{};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 3; ++k) xyz[i] += detail::kSrgbToXyz[i][k] * lin[k];
  }
  const double fx = detail::lab_f(xyz[0] / detail::kWhiteXyz[0]);
  const double fy = detail::lab_f(xyz[1] / detail::kWhiteXyz[1]);
  const double fz = detail::lab_f(xyz[2] / detail::kWhiteXyz[2]);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

/// CIE76 color difference: Euclidean distance in L*a*b*.
inline double delta_e76(const LabColor& p, const LabColor& q) {
  const double dl = p.L - q.L;
  const double da = p.a - q.a;
  const double db = p.b - q.b;
  return std::sqrt(dl * dl + da * da + db * db);
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc()) return std::nullopt;
  std::string_view rest(ptr, static_cast<std::size_t>(s.data() + s.size() - ptr));
  if (rest == "%") return v * 255.0 / 100.0;
  if (!rest.empty()) return std::nullopt;
  return v;
}

inline std::optional<int> hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  return std::nullopt;
}

}  // namespace detail

/// Parses a CSS color as produced by getComputedStyle: rgb()/rgba() with comma
/// or space separators, or #rgb / #rrggbb. Alpha is ignored. Anything else
/// (keywords such as currentcolor) yields nullopt.
inline std::optional<Rgb> parse_css_color(std::string_view text) {
  text = detail::trim(text);
  auto clamp8 = [](double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  };
  if (!text.empty() && text.front() == '#') {
    text.remove_prefix(1);
    std::vector<int> digits;
    for (char ch : text) {
      auto d = detail::hex_digit(ch);
      if (!d) return std::nullopt;
      digits.push_back(*d);
    }
    if (digits.size() == 3 || digits.size() == 4)
      return Rgb{static_cast<std::uint8_t>(digits[0] * 17), static_cast<std::uint8_t>(digits[1] * 17),
                 static_cast<std::uint8_t>(digits[2] * 17)};
    if (digits.size() == 6 || digits.size() == 8)
      return Rgb{static_cast<std::uint8_t>(digits[0] * 16 + digits[1]),
                 static_cast<std::uint8_t>(digits[2] * 16 + digits[3]),
                 static_cast<std::uint8_t>(digits[4] * 16 + digits[5])};
    return std::nullopt;
  }
  std::string head(text.substr(0, 5));
  std::transform(head.begin(), head.end(), head.begin(), [](unsigned char c) { return std::tolower(c); });
  std::string_view body;
  if (head.starts_with("rgba(")) {
    body = text.substr(5);
  } else if (head.starts_with("rgb(")) {
    body = text.substr(4);
  } else {
    return std::nullopt;
  }
  if (body.empty() || body.back() != ')') return std::nullopt;
  body.remove_suffix(1);
  // Drop a "/ alpha" tail, then split on commas or whitespace.
  if (auto slash = body.find('/'); slash != std::string_view::npos) body = body.substr(0, slash);
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= body.size(); ++i) {
    if (i == body.size() || body[i] == ',' || std::isspace(static_cast<unsigned char>(body[i]))) {
      if (i > start) parts.push_back(body.substr(start, i - start));
      start = i + 1;
    }
  }
  if (parts.size() != 3 && parts.size() != 4) return std::nullopt;
  std::array<double, 3> ch{};
  for (std::size_t i = 0; i < 3; ++i) {
    auto v = detail::parse_number(parts[i]);
    if (!v) return std::nullopt;
    ch[i] = *v;
  }
  return Rgb{clamp8(ch[0]), clamp8(ch[1]), clamp8(ch[2])};
}

}  // namespace cortex
