// SPDX-License-Identifier: Apache-2.0
#include "flocktrack/color.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace flocktrack {

namespace {

// D65 reference white.
constexpr double kXn = 0.95047;
constexpr double kYn = 1.00000;
constexpr double kZn = 1.08883;

const std::array<double, 256>& linear_table() {
  static const std::array<double, 256> table = [] {
    std::array<double, 256> t{};
    for (int i = 0; i < 256; ++i) {
      const double c = i / 255.0;
      t[i] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
    }
    return t;
  }();
  return table;
}

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  if (t > delta * delta * delta) return std::cbrt(t);
  return t / (3.0 * delta * delta) + 4.0 / 29.0;
}

std::uint8_t to_byte(double unit) {
  return static_cast<std::uint8_t>(
      std::lround(std::clamp(unit, 0.0, 1.0) * 255.0));
}

}  // namespace

Hsv rgb_to_hsv(Rgb p) {
  const double r = p.r / 255.0, g = p.g / 255.0, b = p.b / 255.0;
  const double mx = std::max({r, g, b});
  const double mn = std::min({r, g, b});
  const double delta = mx - mn;
  Hsv out;
  out.v = mx;
  out.s = mx > 0.0 ? delta / mx : 0.0;
  if (delta > 0.0) {
    double h;
    if (mx == r) {
      h = (g - b) / delta;
    } else if (mx == g) {
      h = 2.0 + (b - r) / delta;
    } else {
      h = 4.0 + (r - g) / delta;
    }
    h *= 60.0;
    if (h < 0.0) h += 360.0;
    if (h >= 360.0) h -= 360.0;
    out.h = h;
  }
  return out;
}

Rgb hsv_to_rgb(const Hsv& c) {
  const double v = c.v;
  const double s = std::clamp(c.s, 0.0, 1.0);
  if (s <= 0.0) return {to_byte(v), to_byte(v), to_byte(v)};
  double h = std::fmod(c.h, 360.0);
  if (h < 0.0) h += 360.0;
  h /= 60.0;
  const int sector = static_cast<int>(std::floor(h)) % 6;
  const double frac = h - std::floor(h);
  const double p = v * (1.0 - s);
  const double q = v * (1.0 - s * frac);
  const double t = v * (1.0 - s * (1.0 - frac));
  double r = 0, g = 0, b = 0;
  switch (sector) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    default: r = v; g = p; b = q; break;
  }
  return {to_byte(r), to_byte(g), to_byte(b)};
}

Lab rgb_to_cielab(Rgb p) {
  const auto& lin = linear_table();
  const double r = lin[p.r], g = lin[p.g], b = lin[p.b];
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  const double fx = lab_f(x / kXn);
  const double fy = lab_f(y / kYn);
  const double fz = lab_f(z / kZn);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

Rgb enhance_pixel(Rgb p, double gain) {
  if (gain == 1.0 || (p.r == p.g && p.g == p.b)) return p;
  Hsv c = rgb_to_hsv(p);
  c.s = std::min(1.0, gain * c.s);
  return hsv_to_rgb(c);
}

RgbImage enhance_contrast(const RgbImage& image, double gain) {
  RgbImage out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      out.set(x, y, enhance_pixel(image.at(x, y), gain));
    }
  }
  return out;
}

}  // namespace flocktrack
