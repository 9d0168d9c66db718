// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "flocktrack/image.hpp"

namespace flocktrack {

// h in degrees [0, 360), s and v in [0, 1]. Gray pixels get h = 0.
struct Hsv {
  double h = 0.0;
  double s = 0.0;
  double v = 0.0;
};

// CIELAB under D65: l in [0, 100], a and b roughly in [-128, 128).
struct Lab {
  double l = 0.0;
  double a = 0.0;
  double b = 0.0;
};

Hsv rgb_to_hsv(Rgb p);
// Channels are rounded to the nearest 8-bit value.
Rgb hsv_to_rgb(const Hsv& c);
Lab rgb_to_cielab(Rgb p);

// Saturation boost: S' = min(1, gain * S), returned through the HSV round
// trip. gain = 1 and gray pixels are fixed points.
Rgb enhance_pixel(Rgb p, double gain);
RgbImage enhance_contrast(const RgbImage& image, double gain = 1.5);

}  // namespace flocktrack
