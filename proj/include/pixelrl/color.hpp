#pragma once

#include <array>

#include "pixelrl/image.hpp"

namespace pixelrl {

using Rgb = std::array<double, 3>;
using Lab = std::array<double, 3>;
using Hsv = std::array<double, 3>;

/// sRGB (D65, gamma-encoded, components in [0,1]) to CIE L*a*b*.
Lab rgb_to_lab(const Rgb& rgb);
Rgb lab_to_rgb(const Lab& lab);

/// HSV with H in [0,6) (sextants), S and V in [0,1].
Hsv rgb_to_hsv(const Rgb& rgb);
Rgb hsv_to_rgb(const Hsv& hsv);

struct LabPlanes {
  ScalarField L;
  ScalarField a;
  ScalarField b;
};

/// Whole-image conversion. L in [0,100], a/b roughly [-128,127].
LabPlanes to_cielab(const ImagePlane& rgb);
/// Inverse of to_cielab, clipped to [0,1].
ImagePlane to_rgb(const LabPlanes& lab);

}  // namespace pixelrl
