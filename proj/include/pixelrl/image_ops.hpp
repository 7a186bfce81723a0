#pragma once

#include <array>

#include "pixelrl/image.hpp"

namespace pixelrl {

/// Edge-preserving smoothing of img by a per-window linear model of guide
/// (gray guided filter; a color guide is reduced to its luma). Windows are
/// (2*radius+1)^2, truncated at the border and normalised by their pixel count.
/// Output is clipped to [0,1].
ImagePlane guided_filter(const ImagePlane& img, const ImagePlane& guide, int radius, double eps);

/// Same filter applied to an unbounded field (no clipping).
ScalarField guided_filter_field(const ScalarField& field, const ScalarField& guide, int radius, double eps);

/// Mean over a (2r+1)^2 window truncated at the border.
ScalarField box_mean(const ScalarField& field, int radius);

/// Dihedral transforms: k in [0,4) rotates by k*90 degrees counter-clockwise,
/// k in [4,8) first flips left-right and then rotates by (k-4)*90 degrees.
ImagePlane dihedral(const ImagePlane& img, int k);
ImagePlane inverse_dihedral(const ImagePlane& img, int k);

std::array<ImagePlane, 8> augment8(const ImagePlane& img);
/// inverse_augment8(augment8(x))[k] == x for every k.
std::array<ImagePlane, 8> inverse_augment8(const std::array<ImagePlane, 8>& imgs);
/// Pixel-wise mean of the eight inverse-mapped images.
ImagePlane fuse_augmented(const std::array<ImagePlane, 8>& outputs);

/// Bilinear resize (pixel-center aligned, edge clamped).
ScalarField resize_bilinear(const ScalarField& in, int height, int width);
/// Area-average downscale; falls back to bilinear when upscaling.
ScalarField resize_area(const ScalarField& in, int height, int width);

ScalarField field_from_channel(const ImagePlane& img, int c);

}  // namespace pixelrl
