#pragma once

#include <cstdint>
#include <string>

#include "pixelrl/image.hpp"

namespace pixelrl {

/// Procedural natural-ish scene: smooth illumination gradient, low-frequency
/// shading, overlapping flat and striped shapes. Deterministic per seed.
ImagePlane synth_scene(int height, int width, int channels, std::uint64_t seed);

/// Parametric retouching styles used as color-enhancement targets. Each is a
/// fixed chain of color adjustments followed by a radial vignette, so the
/// target is reachable by per-pixel color actions but differs spatially.
enum class ColorStyle { WarmContrast, CoolBright, Faded };

ColorStyle parse_color_style(const std::string& name);
std::string to_string(ColorStyle style);
ImagePlane apply_color_style(const ImagePlane& rgb, ColorStyle style);

struct SaliencyPair {
  ImagePlane image;  ///< RGB
  ImagePlane mask;   ///< 1 channel, binary
};

/// Cluttered RGB scene with one low-contrast object; the mask covers that object.
SaliencyPair synth_saliency_pair(int height, int width, std::uint64_t seed);

}  // namespace pixelrl
