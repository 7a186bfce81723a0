#pragma once

#include <cstdint>
#include <vector>

#include "pixelrl/image.hpp"

namespace pixelrl {

/// PSNR reported for identical images instead of +inf.
inline constexpr double kPsnrCap = 99.0;

/// x in [0,1] -> round-half-up 8-bit code, clipping first.
std::uint8_t to_u8(double x);

/// PSNR in dB on the 0-255 scale. Both images are clipped and quantized to
/// 8 bits first. Identical quantized images give kPsnrCap.
double psnr(const ImagePlane& a, const ImagePlane& b, double peak = 255.0);

/// Mean squared error on the 8-bit quantized 0-255 scale.
double mse_u8(const ImagePlane& a, const ImagePlane& b);

/// Structural similarity (Gaussian 11x11 window, sigma 1.5, K1 = 0.01,
/// K2 = 0.03, L = 255) averaged over the valid window positions. Color
/// images average the per-channel scores. Images smaller than 11 pixels
/// use the largest odd window that fits.
double ssim(const ImagePlane& a, const ImagePlane& b);

}  // namespace pixelrl
