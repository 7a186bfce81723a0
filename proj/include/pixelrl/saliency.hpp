#pragma once

#include <string>
#include <vector>

#include "pixelrl/image.hpp"

namespace pixelrl {

enum class SaliencyMethod { SpectralResidual, FineGrainedContrast };

SaliencyMethod parse_saliency_method(const std::string& name);
std::string to_string(SaliencyMethod m);

/// Hand-crafted saliency estimator. Output is always in [0,1] with the input's
/// spatial size; any non-constant input has max 1, a constant input gives 0.
struct SaliencyEstimator {
  SaliencyMethod method = SaliencyMethod::SpectralResidual;
  /// Spectral residual: side of the square working resolution.
  int resize = 64;
  /// Spectral residual: Gaussian sigma (working-resolution pixels) applied to the squared reconstruction.
  double smoothing_sigma = 3.0;
  /// Fine-grained contrast: center / surround box radii, one pair per scale.
  std::vector<int> center_radii = {1, 2, 4};
  std::vector<int> surround_radii = {3, 7, 15};

  ScalarField estimate(const ImagePlane& img) const;
};

ScalarField estimate_saliency(const ImagePlane& img, const SaliencyEstimator& est);

/// Min-max normalisation onto [0,1]; (near-)constant fields become zeros.
void normalize_unit(ScalarField& field);

}  // namespace pixelrl
