#include "pixelrl/saliency.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include "pixelrl/image_ops.hpp"

namespace pixelrl {

namespace {

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class Fft2d {
 public:
  Fft2d(int h, int w) : h_(h), w_(w) {
    const std::size_t n = static_cast<std::size_t>(h) * w;
    std::lock_guard lock(fftw_planner_mutex());
    buf_ = fftw_alloc_complex(n);
    fwd_ = fftw_plan_dft_2d(h, w, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_2d(h, w, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2d() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(buf_);
  }
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(buf_); }
  void forward() { fftw_execute(fwd_); }
  // Unnormalised inverse.
  void inverse() { fftw_execute(inv_); }

 private:
  int h_, w_;
  fftw_complex* buf_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan inv_ = nullptr;
};

ScalarField gaussian_blur(const ScalarField& in, double sigma) {
  const int r = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) sum += (k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma)));
  for (double& v : k) v /= sum;
  const int h = in.height(), w = in.width();
  ScalarField tmp(h, w), out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * in.at(y, reflect101(x + i, w));
      tmp.at(y, x) = acc;
    }
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp.at(reflect101(y + i, h), x);
      out.at(y, x) = acc;
    }
  return out;
}

ScalarField spectral_residual(const ScalarField& gray, const SaliencyEstimator& est) {
  const int side = est.resize;
  ScalarField small = resize_area(gray, side, side);
  const double mean = small.mean();
  const auto [lo, hi] = std::minmax_element(small.data().begin(), small.data().end());
  if (*hi - *lo < 1e-9) return ScalarField(gray.height(), gray.width(), 0.0);
  Fft2d fft(side, side);
  auto* c = fft.data();
  const std::size_t n = small.size();
  for (std::size_t i = 0; i < n; ++i) c[i] = {255.0 * (small[i] - mean), 0.0};
  fft.forward();

  std::vector<double> amp(n), log_amp(n);
  for (std::size_t i = 0; i < n; ++i) {
    amp[i] = std::abs(c[i]);
    log_amp[i] = std::log(amp[i] + 1.0);
  }
  // Residual = log amplitude minus its 3x3 local average (spectrum is periodic).
  for (int y = 0; y < side; ++y)
    for (int x = 0; x < side; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * side + x;
      if (i == 0 || amp[i] <= 1e-12) {  // DC carries only the (removed) mean
        c[i] = 0.0;
        continue;
      }
      double avg = 0.0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          avg += log_amp[static_cast<std::size_t>((y + dy + side) % side) * side + (x + dx + side) % side];
      avg /= 9.0;
      c[i] *= std::exp(log_amp[i] - avg) / amp[i];
    }
  fft.inverse();
  ScalarField sq(side, side);
  for (std::size_t i = 0; i < n; ++i) sq[i] = std::norm(c[i] / static_cast<double>(n));
  ScalarField smooth = gaussian_blur(sq, est.smoothing_sigma);
  return resize_bilinear(smooth, gray.height(), gray.width());
}

ScalarField fine_grained(const ScalarField& gray, const SaliencyEstimator& est) {
  if (est.center_radii.size() != est.surround_radii.size() || est.center_radii.empty())
    throw InvalidInput("fine-grained saliency: center and surround radii must pair up");
  ScalarField out(gray.height(), gray.width());
  for (std::size_t s = 0; s < est.center_radii.size(); ++s) {
    const ScalarField center = box_mean(gray, est.center_radii[s]);
    const ScalarField surround = box_mean(gray, est.surround_radii[s]);
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double d = center[i] - surround[i];
      // on-center and off-center responses
      out[i] += std::max(d, 0.0) + std::max(-d, 0.0);
    }
  }
  return out;
}

}  // namespace

SaliencyMethod parse_saliency_method(const std::string& name) {
  if (name == "spectral-residual" || name == "sr") return SaliencyMethod::SpectralResidual;
  if (name == "fine-grained-contrast" || name == "fine-grained" || name == "fg")
    return SaliencyMethod::FineGrainedContrast;
  throw InvalidInput("unknown saliency method '" + name + "'");
}

std::string to_string(SaliencyMethod m) {
  return m == SaliencyMethod::SpectralResidual ? "spectral-residual" : "fine-grained-contrast";
}

void normalize_unit(ScalarField& field) {
  const auto [mn, mx] = std::minmax_element(field.data().begin(), field.data().end());
  const double lo = *mn, hi = *mx;
  const double range = hi - lo;
  if (!(range > 1e-12 * std::max(1.0, std::fabs(hi)))) {
    std::fill(field.data().begin(), field.data().end(), 0.0);
    return;
  }
  for (double& v : field.data()) v = (v - lo) / range;
}

ScalarField SaliencyEstimator::estimate(const ImagePlane& img) const {
  if (img.height() == 1 && img.width() == 1) return ScalarField(1, 1, 0.0);
  const ScalarField gray = field_from_channel(to_gray(img), 0);
  ScalarField s = method == SaliencyMethod::SpectralResidual ? spectral_residual(gray, *this) : fine_grained(gray, *this);
  normalize_unit(s);
  return s;
}

ScalarField estimate_saliency(const ImagePlane& img, const SaliencyEstimator& est) { return est.estimate(img); }

}  // namespace pixelrl
