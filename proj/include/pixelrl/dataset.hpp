#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "pixelrl/image.hpp"

namespace pixelrl {

namespace fs = std::filesystem;

/// PNG files directly inside dir, sorted by file name.
std::vector<fs::path> list_pngs(const fs::path& dir);

/// Loads every PNG of dir converted to `channels` (1 or 3). Throws on an empty dir.
std::vector<ImagePlane> load_images(const fs::path& dir, int channels);

/// Input/target pairs matched by file name. Every input needs a target.
std::vector<std::pair<ImagePlane, ImagePlane>> load_pairs(const fs::path& input_dir, const fs::path& target_dir);

/// Plain-text documents (*.txt, sorted). Falls back to a few built-in
/// paragraphs when dir is empty or missing.
std::vector<std::string> load_documents(const std::optional<fs::path>& dir);

/// Data root from PIXELRL_DATA, if set and existing.
std::optional<fs::path> env_data_root();
/// BSD68-style test set directory: PIXELRL_BSD68, else <data root>/BSD68.
std::optional<fs::path> env_bsd68_dir();

/// Deterministic synthetic training set.
std::vector<ImagePlane> synthetic_images(int count, int height, int width, int channels, std::uint64_t seed);

/// Uniform random crop (the whole image if it is not larger than the crop).
/// When augment is set a random dihedral transform is applied as well.
ImagePlane random_crop(const ImagePlane& img, int height, int width, bool augment, std::mt19937_64& rng);

/// Same crop and transform applied to both images.
std::pair<ImagePlane, ImagePlane> random_crop_pair(const ImagePlane& a, const ImagePlane& b, int height, int width,
                                                   bool augment, std::mt19937_64& rng);

/// splitmix64-style mixing used to derive independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace pixelrl
