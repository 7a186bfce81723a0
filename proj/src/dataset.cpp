#include "pixelrl/dataset.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pixelrl/image_ops.hpp"
#include "pixelrl/png_io.hpp"
#include "pixelrl/synth.hpp"

namespace pixelrl {

namespace {

std::vector<fs::path> list_with_extension(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string x = e.path().extension().string();
    std::transform(x.begin(), x.end(), x.begin(), [](unsigned char c) { return std::tolower(c); });
    if (x == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

const char* kBuiltinDocuments[] = {
    "In article the poster writes that the new drivers for the graphics card fixed most of the problems with "
    "the display, although the color palette still flickers when switching between applications. Has anyone "
    "else seen this behaviour on older monitors?",
    "The league standings after last weekend show three teams within a single point of each other. The "
    "pitching has been inconsistent all season and the bullpen will decide who reaches the playoffs.",
    "For sale: two speakers in good condition, original boxes included, shipping at buyer's expense. Also "
    "looking to trade an old receiver for a working tape deck. Reply by mail if interested.",
    "The orbit insertion burn completed on schedule and telemetry confirms the spacecraft is healthy. "
    "Engineers will spend the next week calibrating instruments before the first science observations.",
};

}  // namespace

std::vector<fs::path> list_pngs(const fs::path& dir) { return list_with_extension(dir, ".png"); }

std::vector<ImagePlane> load_images(const fs::path& dir, int channels) {
  const auto files = list_pngs(dir);
  if (files.empty()) throw InvalidInput("no PNG images in " + dir.string());
  std::vector<ImagePlane> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_png(f, channels));
  return out;
}

std::vector<std::pair<ImagePlane, ImagePlane>> load_pairs(const fs::path& input_dir, const fs::path& target_dir) {
  const auto inputs = list_pngs(input_dir);
  if (inputs.empty()) throw InvalidInput("no PNG images in " + input_dir.string());
  std::vector<std::pair<ImagePlane, ImagePlane>> out;
  for (const auto& f : inputs) {
    const fs::path t = target_dir / f.filename();
    if (!fs::exists(t)) throw InvalidInput("missing target for " + f.filename().string() + " in " + target_dir.string());
    ImagePlane a = read_png(f, 3), b = read_png(t, 3);
    require_same_shape(a, b, "input/target pair");
    out.emplace_back(std::move(a), std::move(b));
  }
  return out;
}

std::vector<std::string> load_documents(const std::optional<fs::path>& dir) {
  std::vector<std::string> docs;
  if (dir)
    for (const auto& f : list_with_extension(*dir, ".txt")) {
      std::ifstream in(f);
      std::stringstream ss;
      ss << in.rdbuf();
      if (!ss.str().empty()) docs.push_back(ss.str());
    }
  if (docs.empty()) docs.assign(std::begin(kBuiltinDocuments), std::end(kBuiltinDocuments));
  return docs;
}

std::optional<fs::path> env_data_root() {
  const char* v = std::getenv("PIXELRL_DATA");
  if (v == nullptr || *v == '\0' || !fs::is_directory(v)) return std::nullopt;
  return fs::path(v);
}

std::optional<fs::path> env_bsd68_dir() {
  if (const char* v = std::getenv("PIXELRL_BSD68"); v != nullptr && *v != '\0' && fs::is_directory(v))
    return fs::path(v);
  if (auto root = env_data_root(); root && fs::is_directory(*root / "BSD68")) return *root / "BSD68";
  return std::nullopt;
}

std::vector<ImagePlane> synthetic_images(int count, int height, int width, int channels, std::uint64_t seed) {
  std::vector<ImagePlane> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(synth_scene(height, width, channels, mix_seed(seed, i)));
  return out;
}

ImagePlane random_crop(const ImagePlane& img, int height, int width, bool augment, std::mt19937_64& rng) {
  return random_crop_pair(img, img, height, width, augment, rng).first;
}

std::pair<ImagePlane, ImagePlane> random_crop_pair(const ImagePlane& a, const ImagePlane& b, int height, int width,
                                                   bool augment, std::mt19937_64& rng) {
  if (a.height() != b.height() || a.width() != b.width()) throw InvalidInput("random_crop_pair: size mismatch");
  const int h = std::min(height, a.height()), w = std::min(width, a.width());
  std::uniform_int_distribution<int> ys(0, a.height() - h), xs(0, a.width() - w);
  const int y0 = ys(rng), x0 = xs(rng);
  ImagePlane ca = a.crop(y0, x0, h, w), cb = b.crop(y0, x0, h, w);
  if (augment) {
    const int k = std::uniform_int_distribution<int>(0, 7)(rng);
    ca = dihedral(ca, k);
    cb = dihedral(cb, k);
  }
  return {std::move(ca), std::move(cb)};
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

}  // namespace pixelrl
