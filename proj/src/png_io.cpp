#include "pixelrl/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <string>

#include "pixelrl/metrics.hpp"

namespace pixelrl {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) throw InvalidInput("cannot open " + path.string());
  return f;
}

[[noreturn]] void png_fail(png_structp, png_const_charp msg) { throw InvalidInput(std::string("libpng: ") + msg); }
void png_warn(png_structp, png_const_charp) {}

class PngReader {
 public:
  explicit PngReader(std::FILE* f) {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
    info_ = png_create_info_struct(png_);
    png_init_io(png_, f);
    png_read_info(png_, info_);
  }
  ~PngReader() { png_destroy_read_struct(&png_, &info_, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  png_structp png() { return png_; }
  png_infop info() { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

class PngWriter {
 public:
  explicit PngWriter(std::FILE* f) {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
    info_ = png_create_info_struct(png_);
    png_init_io(png_, f);
  }
  ~PngWriter() { png_destroy_write_struct(&png_, &info_); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;

  png_structp png() { return png_; }
  png_infop info() { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

void write_rows(PngWriter& w, std::vector<std::uint8_t>& buf, int height, std::size_t stride) {
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = buf.data() + y * stride;
  png_write_info(w.png(), w.info());
  png_write_image(w.png(), rows.data());
  png_write_end(w.png(), nullptr);
}

}  // namespace

ImagePlane read_png(const std::filesystem::path& path, int desired_channels) {
  auto f = open_file(path, "rb");
  PngReader r(f.get());
  png_structp png = r.png();
  png_infop info = r.info();

  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int file_channels = png_get_channels(png, info);
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(png_get_rowbytes(png, info)) * height);
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = buf.data() + y * png_get_rowbytes(png, info);
  png_read_image(png, rows.data());

  const bool src_gray = file_channels == 1;
  const int out_channels = desired_channels == 0 ? (src_gray ? 1 : 3) : desired_channels;
  if (out_channels != 1 && out_channels != 3) throw InvalidInput("read_png: desired_channels must be 0, 1 or 3");
  ImagePlane img(height, width, out_channels);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const std::uint8_t* p = rows[y] + static_cast<std::size_t>(x) * file_channels;
      double rgb[3];
      for (int c = 0; c < 3; ++c) rgb[c] = (src_gray ? p[0] : p[c]) / 255.0;
      if (out_channels == 1) {
        img.at(0, y, x) = src_gray ? rgb[0] : (0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]) / 255.0;
      } else {
        for (int c = 0; c < 3; ++c) img.at(c, y, x) = rgb[c];
      }
    }
  return img;
}

void write_png(const std::filesystem::path& path, const ImagePlane& img) {
  if (img.channels() != 1 && img.channels() != 3) throw InvalidInput("write_png: only gray or RGB images");
  auto f = open_file(path, "wb");
  PngWriter w(f.get());
  const int ch = img.channels();
  png_set_IHDR(w.png(), w.info(), img.width(), img.height(), 8, ch == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  const std::size_t stride = static_cast<std::size_t>(img.width()) * ch;
  std::vector<std::uint8_t> buf(stride * img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < ch; ++c) buf[y * stride + x * ch + c] = to_u8(img.at(c, y, x));
  write_rows(w, buf, img.height(), stride);
}

void write_indexed_png(const std::filesystem::path& path, int height, int width,
                       const std::vector<std::uint8_t>& indices,
                       const std::vector<std::array<std::uint8_t, 3>>& palette) {
  if (indices.size() != static_cast<std::size_t>(height) * width) throw InvalidInput("write_indexed_png: size mismatch");
  if (palette.empty() || palette.size() > 256) throw InvalidInput("write_indexed_png: palette must have 1..256 entries");
  for (auto i : indices)
    if (i >= palette.size()) throw InvalidInput("write_indexed_png: index outside palette");
  auto f = open_file(path, "wb");
  PngWriter w(f.get());
  png_set_IHDR(w.png(), w.info(), width, height, 8, PNG_COLOR_TYPE_PALETTE, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  std::vector<png_color> pal(palette.size());
  for (std::size_t i = 0; i < palette.size(); ++i) pal[i] = {palette[i][0], palette[i][1], palette[i][2]};
  png_set_PLTE(w.png(), w.info(), pal.data(), static_cast<int>(pal.size()));
  std::vector<std::uint8_t> buf(indices);
  write_rows(w, buf, height, static_cast<std::size_t>(width));
}

IndexedImage read_indexed_png(const std::filesystem::path& path) {
  auto f = open_file(path, "rb");
  PngReader r(f.get());
  if (png_get_color_type(r.png(), r.info()) != PNG_COLOR_TYPE_PALETTE)
    throw InvalidInput("read_indexed_png: not a palette image");
  if (png_get_bit_depth(r.png(), r.info()) < 8) png_set_packing(r.png());
  png_read_update_info(r.png(), r.info());
  IndexedImage out;
  out.width = static_cast<int>(png_get_image_width(r.png(), r.info()));
  out.height = static_cast<int>(png_get_image_height(r.png(), r.info()));
  png_colorp pal = nullptr;
  int n = 0;
  png_get_PLTE(r.png(), r.info(), &pal, &n);
  for (int i = 0; i < n; ++i) out.palette.push_back({pal[i].red, pal[i].green, pal[i].blue});
  out.indices.resize(static_cast<std::size_t>(out.width) * out.height);
  std::vector<png_bytep> rows(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = out.indices.data() + static_cast<std::size_t>(y) * out.width;
  png_read_image(r.png(), rows.data());
  return out;
}

}  // namespace pixelrl
