#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace mono3d {

struct ImageDims {
  int width = 0;
  int height = 0;

  friend bool operator==(const ImageDims&, const ImageDims&) = default;
};

// Interleaved 8-bit RGB, row-major, H x W x 3.
class ImageBuffer {
 public:
  static constexpr int kChannels = 3;

  ImageBuffer() = default;
  ImageBuffer(int width, int height, std::uint8_t fill = 0);
  ImageBuffer(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const { return dims_.width; }
  int height() const { return dims_.height; }
  ImageDims dims() const { return dims_; }
  bool empty() const { return pixels_.empty(); }

  std::uint8_t& at(int x, int y, int c) {
    return pixels_[index(x, y, c)];
  }
  std::uint8_t at(int x, int y, int c) const {
    return pixels_[index(x, y, c)];
  }

  std::span<std::uint8_t> data() { return pixels_; }
  std::span<const std::uint8_t> data() const { return pixels_; }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * dims_.width + x) * kChannels + c;
  }

  ImageDims dims_;
  std::vector<std::uint8_t> pixels_;
};

// PNG codec. Grayscale/palette/alpha/16-bit inputs are converted to 8-bit RGB.
ImageBuffer decode_png(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const ImageBuffer& image);

ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const ImageBuffer& image);

// Reads only the IHDR chunk.
ImageDims read_png_dims(const std::filesystem::path& path);

}  // namespace mono3d
