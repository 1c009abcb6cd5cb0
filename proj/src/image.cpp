#include "mono3d/image.hpp"

#include <png.h>

#include <array>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mono3d/error.hpp"

namespace mono3d {

ImageBuffer::ImageBuffer(int width, int height, std::uint8_t fill)
    : dims_{width, height},
      pixels_(static_cast<std::size_t>(width) * height * kChannels, fill) {
  if (width < 0 || height < 0) {
    throw Error(ErrorCode::kInvalidConfig, "negative image dimensions");
  }
}

ImageBuffer::ImageBuffer(int width, int height,
                         std::vector<std::uint8_t> pixels)
    : dims_{width, height}, pixels_(std::move(pixels)) {
  if (width < 0 || height < 0 ||
      pixels_.size() != static_cast<std::size_t>(width) * height * kChannels) {
    throw Error(ErrorCode::kDimensionMismatch,
                "pixel buffer size does not match " + std::to_string(width) +
                    "x" + std::to_string(height) + "x3");
  }
}

namespace {

struct ReadCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->offset + length > cursor->bytes.size()) {
    png_error(png, "truncated PNG stream");
  }
  std::memcpy(out, cursor->bytes.data() + cursor->offset, length);
  cursor->offset += length;
}

void write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

// libpng reports failures through longjmp. The message is captured here and
// rethrown as an Error once control is back in C++ code.
struct PngErrorSink {
  std::jmp_buf jump;
  char message[256] = {0};
};

void on_png_error(png_structp png, png_const_charp message) {
  auto* sink = static_cast<PngErrorSink*>(png_get_error_ptr(png));
  std::snprintf(sink->message, sizeof(sink->message), "%s", message);
  std::longjmp(sink->jump, 1);
}

void ignore_png_warning(png_structp, png_const_charp) {}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Everything with a destructor is created before setjmp, so a longjmp back
// into this frame never skips cleanup.
bool decode_into(std::span<const std::uint8_t> bytes, PngErrorSink& sink,
                 std::vector<std::uint8_t>& pixels,
                 std::vector<png_bytep>& rows, png_uint_32& width,
                 png_uint_32& height) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink,
                                           on_png_error, ignore_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  ReadCursor cursor{bytes};
  if (setjmp(sink.jump)) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &cursor, read_from_memory);
  png_read_info(png, info);

  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY ||
      color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  png_set_strip_alpha(png);
  png_read_update_info(png, info);

  if (png_get_rowbytes(png, info) != width * 3) {
    png_error(png, "unsupported PNG pixel layout");
  }
  pixels.resize(static_cast<std::size_t>(width) * height * 3);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) {
    rows[y] = pixels.data() + static_cast<std::size_t>(y) * width * 3;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

bool encode_into(const ImageBuffer& image, PngErrorSink& sink,
                 std::vector<std::uint8_t>& out) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink,
                                            on_png_error, ignore_png_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  const auto pixels = image.data();
  if (setjmp(sink.jump)) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &out, write_to_vector, flush_noop);
  // Fixed settings: identical pixels always produce identical bytes.
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, image.width(), image.height(), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < image.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(
                           pixels.data() +
                           static_cast<std::size_t>(y) * image.width() * 3));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorCode::kIo, "not a PNG stream");
  }
  PngErrorSink sink;
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  if (!decode_into(bytes, sink, pixels, rows, width, height)) {
    throw Error(ErrorCode::kIo, std::string("png decode: ") + sink.message);
  }
  return ImageBuffer(static_cast<int>(width), static_cast<int>(height),
                     std::move(pixels));
}

std::vector<std::uint8_t> encode_png(const ImageBuffer& image) {
  if (image.width() <= 0 || image.height() <= 0) {
    throw Error(ErrorCode::kInvalidConfig, "cannot encode an empty image");
  }
  PngErrorSink sink;
  std::vector<std::uint8_t> out;
  if (!encode_into(image, sink, out)) {
    throw Error(ErrorCode::kIo, std::string("png encode: ") + sink.message);
  }
  return out;
}

ImageBuffer read_png(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return decode_png(bytes);
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void write_png(const std::filesystem::path& path, const ImageBuffer& image) {
  const auto bytes = encode_png(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

ImageDims read_png_dims(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::array<std::uint8_t, 24> head{};
  in.read(reinterpret_cast<char*>(head.data()), head.size());
  if (in.gcount() != static_cast<std::streamsize>(head.size()) ||
      png_sig_cmp(head.data(), 0, 8) != 0 ||
      std::memcmp(head.data() + 12, "IHDR", 4) != 0) {
    throw Error(ErrorCode::kIo, path.string() + ": not a PNG file");
  }
  auto be32 = [&](std::size_t at) {
    return static_cast<int>((std::uint32_t{head[at]} << 24) |
                            (std::uint32_t{head[at + 1]} << 16) |
                            (std::uint32_t{head[at + 2]} << 8) | head[at + 3]);
  };
  return {be32(16), be32(20)};
}

}  // namespace mono3d
