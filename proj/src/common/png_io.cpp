#include "common/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "common/error.hpp"

namespace fusiondrive {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return f;
}

int color_type_for(int channels) {
  switch (channels) {
    case 1: return PNG_COLOR_TYPE_GRAY;
    case 3: return PNG_COLOR_TYPE_RGB;
    case 4: return PNG_COLOR_TYPE_RGBA;
    default: throw Error(ErrorCode::kInvalidArgument, "unsupported channel count");
  }
}

// Rows are handed to libpng as byte pointers; 16-bit samples are written
// big-endian as the format requires.
void write_rows(const std::filesystem::path& path, int width, int height,
                int channels, int bit_depth,
                const std::vector<png_bytep>& rows) {
  FilePtr file = open_file(path, "wb");
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorCode::kIo, "failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, bit_depth, color_type_for(channels),
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 3);
  png_write_info(png, info);
  png_write_image(png, const_cast<png_bytepp>(rows.data()));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

struct Decoded {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<png_byte> bytes;
};

Decoded decode(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kIo, "libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorCode::kIo, "failed reading " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  Decoded out;
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const size_t stride = png_get_rowbytes(png, info);
  out.bytes.resize(stride * out.height);
  std::vector<png_bytep> rows(out.height);
  for (int y = 0; y < out.height; ++y) rows[y] = out.bytes.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace

void write_png(const std::filesystem::path& path, const Raster<uint8_t>& image) {
  std::vector<png_bytep> rows(image.height);
  const size_t stride = static_cast<size_t>(image.width) * image.channels;
  for (int y = 0; y < image.height; ++y)
    rows[y] = const_cast<png_bytep>(image.data.data() + y * stride);
  write_rows(path, image.width, image.height, image.channels, 8, rows);
}

void write_png16(const std::filesystem::path& path,
                 const Raster<uint16_t>& image) {
  const size_t stride = static_cast<size_t>(image.width) * image.channels;
  std::vector<png_byte> bytes(stride * 2 * image.height);
  for (size_t i = 0; i < image.data.size(); ++i) {
    bytes[2 * i] = static_cast<png_byte>(image.data[i] >> 8);
    bytes[2 * i + 1] = static_cast<png_byte>(image.data[i] & 0xFF);
  }
  std::vector<png_bytep> rows(image.height);
  for (int y = 0; y < image.height; ++y) rows[y] = bytes.data() + y * stride * 2;
  write_rows(path, image.width, image.height, image.channels, 16, rows);
}

Raster<uint8_t> read_png(const std::filesystem::path& path) {
  Decoded d = decode(path);
  if (d.bit_depth != 8)
    throw Error(ErrorCode::kIo, path.string() + ": expected 8-bit PNG");
  Raster<uint8_t> out(d.width, d.height, d.channels);
  out.data.assign(d.bytes.begin(), d.bytes.end());
  return out;
}

Raster<uint16_t> read_png16(const std::filesystem::path& path) {
  Decoded d = decode(path);
  if (d.bit_depth != 16)
    throw Error(ErrorCode::kIo, path.string() + ": expected 16-bit PNG");
  Raster<uint16_t> out(d.width, d.height, d.channels);
  for (size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = static_cast<uint16_t>((d.bytes[2 * i] << 8) | d.bytes[2 * i + 1]);
  return out;
}

}  // namespace fusiondrive
