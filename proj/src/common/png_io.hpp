#pragma once

#include <cstdint>
#include <filesystem>

#include "common/raster.hpp"

namespace fusiondrive {

// 8-bit RGB or gray, and 16-bit gray. Throws Error(kIo) on failure.
void write_png(const std::filesystem::path& path, const Raster<uint8_t>& image);
void write_png16(const std::filesystem::path& path, const Raster<uint16_t>& image);

Raster<uint8_t> read_png(const std::filesystem::path& path);
Raster<uint16_t> read_png16(const std::filesystem::path& path);

}  // namespace fusiondrive
