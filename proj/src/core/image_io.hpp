#pragma once

#include <optional>
#include <string>

#include "core/image.hpp"

namespace iqn {

enum class FileFormat { Pgm, I420, Y4m };

struct LoadOptions {
  int width = 0;       // required for I420
  int height = 0;      // required for I420
  int frameIndex = 0;  // Y4M only
};

// Maps a file extension to a format: .pgm, .y4m, .yuv/.i420.
std::optional<FileFormat> format_from_path(const std::string& path);
FileFormat parse_format_name(const std::string& name);
const char* format_name(FileFormat fmt);

PlanarImage load_image(const std::string& path, FileFormat fmt, const LoadOptions& opts = {});

// Writers emit canonical byte streams: PGM "P5\n<w> <h>\n255\n", raw I420
// planes, and Y4M "YUV4MPEG2 W<w> H<h> F30:1 C420" with a single FRAME.
// save then load reproduces the image bit-exactly, and saving a loaded
// canonical file reproduces the file bytes.
void save_image(const PlanarImage& img, const std::string& path, FileFormat fmt);

}  // namespace iqn
