#include "core/image_io.hpp"

#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace iqn {

namespace {

std::string lower_ext(const std::string& path) {
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos)
    return {};
  std::string ext = path.substr(dot + 1);
  for (char& c : ext)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw IoError("cannot open for reading: " + path);
  return f;
}

void read_exact(std::ifstream& f, uint8_t* dst, size_t n, const std::string& what) {
  f.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
  if (static_cast<size_t>(f.gcount()) != n)
    throw DimensionError("truncated " + what + ": expected " + std::to_string(n) + " bytes");
}

// PGM allows '#' comments and arbitrary whitespace between header tokens.
int next_pnm_int(std::ifstream& f, const std::string& path) {
  int c;
  while ((c = f.get()) != EOF) {
    if (c == '#') {
      while ((c = f.get()) != EOF && c != '\n') {
      }
    } else if (!std::isspace(c)) {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c))
    throw ParseError("malformed PGM header in " + path);
  long v = 0;
  while (c != EOF && std::isdigit(c)) {
    v = v * 10 + (c - '0');
    if (v > 1 << 24)
      throw ParseError("absurd PGM header value in " + path);
    c = f.get();
  }
  if (c == EOF)
    throw ParseError("malformed PGM header in " + path);
  // c is the single whitespace byte that terminates the token.
  if (!std::isspace(c))
    throw ParseError("malformed PGM header in " + path);
  return static_cast<int>(v);
}

PlanarImage load_pgm(const std::string& path) {
  std::ifstream f = open_in(path);
  char magic[2] = {0, 0};
  f.read(magic, 2);
  if (f.gcount() != 2 || magic[0] != 'P' || magic[1] != '5')
    throw ParseError("not a binary PGM (P5): " + path);
  int w = next_pnm_int(f, path);
  int h = next_pnm_int(f, path);
  int maxval = next_pnm_int(f, path);
  if (maxval != 255)
    throw ParseError("unsupported PGM maxval " + std::to_string(maxval) + " in " + path);
  if (w <= 0 || h <= 0)
    throw ParseError("bad PGM dimensions in " + path);
  PlanarImage img = PlanarImage::makeYOnly(w, h);
  read_exact(f, img.y.data(), img.y.size(), "PGM pixel data in " + path);
  return img;
}

PlanarImage load_i420(const std::string& path, const LoadOptions& opts) {
  if (opts.width <= 0 || opts.height <= 0)
    throw DimensionError("I420 input requires explicit width/height");
  if (opts.width % 2 || opts.height % 2)
    throw DimensionError("I420 dimensions must be even");
  std::ifstream f = open_in(path);
  f.seekg(0, std::ios::end);
  auto size = static_cast<uint64_t>(f.tellg());
  f.seekg(0, std::ios::beg);
  uint64_t expect = static_cast<uint64_t>(opts.width) * opts.height * 3 / 2;
  if (size != expect)
    throw DimensionError("I420 file size " + std::to_string(size) + " does not match " +
                         std::to_string(opts.width) + "x" + std::to_string(opts.height) +
                         " (expected " + std::to_string(expect) + ")");
  PlanarImage img = PlanarImage::makeC420(opts.width, opts.height);
  read_exact(f, img.y.data(), img.y.size(), "I420 luma");
  read_exact(f, img.cb.data(), img.cb.size(), "I420 cb");
  read_exact(f, img.cr.data(), img.cr.size(), "I420 cr");
  return img;
}

struct Y4mHeader {
  int width = 0;
  int height = 0;
};

Y4mHeader parse_y4m_header(const std::string& line, const std::string& path) {
  std::istringstream ss(line);
  std::string tok;
  ss >> tok;
  if (tok != "YUV4MPEG2")
    throw ParseError("not a Y4M stream: " + path);
  Y4mHeader h;
  bool colorOk = true;  // C tag optional, defaults to 4:2:0
  while (ss >> tok) {
    if (tok.empty())
      continue;
    switch (tok[0]) {
      case 'W':
        h.width = std::atoi(tok.c_str() + 1);
        break;
      case 'H':
        h.height = std::atoi(tok.c_str() + 1);
        break;
      case 'C':
        colorOk = tok.rfind("C420", 0) == 0;
        break;
      default:
        break;  // F, I, A, X tags carry no pixel-layout information we need
    }
  }
  if (!colorOk)
    throw ParseError("unsupported Y4M colorspace (only C420 variants): " + path);
  if (h.width <= 0 || h.height <= 0)
    throw ParseError("missing Y4M dimensions: " + path);
  if (h.width % 2 || h.height % 2)
    throw DimensionError("Y4M 4:2:0 dimensions must be even: " + path);
  return h;
}

PlanarImage load_y4m(const std::string& path, const LoadOptions& opts) {
  std::ifstream f = open_in(path);
  std::string header;
  if (!std::getline(f, header))
    throw ParseError("empty Y4M file: " + path);
  Y4mHeader h = parse_y4m_header(header, path);
  PlanarImage img = PlanarImage::makeC420(h.width, h.height);
  size_t frameBytes = img.y.size() + img.cb.size() + img.cr.size();
  for (int i = 0;; ++i) {
    std::string frameLine;
    if (!std::getline(f, frameLine))
      throw ParseError("Y4M frame " + std::to_string(opts.frameIndex) + " not found in " + path);
    if (frameLine.rfind("FRAME", 0) != 0)
      throw ParseError("malformed Y4M FRAME marker in " + path);
    if (i == opts.frameIndex) {
      read_exact(f, img.y.data(), img.y.size(), "Y4M luma");
      read_exact(f, img.cb.data(), img.cb.size(), "Y4M cb");
      read_exact(f, img.cr.data(), img.cr.size(), "Y4M cr");
      return img;
    }
    f.seekg(static_cast<std::streamoff>(frameBytes), std::ios::cur);
    if (!f)
      throw ParseError("truncated Y4M frame in " + path);
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f)
    throw IoError("cannot open for writing: " + path);
  return f;
}

void write_all(std::ofstream& f, const std::vector<uint8_t>& v, const std::string& path) {
  f.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size()));
  if (!f)
    throw IoError("write failed: " + path);
}

}  // namespace

std::optional<FileFormat> format_from_path(const std::string& path) {
  std::string ext = lower_ext(path);
  if (ext == "pgm")
    return FileFormat::Pgm;
  if (ext == "y4m")
    return FileFormat::Y4m;
  if (ext == "yuv" || ext == "i420")
    return FileFormat::I420;
  return std::nullopt;
}

FileFormat parse_format_name(const std::string& name) {
  if (name == "pgm")
    return FileFormat::Pgm;
  if (name == "i420" || name == "yuv")
    return FileFormat::I420;
  if (name == "y4m")
    return FileFormat::Y4m;
  throw ConfigError("unknown image format: " + name);
}

const char* format_name(FileFormat fmt) {
  switch (fmt) {
    case FileFormat::Pgm:
      return "pgm";
    case FileFormat::I420:
      return "i420";
    case FileFormat::Y4m:
      return "y4m";
  }
  return "?";
}

PlanarImage load_image(const std::string& path, FileFormat fmt, const LoadOptions& opts) {
  PlanarImage img;
  switch (fmt) {
    case FileFormat::Pgm:
      img = load_pgm(path);
      break;
    case FileFormat::I420:
      img = load_i420(path, opts);
      break;
    case FileFormat::Y4m:
      img = load_y4m(path, opts);
      break;
  }
  img.validate();
  return img;
}

void save_image(const PlanarImage& img, const std::string& path, FileFormat fmt) {
  img.validate();
  switch (fmt) {
    case FileFormat::Pgm: {
      if (img.hasChroma())
        throw DimensionError("PGM stores luma only; refusing to drop chroma of a 4:2:0 image");
      std::ofstream f = open_out(path);
      f << "P5\n" << img.width << " " << img.height << "\n255\n";
      write_all(f, img.y, path);
      break;
    }
    case FileFormat::I420: {
      if (!img.hasChroma())
        throw DimensionError("cannot save a Y-only image as I420 (missing chroma)");
      std::ofstream f = open_out(path);
      write_all(f, img.y, path);
      write_all(f, img.cb, path);
      write_all(f, img.cr, path);
      break;
    }
    case FileFormat::Y4m: {
      if (!img.hasChroma())
        throw DimensionError("cannot save a Y-only image as Y4M (missing chroma)");
      std::ofstream f = open_out(path);
      f << "YUV4MPEG2 W" << img.width << " H" << img.height << " F30:1 C420\nFRAME\n";
      write_all(f, img.y, path);
      write_all(f, img.cb, path);
      write_all(f, img.cr, path);
      break;
    }
  }
}

}  // namespace iqn
