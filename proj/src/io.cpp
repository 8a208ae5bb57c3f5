#include "surfelgrad/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "surfelgrad/error.hpp"

namespace surfelgrad {

namespace {

[[noreturn]] void io_error(const std::filesystem::path& path, const std::string& what) {
  throw Error(ErrorCode::IoError, path.string() + ": " + what);
}

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0x0000FF00u) | ((v << 8) & 0x00FF0000u) | (v << 24);
}

void write_pfm_raw(const std::filesystem::path& path, int rows, int cols, int channels,
                   const std::vector<float>& row_major) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_error(path, "cannot open for writing");
  out << (channels == 3 ? "PF" : "Pf") << '\n' << cols << ' ' << rows << '\n' << "-1.0\n";
  const std::size_t row_len = static_cast<std::size_t>(cols) * channels;
  std::vector<std::uint32_t> buffer(row_len);
  for (int r = rows - 1; r >= 0; --r) {
    for (std::size_t k = 0; k < row_len; ++k) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(row_major[static_cast<std::size_t>(r) * row_len + k]);
      if constexpr (std::endian::native == std::endian::big) bits = byteswap32(bits);
      buffer[k] = bits;
    }
    out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(row_len * 4));
  }
  if (!out) io_error(path, "write failed");
}

struct PfmData {
  int rows = 0;
  int cols = 0;
  int channels = 0;
  std::vector<float> row_major;
};

PfmData read_pfm_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open for reading");
  std::string magic;
  PfmData out;
  double scale = 0.0;
  if (!(in >> magic >> out.cols >> out.rows >> scale)) io_error(path, "malformed PFM header");
  if (magic == "PF")
    out.channels = 3;
  else if (magic == "Pf")
    out.channels = 1;
  else
    io_error(path, "not a PFM file");
  if (out.rows <= 0 || out.cols <= 0 || scale == 0.0) io_error(path, "invalid PFM dimensions or scale");
  in.get();  // single whitespace byte before the raster
  const bool little = scale < 0.0;
  const std::size_t row_len = static_cast<std::size_t>(out.cols) * out.channels;
  out.row_major.resize(row_len * out.rows);
  std::vector<std::uint32_t> buffer(row_len);
  for (int r = out.rows - 1; r >= 0; --r) {
    in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(row_len * 4));
    if (!in) io_error(path, "truncated PFM raster");
    for (std::size_t k = 0; k < row_len; ++k) {
      std::uint32_t bits = buffer[k];
      if ((std::endian::native == std::endian::little) != little) bits = byteswap32(bits);
      out.row_major[static_cast<std::size_t>(r) * row_len + k] = std::bit_cast<float>(bits);
    }
  }
  return out;
}

}  // namespace

void write_pfm(const std::filesystem::path& path, const Grid<double>& gray) {
  std::vector<float> data(gray.size());
  for (std::size_t i = 0; i < gray.size(); ++i) data[i] = static_cast<float>(gray[i]);
  write_pfm_raw(path, gray.rows(), gray.cols(), 1, data);
}

void write_pfm(const std::filesystem::path& path, const Grid<Vec3>& rgb) {
  std::vector<float> data(rgb.size() * 3);
  for (std::size_t i = 0; i < rgb.size(); ++i)
    for (int ch = 0; ch < 3; ++ch) data[i * 3 + ch] = static_cast<float>(rgb[i][ch]);
  write_pfm_raw(path, rgb.rows(), rgb.cols(), 3, data);
}

Grid<double> read_pfm_gray(const std::filesystem::path& path) {
  const PfmData raw = read_pfm_raw(path);
  if (raw.channels != 1) io_error(path, "expected a single-channel PFM");
  Grid<double> out({raw.rows, raw.cols});
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = raw.row_major[i];
  return out;
}

Grid<Vec3> read_pfm_rgb(const std::filesystem::path& path) {
  const PfmData raw = read_pfm_raw(path);
  if (raw.channels != 3) io_error(path, "expected a three-channel PFM");
  Grid<Vec3> out({raw.rows, raw.cols});
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = {raw.row_major[i * 3], raw.row_major[i * 3 + 1], raw.row_major[i * 3 + 2]};
  return out;
}

void write_png(const std::filesystem::path& path, const Grid<Rgb8>& pixels) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(pixels.cols());
  image.height = static_cast<png_uint_32>(pixels.rows());
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, pixels.storage().data(), 0, nullptr))
    io_error(path, std::string("PNG write failed: ") + image.message);
}

Grid<Rgb8> read_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str()))
    io_error(path, std::string("PNG read failed: ") + image.message);
  image.format = PNG_FORMAT_RGB;
  Grid<Rgb8> out({static_cast<int>(image.height), static_cast<int>(image.width)});
  if (!png_image_finish_read(&image, nullptr, out.storage().data(), 0, nullptr)) {
    const std::string message = image.message;
    png_image_free(&image);
    io_error(path, "PNG decode failed: " + message);
  }
  return out;
}

double srgb_encode(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double srgb_decode(double v) { return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4); }

namespace {
unsigned char quantize(double unit) {
  return static_cast<unsigned char>(std::lround(std::clamp(unit, 0.0, 1.0) * 255.0));
}
}  // namespace

Grid<Rgb8> to_srgb8(const Image& image) {
  Grid<Rgb8> out(image.resolution());
  for (std::size_t i = 0; i < image.size(); ++i)
    for (int ch = 0; ch < 3; ++ch) out[i][ch] = quantize(srgb_encode(image[i][ch]));
  return out;
}

Image from_srgb8(const Grid<Rgb8>& pixels) {
  Image out(pixels.resolution());
  for (std::size_t i = 0; i < pixels.size(); ++i)
    for (int ch = 0; ch < 3; ++ch) out[i][ch] = srgb_decode(pixels[i][ch] / 255.0);
  return out;
}

Grid<Rgb8> normals_to_rgb8(const NormalGrid& normals) {
  Grid<Rgb8> out(normals.resolution());
  for (std::size_t i = 0; i < normals.size(); ++i)
    for (int ch = 0; ch < 3; ++ch) out[i][ch] = quantize(0.5 * (normals[i][ch] + 1.0));
  return out;
}

Grid<Rgb8> depth_to_rgb8(const DepthMap& depth) {
  Grid<Rgb8> out(depth.resolution());
  if (depth.size() == 0) return out;
  const auto [lo, hi] = std::minmax_element(depth.values().begin(), depth.values().end());
  const double span = *hi - *lo;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const unsigned char v = quantize(span > 0.0 ? (depth[i] - *lo) / span : 0.0);
    out[i] = {v, v, v};
  }
  return out;
}

PointSet read_points(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) io_error(path, "cannot open for reading");
  PointSet out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[line.find_first_not_of(" \t\r")] == '#')
      continue;
    std::istringstream fields(line);
    Vec3 p;
    if (!(fields >> p.x >> p.y >> p.z))
      throw Error(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": expected 'x y z'");
    out.push_back(p);
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error(path, "cannot open for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_error(path, "cannot open for writing");
  out << text;
  if (!out) io_error(path, "write failed");
}

}  // namespace surfelgrad
