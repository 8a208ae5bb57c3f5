#pragma once

#include <filesystem>
#include <string>

#include "surfelgrad/metrics.hpp"
#include "surfelgrad/shading.hpp"
#include "surfelgrad/surfel.hpp"

namespace surfelgrad {

// Portable float maps: little-endian float32 (scale -1.0), rows stored
// bottom-to-top as the format prescribes. Values are narrowed to float on
// write; reading widens them back exactly.
void write_pfm(const std::filesystem::path& path, const Grid<double>& gray);
void write_pfm(const std::filesystem::path& path, const Grid<Vec3>& rgb);
Grid<double> read_pfm_gray(const std::filesystem::path& path);
Grid<Vec3> read_pfm_rgb(const std::filesystem::path& path);

// 8-bit RGB PNG.
using Rgb8 = std::array<unsigned char, 3>;
void write_png(const std::filesystem::path& path, const Grid<Rgb8>& pixels);
Grid<Rgb8> read_png(const std::filesystem::path& path);

double srgb_encode(double linear);
double srgb_decode(double encoded);

/// Clamp to [0,1] and sRGB-encode linear radiance.
Grid<Rgb8> to_srgb8(const Image& image);
Image from_srgb8(const Grid<Rgb8>& pixels);
/// Normal map visualization: n -> (n + 1) / 2 per channel, no gamma.
Grid<Rgb8> normals_to_rgb8(const NormalGrid& normals);
/// Gray depth preview scaled to the map's range; nearer is darker.
Grid<Rgb8> depth_to_rgb8(const DepthMap& depth);

/// Plain-text point set: one "x y z" triple per line.
PointSet read_points(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace surfelgrad
