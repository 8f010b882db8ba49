#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "neutroseg/types.hpp"

namespace neutroseg {

/// 8-bit RGB raster, row-major, interleaved.
struct RgbImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> data;  // rows * cols * 3

  RgbImage() = default;
  RgbImage(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c * 3, 0) {}

  std::array<std::uint8_t, 3> at(std::size_t r, std::size_t c) const {
    const std::size_t i = (r * cols + c) * 3;
    return {data[i], data[i + 1], data[i + 2]};
  }
  void set(std::size_t r, std::size_t c, std::array<std::uint8_t, 3> rgb) {
    const std::size_t i = (r * cols + c) * 3;
    data[i] = rgb[0];
    data[i + 1] = rgb[1];
    data[i + 2] = rgb[2];
  }
  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

using Rgb = std::array<std::uint8_t, 3>;
inline constexpr Rgb kGreen{0, 255, 0};
inline constexpr Rgb kRed{255, 0, 0};
inline constexpr Rgb kBlue{0, 0, 255};

/// Decodes binary PGM (P5, maxval <= 255) or 8-bit grayscale PNG from memory.
/// The format is sniffed from the leading magic bytes.
GrayImage decode_scan(std::span<const std::uint8_t> bytes,
                      std::optional<double> resolution_um = std::nullopt);

GrayImage load_scan(const std::filesystem::path& path,
                    std::optional<double> resolution_um = std::nullopt);

/// Quantizes (round, clamp to [0, 255]) and writes PGM for `.pgm`, PNG otherwise.
void save_scan(const GrayImage& image, const std::filesystem::path& path);

std::vector<std::uint8_t> encode_pgm(const GrayImage& image);
std::vector<std::uint8_t> encode_png(const GrayImage& image);
std::vector<std::uint8_t> encode_png(const RgbImage& image);

/// Writes binary PPM (P6) for `.ppm`, PNG otherwise.
void save_rgb(const RgbImage& image, const std::filesystem::path& path);

/// Labels grouped by layer. Either set may be empty.
struct LabelFile {
  LabelSet rpe{Layer::kRpe, {}};
  LabelSet choroid{Layer::kChoroid, {}};

  const LabelSet& for_layer(Layer layer) const noexcept {
    return layer == Layer::kRpe ? rpe : choroid;
  }
};

/// Parses CSV with header `layer,col,row`. Bounds are not checked here.
LabelFile parse_labels(std::string_view text);
LabelFile load_labels(const std::filesystem::path& path);
void save_labels(const LabelFile& labels, const std::filesystem::path& path);

struct OverlayCurve {
  Boundary boundary;
  Rgb color = kGreen;
};

/// Grayscale background expanded to RGB, a 1-px polyline per curve
/// (consecutive columns joined by Bresenham segments) and a 3x3 red dot per
/// label point. Label points outside the image are clipped.
RgbImage render_overlay(const GrayImage& image, std::span<const OverlayCurve> curves,
                        std::span<const LabelSet> labels = {});

void render_overlay(const GrayImage& image, std::span<const OverlayCurve> curves,
                    std::span<const LabelSet> labels, const std::filesystem::path& path);

}  // namespace neutroseg
