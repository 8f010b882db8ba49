#include "neutroseg/types.hpp"

#include <cmath>
#include <string>

#include "neutroseg/errors.hpp"

namespace neutroseg {

void validate(const GrayImage& image) {
  if (image.rows() < 3 || image.cols() < 3) {
    throw DimensionError("scan must be at least 3x3, got " + std::to_string(image.rows()) + "x" +
                         std::to_string(image.cols()));
  }
  if (!(image.axial_resolution_um > 0.0)) {
    throw ParameterError("axial resolution must be positive");
  }
  for (double v : image.pixels.data()) {
    if (!(v >= 0.0 && v <= kMaxGray)) throw DomainError("pixel outside [0, 255]");
  }
}

std::string_view to_string(Layer layer) noexcept {
  return layer == Layer::kRpe ? "RPE" : "CHOROID";
}

std::optional<Layer> parse_layer(std::string_view text) noexcept {
  if (text == "RPE") return Layer::kRpe;
  if (text == "CHOROID") return Layer::kChoroid;
  return std::nullopt;
}

}  // namespace neutroseg
