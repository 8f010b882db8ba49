#include "neutroseg/scan_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "neutroseg/errors.hpp"

namespace neutroseg {
namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("short write to " + path.string());
}

bool has_extension(const std::filesystem::path& path, std::string_view ext) {
  std::string e = path.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == ext;
}

std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

GrayImage from_bytes(std::size_t rows, std::size_t cols, const std::uint8_t* px,
                     std::optional<double> resolution_um) {
  if (rows < 3 || cols < 3) {
    throw DimensionError("scan must be at least 3x3, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
  GrayImage image;
  image.pixels = Matrix(rows, cols);
  auto out = image.pixels.data();
  for (std::size_t i = 0; i < rows * cols; ++i) out[i] = static_cast<double>(px[i]);
  image.axial_resolution_um = resolution_um.value_or(kDefaultAxialResolutionUm);
  if (!(image.axial_resolution_um > 0.0)) throw ParameterError("axial resolution must be positive");
  return image;
}

// Netpbm header tokenizer: whitespace separated, '#' starts a comment.
class PnmHeader {
 public:
  explicit PnmHeader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t next_number() {
    skip_space_and_comments();
    std::size_t value = 0;
    const auto* begin = reinterpret_cast<const char*>(bytes_.data()) + pos_;
    const auto* end = reinterpret_cast<const char*>(bytes_.data()) + bytes_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) throw DecodeError("malformed PGM header");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw DecodeError("malformed PGM header");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

GrayImage decode_pgm(std::span<const std::uint8_t> bytes, std::optional<double> resolution_um) {
  PnmHeader header(bytes);
  const std::size_t cols = header.next_number();
  const std::size_t rows = header.next_number();
  const std::size_t maxval = header.next_number();
  if (maxval == 0 || maxval > 255) throw DecodeError("only 8-bit PGM is supported");
  const std::size_t offset = header.raster_offset();
  if (cols != 0 && rows > (bytes.size() - std::min(offset, bytes.size())) / cols) {
    throw DecodeError("truncated PGM raster");
  }
  if (bytes.size() < offset + rows * cols) throw DecodeError("truncated PGM raster");
  return from_bytes(rows, cols, bytes.data() + offset, resolution_um);
}

struct PngImage {
  png_image image{};
  PngImage() {
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

GrayImage decode_png(std::span<const std::uint8_t> bytes, std::optional<double> resolution_um) {
  PngImage png;
  if (!png_image_begin_read_from_memory(&png.image, bytes.data(), bytes.size())) {
    throw DecodeError(std::string("PNG decode failed: ") + png.image.message);
  }
  if (png.image.format & (PNG_FORMAT_FLAG_COLOR | PNG_FORMAT_FLAG_ALPHA)) {
    throw ChannelError("PNG is not single-channel grayscale");
  }
  if (png.image.format & PNG_FORMAT_FLAG_LINEAR) {
    throw DecodeError("only 8-bit grayscale PNG is supported");
  }
  png.image.format = PNG_FORMAT_GRAY;
  std::vector<std::uint8_t> raster(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, raster.data(), 0, nullptr)) {
    throw DecodeError(std::string("PNG decode failed: ") + png.image.message);
  }
  return from_bytes(png.image.height, png.image.width, raster.data(), resolution_um);
}

std::vector<std::uint8_t> write_png(std::size_t rows, std::size_t cols, const std::uint8_t* data,
                                    png_uint_32 format) {
  PngImage png;
  png.image.width = static_cast<png_uint_32>(cols);
  png.image.height = static_cast<png_uint_32>(rows);
  png.image.format = format;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png.image, nullptr, &size, 0, data, 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + png.image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png.image, out.data(), &size, 0, data, 0, nullptr)) {
    throw Error(std::string("PNG encode failed: ") + png.image.message);
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> quantized(const GrayImage& image) {
  std::vector<std::uint8_t> px(image.pixels.size());
  std::transform(image.pixels.data().begin(), image.pixels.data().end(), px.begin(), quantize);
  return px;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view field, std::size_t line) {
  field = trim(field);
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ParseError("expected integer, got '" + std::string(field) + "'", line);
  }
  return value;
}

void stamp_dot(RgbImage& out, Point p) {
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const long r = static_cast<long>(p.row) + dr;
      const long c = static_cast<long>(p.col) + dc;
      if (r < 0 || c < 0 || r >= static_cast<long>(out.rows) || c >= static_cast<long>(out.cols)) {
        continue;
      }
      out.set(static_cast<std::size_t>(r), static_cast<std::size_t>(c), kRed);
    }
  }
}

void draw_segment(RgbImage& out, int c0, int r0, int c1, int r1, Rgb color) {
  const int dc = std::abs(c1 - c0);
  const int dr = -std::abs(r1 - r0);
  const int sc = c0 < c1 ? 1 : -1;
  const int sr = r0 < r1 ? 1 : -1;
  int err = dc + dr;
  for (;;) {
    out.set(static_cast<std::size_t>(r0), static_cast<std::size_t>(c0), color);
    if (c0 == c1 && r0 == r1) break;
    const int e2 = 2 * err;
    if (e2 >= dr) {
      err += dr;
      c0 += sc;
    }
    if (e2 <= dc) {
      err += dc;
      r0 += sr;
    }
  }
}

}  // namespace

GrayImage decode_scan(std::span<const std::uint8_t> bytes, std::optional<double> resolution_um) {
  static constexpr std::uint8_t kPngMagic[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngMagic, 8) == 0) {
    return decode_png(bytes, resolution_um);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P') {
    switch (bytes[1]) {
      case '5':
        return decode_pgm(bytes, resolution_um);
      case '3':
      case '6':
        throw ChannelError("color PPM input is not accepted");
      default:
        break;
    }
  }
  throw DecodeError("unrecognized raster format (expected binary PGM or PNG)");
}

GrayImage load_scan(const std::filesystem::path& path, std::optional<double> resolution_um) {
  const auto bytes = read_file(path);
  try {
    return decode_scan(bytes, resolution_um);
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  const std::string header =
      "P5\n" + std::to_string(image.cols()) + " " + std::to_string(image.rows()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const auto px = quantized(image);
  out.insert(out.end(), px.begin(), px.end());
  return out;
}

std::vector<std::uint8_t> encode_png(const GrayImage& image) {
  const auto px = quantized(image);
  return write_png(image.rows(), image.cols(), px.data(), PNG_FORMAT_GRAY);
}

std::vector<std::uint8_t> encode_png(const RgbImage& image) {
  return write_png(image.rows, image.cols, image.data.data(), PNG_FORMAT_RGB);
}

void save_scan(const GrayImage& image, const std::filesystem::path& path) {
  write_file(path, has_extension(path, ".pgm") ? encode_pgm(image) : encode_png(image));
}

void save_rgb(const RgbImage& image, const std::filesystem::path& path) {
  if (has_extension(path, ".ppm")) {
    const std::string header =
        "P6\n" + std::to_string(image.cols) + " " + std::to_string(image.rows) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), image.data.begin(), image.data.end());
    write_file(path, out);
  } else {
    write_file(path, encode_png(image));
  }
}

LabelFile parse_labels(std::string_view text) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  LabelFile labels;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != "layer,col,row") throw ParseError("expected header 'layer,col,row'", line_no);
      header_seen = true;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError("expected 3 fields", line_no);
    }
    const auto layer = parse_layer(trim(line.substr(0, c1)));
    if (!layer) throw ParseError("layer must be RPE or CHOROID", line_no);
    const Point p{parse_int(line.substr(c1 + 1, c2 - c1 - 1), line_no),
                  parse_int(line.substr(c2 + 1), line_no)};
    (*layer == Layer::kRpe ? labels.rpe : labels.choroid).points.push_back(p);
  }
  if (!header_seen) throw ParseError("missing header 'layer,col,row'", 1);
  return labels;
}

LabelFile load_labels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_labels(ss.str());
}

void save_labels(const LabelFile& labels, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << "layer,col,row\n";
  for (const LabelSet* set : {&labels.rpe, &labels.choroid}) {
    for (const Point& p : set->points) {
      out << to_string(set->layer) << ',' << p.col << ',' << p.row << '\n';
    }
  }
}

RgbImage render_overlay(const GrayImage& image, std::span<const OverlayCurve> curves,
                        std::span<const LabelSet> labels) {
  RgbImage out(image.rows(), image.cols());
  const auto px = image.pixels.data();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const std::uint8_t g = quantize(px[i]);
    out.data[3 * i] = out.data[3 * i + 1] = out.data[3 * i + 2] = g;
  }
  for (const OverlayCurve& curve : curves) {
    const auto& rows = curve.boundary.rows;
    if (rows.size() != image.cols()) {
      throw DimensionError("overlay boundary has " + std::to_string(rows.size()) +
                           " columns, image has " + std::to_string(image.cols()));
    }
    for (int r : rows) {
      if (r < 0 || static_cast<std::size_t>(r) >= image.rows()) {
        throw DimensionError("overlay boundary row out of image bounds");
      }
    }
    for (std::size_t c = 0; c + 1 < rows.size(); ++c) {
      draw_segment(out, static_cast<int>(c), rows[c], static_cast<int>(c + 1), rows[c + 1],
                   curve.color);
    }
    if (rows.size() == 1) out.set(static_cast<std::size_t>(rows[0]), 0, curve.color);
  }
  for (const LabelSet& set : labels) {
    for (const Point& p : set.points) stamp_dot(out, p);
  }
  return out;
}

void render_overlay(const GrayImage& image, std::span<const OverlayCurve> curves,
                    std::span<const LabelSet> labels, const std::filesystem::path& path) {
  save_rgb(render_overlay(image, curves, labels), path);
}

}  // namespace neutroseg
