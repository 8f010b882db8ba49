#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <string>

#include "neutroseg/errors.hpp"
#include "neutroseg/scan_io.hpp"

namespace fs = std::filesystem;
using namespace neutroseg;

namespace {

fs::path tmp_dir() {
  fs::path dir = fs::path(NEUTROSEG_TEST_TMP) / "scan_io";
  fs::create_directories(dir);
  return dir;
}

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

std::vector<std::uint8_t> read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

GrayImage ramp(std::size_t rows, std::size_t cols) {
  GrayImage g;
  g.pixels = Matrix(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) g.pixels(r, c) = static_cast<double>((r * 7 + c * 3) % 256);
  return g;
}

std::size_t count_differing(const RgbImage& a, const RgbImage& b) {
  std::size_t n = 0;
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t c = 0; c < a.cols; ++c) n += a.at(r, c) != b.at(r, c);
  return n;
}

}  // namespace

TEST(DecodeScan, PgmBytesAreExact) {
  std::string file = "P5\n3 3\n255\n";
  for (char v = 0; v < 9; ++v) file.push_back(v);
  const GrayImage g = decode_scan(bytes_of(file));
  ASSERT_EQ(g.rows(), 3u);
  ASSERT_EQ(g.cols(), 3u);
  EXPECT_EQ(g.pixels(2, 2), 8.0);
  EXPECT_EQ(g.pixels(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(g.axial_resolution_um, 3.87167);
}

TEST(DecodeScan, AllZero3x3) {
  const std::string file = "P5 3 3 255\n" + std::string(9, '\0');
  const GrayImage g = decode_scan(bytes_of(file));
  EXPECT_EQ(g.pixels, Matrix(3, 3, 0.0));
}

TEST(DecodeScan, HeaderCommentsAndResolutionOverride) {
  const std::string file = "P5\n# scanner export\n3 3\n255\n" + std::string(9, '\x10');
  const GrayImage g = decode_scan(bytes_of(file), 5.0);
  EXPECT_EQ(g.pixels(1, 1), 16.0);
  EXPECT_EQ(g.axial_resolution_um, 5.0);
}

TEST(DecodeScan, Errors) {
  EXPECT_THROW(decode_scan(bytes_of("P5 2 2 255\n" + std::string(4, '\0'))), DimensionError);
  EXPECT_THROW(decode_scan(bytes_of("P5 3 3 65535\n" + std::string(18, '\0'))), DecodeError);
  EXPECT_THROW(decode_scan(bytes_of("P5 3 3 255\n" + std::string(5, '\0'))), DecodeError);
  EXPECT_THROW(decode_scan(bytes_of("P6 3 3 255\n" + std::string(27, '\0'))), ChannelError);
  EXPECT_THROW(decode_scan(bytes_of("GIF89a")), DecodeError);
  EXPECT_THROW(decode_scan(std::vector<std::uint8_t>{}), DecodeError);
}

TEST(DecodeScan, ColorPngRejected) {
  RgbImage rgb(4, 4);
  EXPECT_THROW(decode_scan(encode_png(rgb)), ChannelError);
}

TEST(LoadScan, FullSizePngRoundTrip) {
  const GrayImage g = ramp(496, 768);
  const fs::path p = tmp_dir() / "full.png";
  save_scan(g, p);
  const GrayImage back = load_scan(p);
  EXPECT_EQ(back.rows(), 496u);
  EXPECT_EQ(back.cols(), 768u);
  EXPECT_EQ(back.pixels, g.pixels);
}

TEST(LoadScan, PgmFileRoundTripIsByteIdentical) {
  const fs::path p = tmp_dir() / "rt.pgm";
  save_scan(ramp(17, 23), p);
  const auto original = read_all(p);
  const GrayImage loaded = load_scan(p);
  const fs::path q = tmp_dir() / "rt2.pgm";
  save_scan(loaded, q);
  EXPECT_EQ(read_all(q), original);
  EXPECT_EQ(encode_pgm(loaded), original);
}

TEST(LoadScan, MissingFileIsDecodeError) {
  EXPECT_THROW(load_scan(tmp_dir() / "does_not_exist.png"), DecodeError);
}

TEST(LoadScan, PixelsStayInByteRange) {
  const GrayImage g = load_scan([] {
    const fs::path p = tmp_dir() / "range.png";
    save_scan(ramp(9, 9), p);
    return p;
  }());
  EXPECT_GE(g.pixels.min(), 0.0);
  EXPECT_LE(g.pixels.max(), 255.0);
}

TEST(SaveScan, QuantizesOnExport) {
  GrayImage g;
  g.pixels = Matrix(3, 3, 10.4);
  g.pixels(0, 0) = 10.6;
  g.pixels(1, 1) = 300.0;
  const GrayImage back = decode_scan(encode_pgm(g));
  EXPECT_EQ(back.pixels(0, 0), 11.0);
  EXPECT_EQ(back.pixels(0, 1), 10.0);
  EXPECT_EQ(back.pixels(1, 1), 255.0);
}

TEST(Labels, SingleRecord) {
  const LabelFile f = parse_labels("layer,col,row\nRPE,100,250\n");
  ASSERT_EQ(f.rpe.points.size(), 1u);
  EXPECT_EQ(f.rpe.points[0], (Point{100, 250}));
  EXPECT_EQ(f.rpe.layer, Layer::kRpe);
  EXPECT_TRUE(f.choroid.points.empty());
}

TEST(Labels, HeaderOnlyIsEmpty) {
  const LabelFile f = parse_labels("layer,col,row\n");
  EXPECT_TRUE(f.rpe.points.empty());
  EXPECT_TRUE(f.choroid.points.empty());
}

TEST(Labels, MixedLayersAreGrouped) {
  const LabelFile f = parse_labels(
      "layer,col,row\r\nRPE,1,2\r\nCHOROID,3,4\r\nCHOROID,5,6\r\nRPE,7,8\r\nCHOROID,9,10\r\n");
  EXPECT_EQ(f.rpe.points.size(), 2u);
  EXPECT_EQ(f.choroid.points.size(), 3u);
  EXPECT_EQ(f.for_layer(Layer::kChoroid).points[2], (Point{9, 10}));
}

TEST(Labels, ByteOrderMarkAccepted) {
  const LabelFile f = parse_labels("\xEF\xBB\xBFlayer,col,row\nCHOROID,0,0\n");
  EXPECT_EQ(f.choroid.points.size(), 1u);
}

TEST(Labels, MalformedRowReportsLine) {
  try {
    parse_labels("layer,col,row\nRPE,1,2\nRPE,x,3\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_labels("layer,col,row\nRETINA,1,2\n"), ParseError);
  EXPECT_THROW(parse_labels("layer,col,row\nRPE,1\n"), ParseError);
  EXPECT_THROW(parse_labels("col,row\n"), ParseError);
}

TEST(Labels, SaveLoadRoundTrip) {
  LabelFile f;
  f.rpe.points = {{1, 2}, {3, 4}};
  f.choroid.points = {{5, 6}};
  const fs::path p = tmp_dir() / "labels.csv";
  save_labels(f, p);
  const LabelFile back = load_labels(p);
  EXPECT_EQ(back.rpe.points, f.rpe.points);
  EXPECT_EQ(back.choroid.points, f.choroid.points);
}

TEST(Overlay, NoCurvesIsGrayExpanded) {
  const GrayImage g = ramp(20, 30);
  const RgbImage out = render_overlay(g, {});
  for (std::size_t r = 0; r < 20; ++r) {
    for (std::size_t c = 0; c < 30; ++c) {
      const auto v = static_cast<std::uint8_t>(g.pixels(r, c));
      ASSERT_EQ(out.at(r, c), (Rgb{v, v, v}));
    }
  }
}

TEST(Overlay, ConstantBoundaryRecolorsOneRow) {
  const GrayImage g = ramp(20, 30);
  const RgbImage base = render_overlay(g, {});
  const std::vector<OverlayCurve> curves{{Boundary{std::vector<int>(30, 7), Layer::kRpe}, kGreen}};
  const RgbImage out = render_overlay(g, curves);
  EXPECT_EQ(count_differing(base, out), 30u);
  for (std::size_t c = 0; c < 30; ++c) EXPECT_EQ(out.at(7, c), kGreen);
}

TEST(Overlay, LabelDotsAddFootprints) {
  const GrayImage g = ramp(40, 40);
  const RgbImage base = render_overlay(g, {});
  const std::vector<OverlayCurve> curves{{Boundary{std::vector<int>(40, 20), Layer::kChoroid}, kGreen}};
  // Three isolated dots plus one centered on the line (its middle row overlaps).
  const std::vector<LabelSet> labels{{Layer::kChoroid, {{5, 5}, {30, 5}, {10, 33}, {25, 20}}}};
  const RgbImage out = render_overlay(g, curves, labels);
  EXPECT_EQ(count_differing(base, out), 40u + 4u * 9u - 3u);
  EXPECT_EQ(out.at(5, 5), kRed);
  EXPECT_EQ(out.at(21, 26), kRed);
}

TEST(Overlay, SteepStepsAreConnected) {
  const GrayImage g = ramp(20, 3);
  const std::vector<OverlayCurve> curves{{Boundary{{2, 12, 12}, Layer::kRpe}, kBlue}};
  const RgbImage out = render_overlay(g, curves);
  std::size_t blue = 0;
  for (std::size_t r = 0; r < 20; ++r)
    for (std::size_t c = 0; c < 3; ++c) blue += out.at(r, c) == kBlue;
  EXPECT_EQ(blue, 12u);  // 11 pixels for the 2->12 segment, one more for column 2
}

TEST(Overlay, LengthMismatchThrows) {
  const GrayImage g = ramp(10, 10);
  const std::vector<OverlayCurve> curves{{Boundary{std::vector<int>(9, 1), Layer::kRpe}, kGreen}};
  EXPECT_THROW(render_overlay(g, curves), DimensionError);
}

TEST(Overlay, WritesFile) {
  const fs::path p = tmp_dir() / "overlay.png";
  render_overlay(ramp(10, 10), {}, {}, p);
  EXPECT_TRUE(fs::exists(p));
  EXPECT_THROW(decode_scan(read_all(p)), ChannelError);
}
