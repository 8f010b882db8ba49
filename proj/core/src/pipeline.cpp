#include "neutroseg/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "neutroseg/errors.hpp"

namespace neutroseg {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

NeutrosophicImage neutrosophic_stage(const GrayImage& image, const PipelineConfig& cfg) {
  NeutrosophicImage ns = to_neutrosophic(image, cfg.neutro);
  if (cfg.apply_alpha_mean) ns = alpha_mean(ns, cfg.neutro);
  return ns;
}

void check_point(Point p, std::size_t cols, std::size_t rows) {
  if (p.col < 0 || static_cast<std::size_t>(p.col) >= cols || p.row < 0 ||
      static_cast<std::size_t>(p.row) >= rows) {
    throw DimensionError("point (" + std::to_string(p.col) + ", " + std::to_string(p.row) +
                         ") outside the " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " scan");
  }
}

}  // namespace

void validate(const PipelineConfig& cfg) {
  validate(cfg.neutro);
  validate(cfg.weight_rpe);
  validate(cfg.weight_choroid);
  if (!(cfg.gamma > 0.0 && cfg.gamma <= 1.0)) throw ParameterError("gamma must lie in (0, 1]");
  if (!(cfg.homomorphic.sigma > 0.0)) throw ParameterError("homomorphic sigma must be positive");
  if (cfg.roi_offset_px < 0) throw ParameterError("roi_offset_px must be >= 0");
  if (!(cfg.min_gradient_energy >= 0.0)) throw ParameterError("min_gradient_energy must be >= 0");
}

RpeDetection detect_rpe(const GrayImage& image, const PipelineConfig& cfg) {
  validate(cfg);
  validate(image);
  const NeutrosophicImage ns = neutrosophic_stage(image, cfg);
  const Matrix truth = affine(ns.truth, kMaxGray, 0.0);
  const Matrix score = node_gradient_score(vertical_gradient(truth), cfg.weight_rpe.mode);

  RpeDetection det;
  double energy = 0.0;
  for (double v : score.data()) energy += std::abs(v);
  det.gradient_energy = energy / static_cast<double>(score.size());
  det.low_confidence = det.gradient_energy < cfg.min_gradient_energy;
  det.boundary = shortest_boundary(score, image.pixels, cfg.weight_rpe, Layer::kRpe);
  return det;
}

Matrix enhance_falsity(const GrayImage& roi, const PipelineConfig& cfg) {
  const NeutrosophicImage ns = neutrosophic_stage(roi, cfg);
  Matrix f = affine(ns.falsity, kMaxGray, 0.0);
  const auto homomorphic = [&](const Matrix& m) {
    return cfg.homomorphic_enabled ? homomorphic_filter(m, cfg.homomorphic) : m;
  };
  if (cfg.order == EnhancementOrder::kGammaFirst) {
    return homomorphic(gamma_correct(f, cfg.gamma));
  }
  return gamma_correct(homomorphic(f), cfg.gamma);
}

ChoroidDetection detect_choroid(const GrayImage& image, const Boundary& rpe,
                                const PipelineConfig& cfg) {
  validate(cfg);
  validate(image);
  Flattened flat = flatten(image, rpe);
  const std::size_t rows = image.rows();
  const std::size_t roi_top = static_cast<std::size_t>(flat.map.pivot_row) +
                              static_cast<std::size_t>(cfg.roi_offset_px);
  if (roi_top + 3 > rows) {
    std::vector<std::size_t> deepest;
    for (std::size_t c = 0; c < rpe.size(); ++c) {
      if (rpe.rows[c] == flat.map.pivot_row) deepest.push_back(c);
    }
    std::string what = "choroid search region below the RPE is shorter than 3 rows (RPE row " +
                       std::to_string(flat.map.pivot_row) + " + offset " +
                       std::to_string(cfg.roi_offset_px) + " in a " + std::to_string(rows) +
                       "-row scan, deepest at column " + std::to_string(deepest.front()) + ")";
    throw GeometryError(what, std::move(deepest));
  }

  GrayImage roi;
  roi.pixels = crop_rows(flat.image.pixels, roi_top, rows - roi_top);
  roi.axial_resolution_um = image.axial_resolution_um;
  const Matrix enhanced = enhance_falsity(roi, cfg);

  // F inverts polarity, so the gradient in image polarity is -VerGrad(F).
  const Matrix image_gradient = affine(vertical_gradient(enhanced), -1.0, 0.0);
  const Matrix score = node_gradient_score(image_gradient, cfg.weight_choroid.mode);
  Boundary in_roi = shortest_boundary(score, enhanced, cfg.weight_choroid, Layer::kChoroid);
  for (int& r : in_roi.rows) r += static_cast<int>(roi_top);

  ChoroidDetection det;
  det.boundary = unflatten_boundary(in_roi, flat.map);
  det.flatten_map = std::move(flat.map);
  det.roi_top = static_cast<int>(roi_top);
  return det;
}

ThicknessProfile thickness_profile(const Boundary& rpe, const Boundary& choroid,
                                   double resolution_um) {
  if (rpe.size() != choroid.size()) {
    throw DimensionError("RPE and choroid boundaries differ in length");
  }
  if (!(resolution_um > 0.0)) throw ParameterError("axial resolution must be positive");
  const double mm_per_px = resolution_um / 1000.0;
  ThicknessProfile t;
  t.per_column_px.resize(rpe.size());
  t.per_column_mm.resize(rpe.size());
  long total = 0;
  for (std::size_t c = 0; c < rpe.size(); ++c) {
    t.per_column_px[c] = choroid.rows[c] - rpe.rows[c];
    t.per_column_mm[c] = t.per_column_px[c] * mm_per_px;
    total += t.per_column_px[c];
  }
  if (!rpe.rows.empty()) {
    t.mean_px = static_cast<double>(total) / static_cast<double>(rpe.size());
    t.mean_mm = t.mean_px * mm_per_px;
  }
  return t;
}

void refresh_derived(SegmentationResult& result) {
  result.thickness = thickness_profile(result.rpe, result.choroid, result.axial_resolution_um);
  result.flags.choroid_above_rpe = std::any_of(
      result.thickness.per_column_px.begin(), result.thickness.per_column_px.end(),
      [](int px) { return px < 0; });
  result.flags.low_confidence = result.gradient_energy < result.config.min_gradient_energy;
}

SegmentationResult segment(const GrayImage& image, const PipelineConfig& cfg) {
  const auto start = Clock::now();
  SegmentationResult result;
  result.image_rows = image.rows();
  result.image_cols = image.cols();
  result.axial_resolution_um = image.axial_resolution_um;
  result.config = cfg;

  auto stage = Clock::now();
  RpeDetection rpe = detect_rpe(image, cfg);
  result.stage_timings_ms["rpe"] = elapsed_ms(stage);
  result.rpe = std::move(rpe.boundary);
  result.gradient_energy = rpe.gradient_energy;

  stage = Clock::now();
  ChoroidDetection choroid;
  try {
    choroid = detect_choroid(image, result.rpe, cfg);
  } catch (const GeometryError&) {
    if (!rpe.low_confidence) throw;
    // Degenerate input: keep a zero-thickness draft for manual correction.
    choroid.boundary = {result.rpe.rows, Layer::kChoroid};
    choroid.flatten_map = flatten(image, result.rpe).map;
  }
  result.stage_timings_ms["choroid"] = elapsed_ms(stage);
  result.choroid = std::move(choroid.boundary);
  result.flatten_map = std::move(choroid.flatten_map);

  stage = Clock::now();
  refresh_derived(result);
  result.stage_timings_ms["thickness"] = elapsed_ms(stage);
  result.stage_timings_ms["total"] = elapsed_ms(start);
  return result;
}

Boundary apply_manual_correction(const Boundary& b, Point a, Point c, std::size_t image_rows) {
  if (a.col > c.col) std::swap(a, c);
  if (a.col == c.col) {
    throw DegenerateSelectionError("correction points share column " + std::to_string(a.col));
  }
  check_point(a, b.size(), image_rows);
  check_point(c, b.size(), image_rows);

  Boundary out = b;
  const double span = c.col - a.col;
  const double rise = c.row - a.row;
  out.rows[static_cast<std::size_t>(a.col)] = a.row;
  out.rows[static_cast<std::size_t>(c.col)] = c.row;
  for (int col = a.col + 1; col < c.col; ++col) {
    const double row = a.row + rise * (col - a.col) / span;
    out.rows[static_cast<std::size_t>(col)] = static_cast<int>(std::lround(row));
  }
  return out;
}

void apply_correction(SegmentationResult& result, const Correction& correction) {
  Boundary& target = correction.layer == Layer::kRpe ? result.rpe : result.choroid;
  target = apply_manual_correction(target, correction.a, correction.b, result.image_rows);
  result.corrections.push_back(correction);
  refresh_derived(result);
}

ErrorReport evaluate(const Boundary& b, const LabelSet& labels, double resolution_um,
                     std::optional<std::size_t> image_rows) {
  if (labels.layer != b.layer) {
    throw ParameterError("label layer " + std::string(to_string(labels.layer)) +
                         " does not match boundary layer " + std::string(to_string(b.layer)));
  }
  if (labels.points.empty()) {
    throw UndefinedMetricError("no " + std::string(to_string(labels.layer)) + " labels to evaluate");
  }
  ErrorReport report;
  report.layer = labels.layer;
  long total = 0;
  for (const Point& p : labels.points) {
    check_point(p, b.size(), image_rows.value_or(static_cast<std::size_t>(p.row) + 1));
    const int predicted = b.rows[static_cast<std::size_t>(p.col)];
    const int diff = std::abs(predicted - p.row);
    report.per_point.push_back({p.col, p.row, predicted, diff});
    total += diff;
  }
  report.n_points = labels.points.size();
  report.mean_unsigned_px = static_cast<double>(total) / static_cast<double>(report.n_points);
  report.mean_unsigned_mm = report.mean_unsigned_px * (resolution_um / 1000.0);
  return report;
}

Rgb thickness_color(double value, double lo, double hi) {
  double t = hi > lo ? (value - lo) / (hi - lo) : 0.5;
  t = std::clamp(t, 0.0, 1.0);
  return {static_cast<std::uint8_t>(std::lround(255.0 * t)), 0,
          static_cast<std::uint8_t>(std::lround(255.0 * (1.0 - t)))};
}

void thickness_map(std::span<const SegmentationResult> volume, const std::filesystem::path& out) {
  if (volume.empty()) throw DimensionError("thickness map needs at least one scan");
  const std::size_t cols = volume.front().thickness.per_column_mm.size();
  for (std::size_t s = 0; s < volume.size(); ++s) {
    if (volume[s].thickness.per_column_mm.size() != cols) {
      throw DimensionError("scan " + std::to_string(s) + " has " +
                           std::to_string(volume[s].thickness.per_column_mm.size()) +
                           " columns, expected " + std::to_string(cols));
    }
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& r : volume) {
    for (double v : r.thickness.per_column_mm) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }

  auto stem = out;
  stem.replace_extension();
  auto with_ext = [&](const char* ext) {
    auto p = stem;
    p += ext;
    return p;
  };

  std::ofstream csv(with_ext(".csv"), std::ios::trunc);
  if (!csv) throw Error("cannot write " + with_ext(".csv").string());
  csv << "scan";
  for (std::size_t c = 0; c < cols; ++c) csv << ',' << c;
  csv << '\n';
  RgbImage raster(volume.size(), cols);
  for (std::size_t s = 0; s < volume.size(); ++s) {
    csv << s;
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = volume[s].thickness.per_column_mm[c];
      csv << ',' << format_number(v);
      raster.set(s, c, thickness_color(v, lo, hi));
    }
    csv << '\n';
  }
  if (!csv) throw Error("short write to " + with_ext(".csv").string());
  save_rgb(raster, with_ext(".png"));

  std::ofstream side(with_ext(".txt"), std::ios::trunc);
  if (!side) throw Error("cannot write " + with_ext(".txt").string());
  side << "colormap = linear blue (0,0,255) at min_mm to red (255,0,0) at max_mm\n"
       << "min_mm = " << format_number(lo) << '\n'
       << "max_mm = " << format_number(hi) << '\n'
       << "scans = " << volume.size() << '\n'
       << "columns = " << cols << '\n';
}

std::string thickness_csv(const ThicknessProfile& t) {
  std::string out = "col,thickness_px,thickness_mm\n";
  for (std::size_t c = 0; c < t.per_column_px.size(); ++c) {
    out += std::to_string(c) + ',' + std::to_string(t.per_column_px[c]) + ',' +
           format_number(t.per_column_mm[c]) + '\n';
  }
  return out;
}

}  // namespace neutroseg
