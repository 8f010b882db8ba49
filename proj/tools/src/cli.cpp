#include "neutroseg_app/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <optional>

#include "neutroseg/errors.hpp"
#include "neutroseg/phantom.hpp"
#include "neutroseg/pipeline.hpp"
#include "neutroseg/serialization.hpp"
#include "neutroseg_app/service.hpp"

namespace neutroseg::app {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

// Thrown for problems that make the whole invocation meaningless.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string format(const char* fmt, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

bool is_scan_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".pgm";
}

// Directories expand to their scan files in name order.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& inputs) {
  std::vector<fs::path> out;
  for (const std::string& in : inputs) {
    const fs::path p(in);
    if (!fs::is_directory(p)) {
      out.push_back(p);
      continue;
    }
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(p)) {
      if (entry.is_regular_file() && is_scan_file(entry.path())) found.push_back(entry.path());
    }
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

PipelineConfig config_or_default(const std::string& path) {
  if (path.empty()) return {};
  try {
    return load_config(path);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

struct SegmentArgs {
  std::vector<std::string> inputs;
  std::string config;
  std::string out = ".";
  bool overlay = false;
  std::optional<double> resolution;
};

int cmd_segment(const SegmentArgs& args, std::ostream& out, std::ostream& err) {
  const PipelineConfig cfg = config_or_default(args.config);
  const std::vector<fs::path> inputs = expand_inputs(args.inputs);
  if (inputs.empty()) throw UsageError("no scans found in the given inputs");
  fs::create_directories(args.out);

  int failures = 0;
  for (const fs::path& in : inputs) {
    try {
      const GrayImage scan = load_scan(in, args.resolution);
      const SegmentationResult r = segment(scan, cfg);
      const std::string stem = in.stem().string();
      save_result(r, fs::path(args.out) / (stem + ".json"));
      write_text(fs::path(args.out) / (stem + "_thickness.csv"), thickness_csv(r.thickness));
      if (args.overlay) {
        const std::vector<OverlayCurve> curves{{r.rpe, kGreen}, {r.choroid, kGreen}};
        render_overlay(scan, curves, {}, fs::path(args.out) / (stem + "_overlay.png"));
      }
      out << in.string() << ": ok, mean thickness "
          << format("%.2f px (%.4f mm)", r.thickness.mean_px, r.thickness.mean_mm);
      if (r.flags.low_confidence) out << " [low confidence]";
      if (r.flags.choroid_above_rpe) out << " [choroid above RPE]";
      out << '\n';
    } catch (const std::exception& e) {
      ++failures;
      const std::string what = e.what();
      if (what.find(in.string()) == std::string::npos) err << in.string() << ": ";
      err << what << '\n';
    }
  }
  return failures == 0 ? kExitOk : kExitPartial;
}

json report_json(const ErrorReport& r) {
  json points = json::array();
  for (const PointError& p : r.per_point) {
    points.push_back({{"col", p.col},
                      {"labeled_row", p.labeled_row},
                      {"predicted_row", p.predicted_row},
                      {"abs_diff", p.abs_diff}});
  }
  return {{"layer", std::string(to_string(r.layer))},
          {"n_points", r.n_points},
          {"mean_unsigned_px", r.mean_unsigned_px},
          {"mean_unsigned_mm", r.mean_unsigned_mm},
          {"per_point", std::move(points)}};
}

int cmd_eval(const std::string& result_path, const std::string& labels_path, bool as_json,
             std::ostream& out) {
  const SegmentationResult r = load_result(result_path);
  const LabelFile labels = load_labels(labels_path);
  const double mm_per_px = r.axial_resolution_um / 1000.0;

  std::vector<ErrorReport> reports;
  for (Layer layer : {Layer::kRpe, Layer::kChoroid}) {
    const LabelSet& set = labels.for_layer(layer);
    if (set.points.empty()) continue;
    const Boundary& b = layer == Layer::kRpe ? r.rpe : r.choroid;
    reports.push_back(evaluate(b, set, r.axial_resolution_um, r.image_rows));
  }
  if (reports.empty()) throw UndefinedMetricError("label file has no points");

  std::size_t n = 0;
  double sum_px = 0.0;
  for (const ErrorReport& rep : reports) {
    n += rep.n_points;
    sum_px += rep.mean_unsigned_px * static_cast<double>(rep.n_points);
  }
  const double all_px = sum_px / static_cast<double>(n);
  const double all_mm = all_px * mm_per_px;

  if (as_json) {
    json layers = json::object();
    for (const ErrorReport& rep : reports) layers[std::string(to_string(rep.layer))] = report_json(rep);
    const json doc{{"layers", std::move(layers)},
                   {"aggregate", {{"n_points", n}, {"mean_unsigned_px", all_px}, {"mean_unsigned_mm", all_mm}}}};
    out << doc.dump(2) << '\n';
    return kExitOk;
  }
  for (const ErrorReport& rep : reports) {
    out << to_string(rep.layer) << ": " << rep.n_points << " points, "
        << format("%.2f px, %.8f mm", rep.mean_unsigned_px, rep.mean_unsigned_mm) << '\n';
  }
  out << "ALL: " << n << " points, " << format("%.2f px, %.8f mm", all_px, all_mm) << '\n';
  return kExitOk;
}

int cmd_thickness_map(const std::vector<std::string>& results, const std::string& out_path,
                      std::ostream& out) {
  std::vector<SegmentationResult> volume;
  volume.reserve(results.size());
  for (const std::string& p : results) volume.push_back(load_result(p));
  thickness_map(volume, out_path);
  const fs::path stem = fs::path(out_path).replace_extension();
  out << "wrote " << stem.string() << ".{csv,png,txt}\n";
  return kExitOk;
}

struct ServeArgs {
  std::string bind = "127.0.0.1";
  int port = 8080;
  std::string config;
  std::string ui_dir;
  std::string results_dir;
  std::size_t max_upload_mib = 32;
};

int cmd_serve(const ServeArgs& args, std::ostream& out) {
  ServiceOptions opts;
  opts.config = config_or_default(args.config);
  opts.max_upload_bytes = args.max_upload_mib << 20;
  if (!args.ui_dir.empty()) {
    if (!fs::is_directory(args.ui_dir)) throw UsageError("--ui-dir is not a directory");
    opts.ui_dir = args.ui_dir;
  }
  if (!args.results_dir.empty()) opts.results_dir = args.results_dir;
  Service service(std::move(opts));
  out << "listening on http://" << args.bind << ':' << args.port << std::endl;
  if (!service.listen(args.bind, args.port)) throw Error("cannot listen on " + args.bind);
  return kExitOk;
}

struct PhantomArgs {
  std::string out;
  std::string labels;
  std::uint64_t seed = 1;
  bool vessels = false;
  int label_step = 16;
};

int cmd_phantom(const PhantomArgs& args, std::ostream& out) {
  const Phantom p = make_phantom(random_phantom_spec(args.seed, args.vessels));
  if (const fs::path dir = fs::path(args.out).parent_path(); !dir.empty()) fs::create_directories(dir);
  save_scan(p.image, args.out);
  if (!args.labels.empty()) {
    LabelFile labels;
    for (std::size_t c = 0; c < p.image.cols(); c += static_cast<std::size_t>(args.label_step)) {
      const int col = static_cast<int>(c);
      labels.rpe.points.push_back({col, p.rpe.rows[c]});
      labels.choroid.points.push_back({col, p.choroid.rows[c]});
    }
    save_labels(labels, args.labels);
  }
  out << "wrote " << args.out << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neutrosophic graph-search segmentation of RPE and choroid in EDI-OCT B-scans",
               "neutroseg"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "neutroseg 0.1.0");

  SegmentArgs seg;
  auto* segment_cmd = app.add_subcommand("segment", "Segment scans and write result JSON + thickness CSV");
  segment_cmd->add_option("inputs", seg.inputs, "Scan files (.png/.pgm) or directories")->required();
  segment_cmd->add_option("--config", seg.config, "key = value pipeline config");
  segment_cmd->add_option("--out", seg.out, "Output directory")->capture_default_str();
  segment_cmd->add_flag("--overlay", seg.overlay, "Also write <stem>_overlay.png");
  segment_cmd->add_option("--resolution", seg.resolution, "Axial resolution in micrometers per row")
      ->check(CLI::PositiveNumber);

  std::string eval_result;
  std::string eval_labels;
  bool eval_json = false;
  auto* eval_cmd = app.add_subcommand("eval", "Mean unsigned error against labeled points");
  eval_cmd->add_option("result", eval_result, "Result JSON")->required();
  eval_cmd->add_option("labels", eval_labels, "Label CSV (layer,col,row)")->required();
  eval_cmd->add_flag("--json", eval_json, "Machine-readable output");

  std::vector<std::string> map_inputs;
  std::string map_out;
  auto* map_cmd = app.add_subcommand("thickness-map", "Stack results into a thickness map");
  map_cmd->add_option("results", map_inputs, "Result JSONs in scan order")->required();
  map_cmd->add_option("--out", map_out, "Output path stem")->required();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP service for the correction UI");
  serve_cmd->add_option("--bind", serve.bind, "Bind address")->envname("NEUTROSEG_BIND")->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Port")->envname("NEUTROSEG_PORT")->capture_default_str()
      ->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--config", serve.config, "key = value pipeline config");
  serve_cmd->add_option("--ui-dir", serve.ui_dir, "Static files served at /");
  serve_cmd->add_option("--results-dir", serve.results_dir, "Write-through directory for results");
  serve_cmd->add_option("--max-upload-mib", serve.max_upload_mib, "Upload size limit")
      ->capture_default_str()->check(CLI::Range(1, 4096));

  PhantomArgs ph;
  auto* phantom_cmd = app.add_subcommand("phantom", "Write a synthetic B-scan with known boundaries");
  phantom_cmd->add_option("--out", ph.out, "Scan path (.png/.pgm)")->required();
  phantom_cmd->add_option("--labels", ph.labels, "Also write ground-truth labels here");
  phantom_cmd->add_option("--seed", ph.seed, "Random seed")->capture_default_str();
  phantom_cmd->add_flag("--vessels", ph.vessels, "Add dark vessels to the choroid");
  phantom_cmd->add_option("--label-step", ph.label_step, "Columns between labels")
      ->capture_default_str()->check(CLI::PositiveNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*segment_cmd) return cmd_segment(seg, out, err);
    if (*eval_cmd) return cmd_eval(eval_result, eval_labels, eval_json, out);
    if (*map_cmd) return cmd_thickness_map(map_inputs, map_out, out);
    if (*serve_cmd) return cmd_serve(serve, out);
    if (*phantom_cmd) return cmd_phantom(ph, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitPartial;
  }
  return kExitUsage;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace neutroseg::app
