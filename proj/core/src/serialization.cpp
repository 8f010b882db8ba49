#include "neutroseg/serialization.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "neutroseg/errors.hpp"

namespace neutroseg {
namespace {

using nlohmann::json;

constexpr std::string_view kResultFormat = "neutroseg.result/1";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("expected a number");
  }
  return v;
}

int parse_int(std::string_view text) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("expected an integer");
  }
  return v;
}

bool parse_bool(std::string_view text) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  throw std::invalid_argument("expected true or false");
}

WeightMode parse_mode(std::string_view text) {
  if (text == "rpe") return WeightMode::kRpe;
  if (text == "dark_to_light") return WeightMode::kDarkToLight;
  throw std::invalid_argument("expected rpe or dark_to_light");
}

std::string mode_name(WeightMode m) { return m == WeightMode::kRpe ? "rpe" : "dark_to_light"; }

EnhancementOrder parse_order(std::string_view text) {
  if (text == "gamma_first") return EnhancementOrder::kGammaFirst;
  if (text == "homomorphic_first") return EnhancementOrder::kHomomorphicFirst;
  throw std::invalid_argument("expected gamma_first or homomorphic_first");
}

std::string order_name(EnhancementOrder o) {
  return o == EnhancementOrder::kGammaFirst ? "gamma_first" : "homomorphic_first";
}

// One entry per config key; the text and JSON forms share this table.
struct Field {
  std::string key;
  std::function<void(PipelineConfig&, std::string_view)> parse;
  std::function<std::string(const PipelineConfig&)> format;
  std::function<json(const PipelineConfig&)> to_json;
  std::function<void(PipelineConfig&, const json&)> from_json;
};

// `get` is a generic lambda returning a reference into either a mutable or a
// const config.
template <typename Get>
Field double_field(std::string key, Get get) {
  return {std::move(key), [get](PipelineConfig& c, std::string_view v) { get(c) = parse_double(v); },
          [get](const PipelineConfig& c) { return format_double(get(c)); },
          [get](const PipelineConfig& c) { return json(get(c)); },
          [get](PipelineConfig& c, const json& j) { get(c) = j.get<double>(); }};
}

template <typename Get>
Field int_field(std::string key, Get get) {
  return {std::move(key), [get](PipelineConfig& c, std::string_view v) { get(c) = parse_int(v); },
          [get](const PipelineConfig& c) { return std::to_string(get(c)); },
          [get](const PipelineConfig& c) { return json(get(c)); },
          [get](PipelineConfig& c, const json& j) { get(c) = j.get<int>(); }};
}

template <typename Get>
Field bool_field(std::string key, Get get) {
  return {std::move(key), [get](PipelineConfig& c, std::string_view v) { get(c) = parse_bool(v); },
          [get](const PipelineConfig& c) { return std::string(get(c) ? "true" : "false"); },
          [get](const PipelineConfig& c) { return json(get(c)); },
          [get](PipelineConfig& c, const json& j) { get(c) = j.get<bool>(); }};
}

template <typename Get>
Field mode_field(std::string key, Get get) {
  return {std::move(key), [get](PipelineConfig& c, std::string_view v) { get(c) = parse_mode(v); },
          [get](const PipelineConfig& c) { return mode_name(get(c)); },
          [get](const PipelineConfig& c) { return json(mode_name(get(c))); },
          [get](PipelineConfig& c, const json& j) { get(c) = parse_mode(j.get<std::string>()); }};
}

template <typename Get>
void add_weight_fields(std::vector<Field>& f, const std::string& p, Get wc) {
  f.push_back(mode_field(p + ".mode", [wc](auto& c) -> auto& { return wc(c).mode; }));
  f.push_back(int_field(p + ".d_above", [wc](auto& c) -> auto& { return wc(c).d_above; }));
  f.push_back(double_field(p + ".w_min", [wc](auto& c) -> auto& { return wc(c).w_min; }));
  f.push_back(double_field(p + ".weight_floor", [wc](auto& c) -> auto& { return wc(c).weight_floor; }));
  f.push_back(bool_field(p + ".symmetric_brightness",
                         [wc](auto& c) -> auto& { return wc(c).symmetric_brightness; }));
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(int_field("neutro.window", [](auto& c) -> auto& { return c.neutro.window; }));
    f.push_back(bool_field("neutro.row_window", [](auto& c) -> auto& { return c.neutro.row_window; }));
    f.push_back(double_field("neutro.alpha", [](auto& c) -> auto& { return c.neutro.alpha; }));
    f.push_back(bool_field("apply_alpha_mean", [](auto& c) -> auto& { return c.apply_alpha_mean; }));
    f.push_back(double_field("gamma", [](auto& c) -> auto& { return c.gamma; }));
    f.push_back(bool_field("homomorphic.enabled", [](auto& c) -> auto& { return c.homomorphic_enabled; }));
    f.push_back(double_field("homomorphic.sigma", [](auto& c) -> auto& { return c.homomorphic.sigma; }));
    f.push_back(double_field("homomorphic.gamma_h", [](auto& c) -> auto& { return c.homomorphic.gamma_h; }));
    f.push_back(double_field("homomorphic.gamma_l", [](auto& c) -> auto& { return c.homomorphic.gamma_l; }));
    f.push_back(Field{
        "enhancement_order",
        [](PipelineConfig& c, std::string_view v) { c.order = parse_order(v); },
        [](const PipelineConfig& c) { return order_name(c.order); },
        [](const PipelineConfig& c) { return json(order_name(c.order)); },
        [](PipelineConfig& c, const json& j) { c.order = parse_order(j.get<std::string>()); }});
    add_weight_fields(f, "rpe", [](auto& c) -> auto& { return c.weight_rpe; });
    add_weight_fields(f, "choroid", [](auto& c) -> auto& { return c.weight_choroid; });
    f.push_back(int_field("roi_offset_px", [](auto& c) -> auto& { return c.roi_offset_px; }));
    f.push_back(double_field("min_gradient_energy", [](auto& c) -> auto& { return c.min_gradient_energy; }));
    return f;
  }();
  return table;
}

const Field* find_field(std::string_view key) {
  for (const Field& f : fields()) {
    if (f.key == key) return &f;
  }
  return nullptr;
}

json config_to_json(const PipelineConfig& cfg) {
  json j = json::object();
  for (const Field& f : fields()) j[f.key] = f.to_json(cfg);
  return j;
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig cfg;
  for (const auto& [key, value] : j.items()) {
    const Field* f = find_field(key);
    if (f == nullptr) throw ParseError("unknown config key '" + key + "'", 0);
    try {
      f->from_json(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ParseError(key + ": " + e.what(), 0);
    }
  }
  return cfg;
}

std::string_view layer_name(Layer l) { return to_string(l); }

Layer layer_from(const json& j) {
  const auto layer = parse_layer(j.get<std::string>());
  if (!layer) throw ParseError("layer must be RPE or CHOROID", 0);
  return *layer;
}

json point_json(Point p) { return json{{"col", p.col}, {"row", p.row}}; }
Point point_from(const json& j) { return {j.at("col").get<int>(), j.at("row").get<int>()}; }

}  // namespace

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const Field* f = find_field(key);
    if (f == nullptr) throw ParseError("unknown config key '" + std::string(key) + "'", line_no);
    try {
      f->parse(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ParseError(std::string(key) + ": " + e.what() + ", got '" + std::string(value) + "'",
                       line_no);
    }
  }
  try {
    validate(cfg);
  } catch (const ParameterError& e) {
    throw ParseError(e.what(), 0);
  }
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open config " + path.string(), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const PipelineConfig& cfg) {
  std::string out;
  for (const Field& f : fields()) out += f.key + " = " + f.format(cfg) + "\n";
  return out;
}

std::string result_to_json(const SegmentationResult& r, int indent) {
  json j;
  j["format"] = kResultFormat;
  j["image"] = {{"rows", r.image_rows}, {"cols", r.image_cols},
                {"axial_resolution_um", r.axial_resolution_um}};
  j["rpe"] = r.rpe.rows;
  j["choroid"] = r.choroid.rows;
  j["flatten_map"] = {{"pivot_row", r.flatten_map.pivot_row}, {"shifts", r.flatten_map.shifts}};
  j["thickness"] = {{"per_column_px", r.thickness.per_column_px},
                    {"per_column_mm", r.thickness.per_column_mm},
                    {"mean_px", r.thickness.mean_px},
                    {"mean_mm", r.thickness.mean_mm}};
  j["config"] = config_to_json(r.config);
  j["flags"] = {{"choroid_above_rpe", r.flags.choroid_above_rpe},
                {"low_confidence", r.flags.low_confidence}};
  j["gradient_energy"] = r.gradient_energy;
  json corrections = json::array();
  for (const Correction& c : r.corrections) {
    corrections.push_back({{"layer", layer_name(c.layer)}, {"a", point_json(c.a)}, {"b", point_json(c.b)}});
  }
  j["corrections"] = std::move(corrections);
  j["timings_ms"] = r.stage_timings_ms;
  return j.dump(indent);
}

SegmentationResult result_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), 0);
  }
  try {
    if (j.at("format").get<std::string>() != kResultFormat) {
      throw ParseError("unsupported result format", 0);
    }
    SegmentationResult r;
    const json& image = j.at("image");
    r.image_rows = image.at("rows").get<std::size_t>();
    r.image_cols = image.at("cols").get<std::size_t>();
    r.axial_resolution_um = image.at("axial_resolution_um").get<double>();
    r.rpe = {j.at("rpe").get<std::vector<int>>(), Layer::kRpe};
    r.choroid = {j.at("choroid").get<std::vector<int>>(), Layer::kChoroid};
    if (r.rpe.size() != r.image_cols || r.choroid.size() != r.image_cols) {
      throw ParseError("boundary length does not match image columns", 0);
    }
    const json& fm = j.at("flatten_map");
    r.flatten_map.pivot_row = fm.at("pivot_row").get<int>();
    r.flatten_map.shifts = fm.at("shifts").get<std::vector<int>>();
    r.flatten_map.rows = r.image_rows;
    r.config = config_from_json(j.at("config"));
    r.gradient_energy = j.at("gradient_energy").get<double>();
    for (const json& c : j.at("corrections")) {
      r.corrections.push_back({layer_from(c.at("layer")), point_from(c.at("a")), point_from(c.at("b"))});
    }
    r.stage_timings_ms = j.at("timings_ms").get<std::map<std::string, double>>();
    refresh_derived(r);
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed result document: ") + e.what(), 0);
  }
}

SegmentationResult load_result(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string(), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return result_from_json(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), 0);
  }
}

void save_result(const SegmentationResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << result_to_json(result) << '\n';
  if (!out) throw Error("short write to " + path.string());
}

}  // namespace neutroseg
