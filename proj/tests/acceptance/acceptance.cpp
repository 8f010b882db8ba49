// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "neutroseg/filters.hpp"
#include "neutroseg/graph_segment.hpp"
#include "neutroseg/neutrosophic.hpp"
#include "neutroseg/phantom.hpp"
#include "neutroseg/pipeline.hpp"
#include "neutroseg/scan_io.hpp"
#include "neutroseg/serialization.hpp"
#include "neutroseg_app/service.hpp"
#include "oracles.hpp"

using namespace neutroseg;
using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  // Records the first failure only.
  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

GrayImage gray(Matrix m) {
  GrayImage g;
  g.pixels = std::move(m);
  return g;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

Outcome neutrosophic_invariants() {
  Outcome o;
  const auto start = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<std::size_t> side(8, 64);
  std::uniform_real_distribution<double> scale(0.1, 2.5);
  std::uniform_real_distribution<double> offset(0.0, 40.0);
  double worst_sum = 0.0, worst_affine = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix m = oracle::random_matrix(side(rng), side(rng), 0.0, 100.0, rng);
    const NeutrosophicImage ns = to_neutrosophic(gray(m));
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double t = ns.truth.data()[i], ind = ns.indeterminacy.data()[i], f = ns.falsity.data()[i];
      worst_sum = std::max(worst_sum, std::abs(t + f - 1.0));
      o.require(t >= 0 && t <= 1 && ind >= 0 && ind <= 1 && f >= 0 && f <= 1, "membership outside [0, 1]");
    }
    const double a = scale(rng), b = offset(rng);
    Matrix moved = m;
    for (double& v : moved.data()) v = a * v + b;
    const NeutrosophicImage ms = to_neutrosophic(gray(moved));
    worst_affine = std::max({worst_affine, max_abs_diff(ms.truth, ns.truth),
                             max_abs_diff(ms.indeterminacy, ns.indeterminacy),
                             max_abs_diff(ms.falsity, ns.falsity)});
  }
  o.require(worst_sum <= 1e-12, fmt("|T+F-1| reached %.3g", worst_sum));
  o.require(worst_affine <= 1e-9, fmt("affine drift %.3g", worst_affine));
  for (double level : {0.0, 17.0, 255.0}) {
    const NeutrosophicImage c = to_neutrosophic(gray(Matrix(9, 13, level)));
    o.require(c.truth == Matrix(9, 13, 0.5) && c.falsity == Matrix(9, 13, 0.5) &&
                  c.indeterminacy == Matrix(9, 13, 0.0),
              "constant image does not give T=F=0.5, I=0");
  }
  const double secs = seconds_since(start);
  o.require(secs < 10.0, fmt("took %.2f s", secs));
  if (o.pass) {
    o.detail = fmt("100 images, max |T+F-1| %.2g, max affine drift %.2g, %.2f s", worst_sum, worst_affine, secs);
  }
  return o;
}

Outcome entropy() {
  Outcome o;
  o.require(set_entropy(Matrix(6, 6, 0.42)) == 0.0, "single bin is not 0");
  double worst = 0.0;
  for (std::size_t n : {2u, 3u, 10u, 64u, 256u}) {
    Matrix m(1, 4 * n);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = (static_cast<double>(i % n) + 0.5) / static_cast<double>(n);
    worst = std::max(worst, std::abs(set_entropy(m, n) - std::log(static_cast<double>(n))));
  }
  o.require(worst <= 1e-9, fmt("uniform n-bin off by %.3g", worst));
  if (o.pass) o.detail = fmt("single bin 0, uniform bins within %.2g of ln n", worst);
  return o;
}

Outcome alpha_mean_checks() {
  Outcome o;
  std::mt19937_64 rng(7);
  NeutroConfig cfg;
  cfg.alpha = 0.9;
  for (int trial = 0; trial < 20; ++trial) {
    NeutrosophicImage ns = to_neutrosophic(gray(oracle::random_matrix(12, 15, 0.0, 255.0, rng)));
    for (double& v : ns.indeterminacy.data()) v = std::min(v, 0.89);
    const NeutrosophicImage out = alpha_mean(ns, cfg);
    o.require(out.truth == ns.truth && out.falsity == ns.falsity, "alpha above max(I) changed T or F");
  }

  // 5x5 black image with a white top-left pixel.
  Matrix spot(5, 5, 0.0);
  spot(0, 0) = 255.0;
  NeutroConfig half;
  half.alpha = 0.5;
  const NeutrosophicImage ns = to_neutrosophic(gray(spot));
  const NeutrosophicImage out = alpha_mean(ns, half);
  constexpr int taps[5] = {3, 2, 1, 0, 0};
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const double t = taps[i] * taps[j] / 9.0;
      const double expected = (i == 0 && j == 0) ? 0.64 : t;
      worst = std::max({worst, std::abs(out.truth(i, j) - expected), std::abs(out.falsity(i, j) - (1.0 - expected))});
    }
  }
  const Matrix tbar = oracle::local_mean(ns.truth, 5, 5);
  const Matrix tbarbar = oracle::local_mean(tbar, 5, 5);
  Matrix delta(5, 5);
  for (std::size_t k = 0; k < delta.size(); ++k) delta.data()[k] = std::abs(tbar.data()[k] - tbarbar.data()[k]);
  const double lo = delta.min(), hi = delta.max();
  for (std::size_t k = 0; k < delta.size(); ++k) {
    worst = std::max(worst, std::abs(out.indeterminacy.data()[k] - (delta.data()[k] - lo) / (hi - lo)));
  }
  o.require(worst <= 1e-9, fmt("5x5 hand oracle off by %.3g", worst));
  if (o.pass) o.detail = fmt("identity on 20 images, 5x5 hand oracle within %.2g", worst);
  return o;
}

Outcome shortest_path_oracle() {
  Outcome o;
  const auto start = Clock::now();
  std::mt19937_64 rng(500);
  std::uniform_int_distribution<std::size_t> side(2, 7);
  std::uniform_int_distribution<int> pixel(0, 255);
  int n = 0;
  for (; n < 600 && o.pass; ++n) {
    const std::size_t rows = side(rng), cols = side(rng);
    WeightConfig cfg;
    cfg.mode = n % 2 ? WeightMode::kDarkToLight : WeightMode::kRpe;
    // Power-of-two floors keep every path sum exact.
    cfg.w_min = std::ldexp(1.0, -17);
    cfg.weight_floor = std::ldexp(1.0, -17);
    const Matrix score = oracle::random_int_matrix(rows, cols, -510, 510, rng);
    Matrix image(rows, cols);
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = pixel(rng);
      for (std::size_t r = 0; r < rows; ++r) image(r, c) = v;
    }
    const double got = shortest_path(score, image, cfg).cost;
    const double want = oracle::brute_force_min_cost(score, image, cfg);
    o.require(got == want, fmt("%gx%g: dijkstra %.17g vs brute force %.17g", double(rows), double(cols), got, want));
  }
  const double secs = seconds_since(start);
  o.require(secs < 60.0, fmt("took %.2f s", secs));
  if (o.pass) o.detail = fmt("%g instances up to 7x7 exact, %.2f s", n, secs);
  return o;
}

Outcome edge_weight_examples() {
  Outcome o;
  const WeightConfig cfg;
  const Matrix zero(5, 5, 0.0);
  o.require(edge_weight(zero, zero, {2, 2}, {2, 3}, cfg) == 1020.0, "zero scores do not give 1020");
  const Matrix strong(5, 5, 510.0);
  o.require(edge_weight(strong, zero, {2, 2}, {3, 3}, cfg) == cfg.weight_floor, "1020 - 1020 not clamped");
  const Matrix bright(12, 3, 255.0);
  const Matrix score(12, 3, 510.0);
  o.require(edge_weight(score, bright, {10, 1}, {10, 2}, cfg) == cfg.weight_floor, "-255 not clamped");
  if (o.pass) o.detail = "1020, floor, floor";
  return o;
}

Outcome filter_fixed_points() {
  Outcome o;
  std::mt19937_64 rng(10000);
  std::uniform_real_distribution<double> gamma(0.01, 0.99);
  o.require(gamma_correct(Matrix(1, 2, {0.0, 255.0}), 0.2) == Matrix(1, 2, {0.0, 255.0}), "0/255 not fixed");
  const Matrix samples = oracle::random_matrix(100, 100, 0.0, 255.0, rng);
  for (int k = 0; k < 5 && o.pass; ++k) {
    const double g = gamma(rng);
    const Matrix out = gamma_correct(samples, g);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (out.data()[i] < samples.data()[i]) {
        o.require(false, fmt("gamma %.3f lowered %.6f", g, samples.data()[i]));
        break;
      }
    }
  }
  HomomorphicParams p;
  p.gamma_l = 0.3;
  p.gamma_h = 1.7;
  o.require(homomorphic_gain(248, 384, 496, 768, p) == p.gamma_l, "H(center) != gamma_L");
  const double d = std::sqrt(2.0 * p.sigma * p.sigma * std::log(2.0));
  const double half = p.gamma_l + 0.5 * (p.gamma_h - p.gamma_l);
  const double err = std::max(std::abs(homomorphic_gain(248 + d, 384, 496, 768, p) - half),
                              std::abs(homomorphic_gain(248, 384 - d, 496, 768, p) - half));
  o.require(err <= 1e-9, fmt("half-gain off by %.3g", err));
  if (o.pass) o.detail = fmt("10000 samples x 5 gammas, H(center) exact, half gain within %.2g", err);
  return o;
}

Outcome flatten_round_trip() {
  Outcome o;
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 100 && o.pass; ++trial) {
    const std::size_t rows = 12 + trial % 40, cols = 3 + trial % 29;
    std::uniform_int_distribution<int> row(0, static_cast<int>(rows) - 1);
    Boundary rpe{std::vector<int>(cols), Layer::kRpe};
    for (int& r : rpe.rows) r = row(rng);
    const Flattened f = flatten(gray(oracle::random_matrix(rows, cols, 0.0, 255.0, rng)), rpe);
    Boundary flat{std::vector<int>(cols), Layer::kRpe};
    for (std::size_t c = 0; c < cols; ++c) flat.rows[c] = rpe.rows[c] + f.map.shifts[c];
    o.require(std::all_of(flat.rows.begin(), flat.rows.end(), [&](int r) { return r == flat.rows[0]; }),
              "flattened RPE is not constant");
    o.require(unflatten_boundary(flat, f.map) == rpe, "unflatten(flatten(b)) != b");
  }
  if (o.pass) o.detail = "100 instances, constant flattened RPE";
  return o;
}

double mean_error(const Boundary& got, const Boundary& truth) {
  double sum = 0.0;
  for (std::size_t c = 0; c < got.size(); ++c) sum += std::abs(got.rows[c] - truth.rows[c]);
  return sum / static_cast<double>(got.size());
}

Outcome phantom_end_to_end() {
  Outcome o;
  PipelineConfig linear;
  linear.gamma = 1.0;
  double rpe_sum = 0, chor_sum = 0, chor_linear_sum = 0, rpe_worst = 0, chor_worst = 0;
  const int n = 20;
  for (int i = 0; i < n; ++i) {
    const Phantom p = make_phantom(random_phantom_spec(1000 + static_cast<std::uint64_t>(i), true));
    const SegmentationResult r = segment(p.image);
    const SegmentationResult l = segment(p.image, linear);
    const double e_rpe = mean_error(r.rpe, p.rpe), e_chor = mean_error(r.choroid, p.choroid);
    rpe_sum += e_rpe;
    chor_sum += e_chor;
    chor_linear_sum += mean_error(l.choroid, p.choroid);
    rpe_worst = std::max(rpe_worst, e_rpe);
    chor_worst = std::max(chor_worst, e_chor);
  }
  const double rpe = rpe_sum / n, chor = chor_sum / n, chor_linear = chor_linear_sum / n;
  o.require(rpe <= 2.0, fmt("RPE error %.3f px > 2", rpe));
  o.require(chor <= 3.0, fmt("choroid error %.3f px > 3", chor));
  o.require(chor < chor_linear, fmt("choroid error gamma 0.2 %.3f px not below gamma 1 %.3f px", chor, chor_linear));
  const std::string summary = fmt("RPE %.3f px (worst %.3f), choroid %.3f px (worst %.3f)", rpe, rpe_worst, chor,
                                  chor_worst) +
                              fmt(", choroid with gamma 1: %.3f px", chor_linear);
  o.detail = o.pass ? summary : o.detail + "; " + summary;
  return o;
}

Outcome performance() {
  Outcome o;
  const Phantom p = make_phantom(random_phantom_spec(77, true));
  const auto start = Clock::now();
  const SegmentationResult r = segment(p.image);
  const double secs = seconds_since(start);
  o.require(secs < 10.0, fmt("496x768 took %.2f s", secs));
  const json j = json::parse(result_to_json(r));
  o.require(j.contains("timings_ms") && j["timings_ms"].contains("total"), "no timings in the result JSON");
  if (o.pass) o.detail = fmt("496x768 in %.3f s, timings_ms.total %.1f", secs, j["timings_ms"]["total"].get<double>());
  return o;
}

Outcome conversion_constant() {
  Outcome o;
  constexpr double kMmPerPx = 0.00387167;
  std::size_t checked = 0;
  for (std::uint64_t seed : {3u, 4u}) {
    const Phantom p = make_phantom(random_phantom_spec(seed, seed % 2 == 0));
    const json j = json::parse(result_to_json(segment(p.image)));
    const auto& px = j["thickness"]["per_column_px"];
    const auto& mm = j["thickness"]["per_column_mm"];
    for (std::size_t c = 0; c < px.size(); ++c, ++checked) {
      o.require(std::abs(mm[c].get<double>() - px[c].get<double>() * kMmPerPx) <= 1e-12,
                fmt("column %g: %.17g mm", double(c), mm[c].get<double>()));
    }
    o.require(std::abs(j["thickness"]["mean_mm"].get<double>() - j["thickness"]["mean_px"].get<double>() * kMmPerPx) <=
                  1e-12,
              "mean thickness mm mismatch");
    ++checked;
    LabelSet labels{Layer::kChoroid, {}};
    for (int c = 0; c < 768; c += 32) labels.points.push_back({c, p.choroid.rows[static_cast<std::size_t>(c)]});
    const Boundary chor{j["choroid"].get<std::vector<int>>(), Layer::kChoroid};
    const ErrorReport rep = evaluate(chor, labels);
    o.require(std::abs(rep.mean_unsigned_mm - rep.mean_unsigned_px * kMmPerPx) <= 1e-12, "evaluation mm mismatch");
    ++checked;
  }
  if (o.pass) o.detail = fmt("%g emitted mm values match px x 0.00387167", double(checked));
  return o;
}

Outcome manual_correction() {
  Outcome o;
  Boundary flat{std::vector<int>(40, 90), Layer::kChoroid};
  const Boundary mid = apply_manual_correction(flat, {10, 100}, {20, 110}, 200);
  o.require(mid.rows[15] == 105, "midpoint example is not row 105");
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 200 && o.pass; ++trial) {
    const int cols = 10 + trial % 50, rows = 30 + trial % 70;
    std::uniform_int_distribution<int> row(0, rows - 1), col(0, cols - 1);
    Boundary b{std::vector<int>(static_cast<std::size_t>(cols)), Layer::kRpe};
    for (int& r : b.rows) r = row(rng);
    Point a{col(rng), row(rng)}, c{col(rng), row(rng)};
    if (a.col == c.col) continue;
    const Boundary once = apply_manual_correction(b, a, c, static_cast<std::size_t>(rows));
    const int lo = std::min(a.col, c.col), hi = std::max(a.col, c.col);
    for (int k = 0; k < cols; ++k) {
      if (k < lo || k > hi) o.require(once.rows[k] == b.rows[k], "changed outside [a.col, b.col]");
    }
    o.require(once.rows[a.col] == a.row && once.rows[c.col] == c.row, "does not pass through a and b");
    o.require(apply_manual_correction(once, a, c, static_cast<std::size_t>(rows)) == once, "not idempotent");
  }
  if (o.pass) o.detail = "midpoint row 105, 200 random corrections local, pinned and idempotent";
  return o;
}

Outcome service_round_trip() {
  Outcome o;
  app::Service service;
  const int port = service.bind_any_port("127.0.0.1");
  if (port <= 0) {
    o.require(false, "cannot bind a loopback port");
    return o;
  }
  std::thread thread([&] { service.listen_after_bind(); });
  service.wait_until_ready();
  httplib::Client cli("127.0.0.1", port);

  PhantomSpec s;
  s.rows = 200;
  s.cols = 160;
  s.ilm_row = 40;
  s.rpe_row = 90;
  s.choroid_thickness = 45;
  s.noise_sigma = 4;
  const auto png = encode_png(make_phantom(s).image);
  auto up = cli.Post("/api/scans", std::string(png.begin(), png.end()), "image/png");
  o.require(up && up->status == 201, "upload failed");
  if (o.pass) {
    const std::string base = "/api/scans/" + json::parse(up->body)["session_id"].get<std::string>();
    const std::string before = cli.Get(base + "/result")->body;
    const json corr{{"layer", "CHOROID"}, {"a", {{"col", 20}, {"row", 150}}}, {"b", {{"col", 60}, {"row", 140}}}};
    auto fixed = cli.Post(base + "/corrections", corr.dump(), "application/json");
    o.require(fixed && fixed->status == 200 && fixed->body != before, "correction not applied");
    auto undo = cli.Post(base + "/undo");
    o.require(undo && undo->status == 200 && undo->body == before, "undo is not byte-identical");
    o.require(cli.Get(base + "/result")->body == before, "stored result differs after undo");
    json bad = corr;
    bad["b"]["col"] = 20;
    auto rej = cli.Post(base + "/corrections", bad.dump(), "application/json");
    o.require(rej && rej->status == 422, "equal columns not rejected with 422");
    auto junk = cli.Post(base + "/corrections", "{\"layer\":", "application/json");
    o.require(junk && junk->status == 422, "malformed JSON not rejected with 422");
  }
  service.stop();
  thread.join();
  if (o.pass) o.detail = "upload, correct, undo byte-identical; malformed correction 422";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"neutrosophic invariants", neutrosophic_invariants},
      {"entropy", entropy},
      {"alpha-mean", alpha_mean_checks},
      {"shortest-path oracle", shortest_path_oracle},
      {"edge-weight arithmetic", edge_weight_examples},
      {"filter fixed points", filter_fixed_points},
      {"flatten round-trip", flatten_round_trip},
      {"phantom end-to-end", phantom_end_to_end},
      {"performance", performance},
      {"conversion constant", conversion_constant},
      {"manual correction", manual_correction},
      {"service contract", service_round_trip},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
