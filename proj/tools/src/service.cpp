#include "neutroseg_app/service.hpp"

#include <httplib.h>

#include <fstream>
#include <limits>
#include <json.hpp>
#include <random>
#include <sstream>

#include "neutroseg/errors.hpp"
#include "neutroseg/serialization.hpp"

namespace neutroseg::app {
namespace {

using json = nlohmann::json;

constexpr const char* kJson = "application/json";

std::string new_session_id() {
  static std::mutex mutex;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mutex);
  std::ostringstream ss;
  ss << std::hex;
  for (int i = 0; i < 2; ++i) {
    ss.width(16);
    ss.fill('0');
    ss << rng();
  }
  return ss.str();
}

void send_error(httplib::Response& res, int status, const std::string& message,
                json fields = nullptr) {
  json body{{"error", message}};
  if (!fields.is_null()) body["fields"] = std::move(fields);
  res.status = status;
  res.set_content(body.dump(), kJson);
}

std::string sniff_content_type(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') return "image/x-portable-graymap";
  return "image/png";
}

struct FieldIssue {
  std::string field;
  std::string message;
};

std::optional<Point> read_point(const json& body, const std::string& name,
                                std::vector<FieldIssue>& issues) {
  if (!body.contains(name) || !body[name].is_object()) {
    issues.push_back({name, "expected an object {col, row}"});
    return std::nullopt;
  }
  const json& p = body[name];
  Point out;
  bool ok = true;
  for (const char* key : {"col", "row"}) {
    const std::string path = name + "." + key;
    if (!p.contains(key) || !p[key].is_number_integer()) {
      issues.push_back({path, "expected an integer"});
      ok = false;
      continue;
    }
    const auto v = p[key].get<std::int64_t>();
    if (v < 0 || v > std::numeric_limits<int>::max()) {
      issues.push_back({path, "out of range"});
      ok = false;
      continue;
    }
    (std::string_view(key) == "col" ? out.col : out.row) = static_cast<int>(v);
  }
  return ok ? std::optional<Point>(out) : std::nullopt;
}

json issues_json(const std::vector<FieldIssue>& issues) {
  json out = json::array();
  for (const FieldIssue& i : issues) out.push_back({{"field", i.field}, {"message", i.message}});
  return out;
}

}  // namespace

std::string SessionStore::add(std::shared_ptr<Session> session) {
  std::lock_guard lock(mutex_);
  std::string id;
  do {
    id = new_session_id();
  } while (sessions_.contains(id));
  sessions_.emplace(id, std::move(session));
  return id;
}

std::shared_ptr<Session> SessionStore::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::size_t SessionStore::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

Service::Service(ServiceOptions options)
    : options_(std::move(options)), server_(std::make_unique<httplib::Server>()) {
  validate(options_.config);
  install_routes();
}

Service::~Service() { stop(); }

int Service::bind_any_port(const std::string& host) { return server_->bind_to_any_port(host); }

bool Service::listen_after_bind() { return server_->listen_after_bind(); }

bool Service::listen(const std::string& host, int port) { return server_->listen(host, port); }

void Service::wait_until_ready() const { server_->wait_until_ready(); }

void Service::stop() {
  if (server_->is_running()) server_->stop();
}

void Service::install_routes() {
  httplib::Server& srv = *server_;
  srv.set_payload_max_length(options_.max_upload_bytes);

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    send_error(res, 500, what);
  });

  // Persists the session's current JSON when a results directory is set.
  auto write_through = [this](const std::string& id, const Session& s) {
    if (!options_.results_dir) return;
    std::filesystem::create_directories(*options_.results_dir);
    std::ofstream(*options_.results_dir / (id + ".json"), std::ios::binary) << s.result_json;
  };

  auto with_session = [this](const httplib::Request& req, httplib::Response& res) {
    auto s = store_.find(req.matches[1]);
    if (!s) send_error(res, 404, "unknown session");
    return s;
  };

  srv.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", kJson);
  });

  srv.Post("/api/scans", [this, write_through](const httplib::Request& req, httplib::Response& res) {
    auto session = std::make_shared<Session>();
    if (req.is_multipart_form_data()) {
      if (!req.has_file("scan")) {
        send_error(res, 400, "multipart upload needs a 'scan' field");
        return;
      }
      const auto file = req.get_file_value("scan");
      session->upload.assign(file.content.begin(), file.content.end());
    } else {
      session->upload.assign(req.body.begin(), req.body.end());
    }
    session->content_type = sniff_content_type(session->upload);

    std::optional<double> resolution;
    if (req.has_param("resolution_um")) {
      try {
        resolution = std::stod(req.get_param_value("resolution_um"));
      } catch (const std::exception&) {
        send_error(res, 400, "resolution_um must be a number");
        return;
      }
    }
    try {
      session->scan = decode_scan(session->upload, resolution);
      validate(session->scan);
    } catch (const Error& e) {
      send_error(res, 400, e.what());
      return;
    }
    try {
      session->result = segment(session->scan, options_.config);
    } catch (const Error& e) {
      send_error(res, 422, e.what());
      return;
    }
    session->result_json = result_to_json(session->result);
    const std::string id = store_.add(session);
    write_through(id, *session);
    res.status = 201;
    res.set_content(json{{"session_id", id}}.dump(), kJson);
  });

  srv.Get(R"(/api/scans/([0-9a-f]+))", [with_session](const httplib::Request& req, httplib::Response& res) {
    auto s = with_session(req, res);
    if (!s) return;
    std::lock_guard lock(s->mutex);
    res.set_content(std::string(s->upload.begin(), s->upload.end()), s->content_type);
  });

  srv.Get(R"(/api/scans/([0-9a-f]+)/result)",
          [with_session](const httplib::Request& req, httplib::Response& res) {
            auto s = with_session(req, res);
            if (!s) return;
            std::lock_guard lock(s->mutex);
            res.set_content(s->result_json, kJson);
          });

  srv.Post(R"(/api/scans/([0-9a-f]+)/corrections)",
           [with_session, write_through](const httplib::Request& req, httplib::Response& res) {
             auto s = with_session(req, res);
             if (!s) return;
             const json body = json::parse(req.body, nullptr, false);
             if (body.is_discarded() || !body.is_object()) {
               send_error(res, 422, "invalid correction",
                          issues_json({{"body", "expected a JSON object"}}));
               return;
             }
             std::vector<FieldIssue> issues;
             std::optional<Layer> layer;
             if (!body.contains("layer") || !body["layer"].is_string()) {
               issues.push_back({"layer", "expected \"RPE\" or \"CHOROID\""});
             } else if (!(layer = parse_layer(body["layer"].get<std::string>()))) {
               issues.push_back({"layer", "expected \"RPE\" or \"CHOROID\""});
             }
             const auto a = read_point(body, "a", issues);
             const auto b = read_point(body, "b", issues);

             std::lock_guard lock(s->mutex);
             const auto rows = static_cast<int>(s->result.image_rows);
             const auto cols = static_cast<int>(s->result.image_cols);
             for (const auto& [name, p] : {std::pair{"a", a}, std::pair{"b", b}}) {
               if (!p) continue;
               if (p->col >= cols) issues.push_back({std::string(name) + ".col", "outside the scan"});
               if (p->row >= rows) issues.push_back({std::string(name) + ".row", "outside the scan"});
             }
             if (a && b && a->col == b->col) {
               issues.push_back({"b.col", "must differ from a.col"});
             }
             if (!issues.empty()) {
               send_error(res, 422, "invalid correction", issues_json(issues));
               return;
             }

             SegmentationResult next = s->result;
             apply_correction(next, {*layer, *a, *b});
             s->undo.emplace_back(std::move(s->result), std::move(s->result_json));
             s->result = std::move(next);
             s->result_json = result_to_json(s->result);
             write_through(req.matches[1], *s);
             res.set_content(s->result_json, kJson);
           });

  srv.Post(R"(/api/scans/([0-9a-f]+)/undo)",
           [with_session, write_through](const httplib::Request& req, httplib::Response& res) {
             auto s = with_session(req, res);
             if (!s) return;
             std::lock_guard lock(s->mutex);
             if (s->undo.empty()) {
               send_error(res, 409, "nothing to undo");
               return;
             }
             s->result = std::move(s->undo.back().first);
             s->result_json = std::move(s->undo.back().second);
             s->undo.pop_back();
             write_through(req.matches[1], *s);
             res.set_content(s->result_json, kJson);
           });

  if (options_.ui_dir) srv.set_mount_point("/", options_.ui_dir->string());
}

}  // namespace neutroseg::app
