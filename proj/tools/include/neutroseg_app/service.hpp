#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "neutroseg/pipeline.hpp"

namespace httplib {
class Server;
}

namespace neutroseg::app {

struct ServiceOptions {
  PipelineConfig config;
  std::size_t max_upload_bytes = 32u << 20;
  /// Static files served at `/` (the correction UI bundle).
  std::optional<std::filesystem::path> ui_dir;
  /// When set, every result change is also written to `<dir>/<session>.json`.
  std::optional<std::filesystem::path> results_dir;
};

/// One uploaded scan with its current result and undo history.
struct Session {
  std::mutex mutex;
  std::vector<std::uint8_t> upload;
  std::string content_type;
  GrayImage scan;
  SegmentationResult result;
  std::string result_json;
  std::vector<std::pair<SegmentationResult, std::string>> undo;
};

/// In-memory only; sessions are lost on restart.
class SessionStore {
 public:
  std::string add(std::shared_ptr<Session> session);
  std::shared_ptr<Session> find(const std::string& id) const;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
};

/// HTTP front end over the pipeline:
///   POST /api/scans                   raw PNG/PGM body or multipart field "scan"
///   GET  /api/scans/{id}              the uploaded raster
///   GET  /api/scans/{id}/result       result JSON
///   POST /api/scans/{id}/corrections  {layer, a:{col,row}, b:{col,row}}
///   POST /api/scans/{id}/undo
///   GET  /healthz
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds to an ephemeral port and returns it (or -1).
  int bind_any_port(const std::string& host);
  /// Blocks until stop().
  bool listen_after_bind();
  /// Binds and blocks until stop().
  bool listen(const std::string& host, int port);
  void wait_until_ready() const;
  void stop();

  SessionStore& sessions() noexcept { return store_; }

 private:
  void install_routes();

  ServiceOptions options_;
  SessionStore store_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace neutroseg::app
