#pragma once

#include "nameguard/json_codec.hpp"
#include "nameguard/stores.hpp"
#include "nameguard/timestamp.hpp"

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace nameguard::service {

// Outbound event hook, called for warning-level sanctions.
using Notifier = std::function<void(const Json& event)>;

// POSTs each event as JSON to `url` (http://host[:port][/path]).
// Delivery failures are reported on stderr and otherwise ignored.
Notifier webhook_notifier(const std::string& url);

struct ServiceConfig {
  std::filesystem::path data_dir;  // empty: nothing is saved
  std::string admin_token;         // empty: moderation endpoints are open
  text::FormatPolicy policy;
};

class Service {
 public:
  Service(store::LexiconStores& stores, ServiceConfig config, Clock clock = system_clock(),
          Notifier notifier = {});

  // Registers every /api route on `server`.
  void mount(httplib::Server& server);

  // Writes the current state to the data directory if it is newer than the
  // last save.
  void flush();

 private:
  store::LexiconStores& stores_;
  ServiceConfig config_;
  Clock clock_;
  Notifier notifier_;
  std::mutex save_mutex_;
  std::optional<std::uint64_t> saved_revision_;
};

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string webhook_url;
  ServiceConfig service;
};

// Loads the store, serves until SIGINT/SIGTERM, then saves. Returns once the
// server has stopped. Throws on an unloadable store or a failed bind.
void serve(const ServeOptions& options, text::FoldTable table);

}  // namespace nameguard::service
