#include "nameguard/service.hpp"

#include "nameguard/errors.hpp"
#include "nameguard/metrics.hpp"
#include "nameguard/persistence.hpp"
#include "nameguard/pipeline.hpp"

#include <httplib.h>
#include <pthread.h>
#include <signal.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <iostream>
#include <regex>
#include <thread>

namespace nameguard::service {

namespace {

using httplib::Request;
using httplib::Response;

int http_status(const Error& e) {
  if (e.code() == "missing_field" || e.code() == "invalid_field" || e.code() == "invalid_body") {
    return 400;
  }
  switch (e.kind()) {
    case ErrorKind::NotFound: return 404;
    case ErrorKind::Conflict:
    case ErrorKind::InvalidState: return 409;
    case ErrorKind::InvalidArgument:
    case ErrorKind::Domain: return 422;
    case ErrorKind::Parse: return 400;
    case ErrorKind::Io: return 500;
  }
  return 500;
}

void send_error(Response& res, int status, const std::string& code, const std::string& message) {
  res.status = status;
  res.set_content(Json{{"status", status}, {"code", code}, {"message", message}}.dump(),
                  "application/json");
}

Json parse_body(const Request& req) {
  try {
    Json body = Json::parse(req.body);
    if (!body.is_object()) {
      throw Error(ErrorKind::InvalidArgument, "invalid_body", "request body must be a JSON object");
    }
    return body;
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::Parse, "invalid_json", e.what());
  }
}

std::optional<std::string> optional_string(const Json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    throw Error(ErrorKind::InvalidArgument, "invalid_field", std::string("field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::string required_string(const Json& body, const char* key) {
  auto v = optional_string(body, key);
  if (!v) throw Error(ErrorKind::InvalidArgument, "missing_field", std::string("missing field '") + key + "'");
  return *v;
}

std::optional<int> optional_int(const Json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) {
    throw Error(ErrorKind::InvalidArgument, "invalid_field", std::string("field '") + key + "' must be an integer");
  }
  return it->get<int>();
}

std::string required_query(const Request& req, const char* key) {
  if (!req.has_param(key)) {
    throw Error(ErrorKind::Parse, "missing_query", std::string("missing query parameter '") + key + "'");
  }
  return req.get_param_value(key);
}

Json flag_with_account(const Flag& f, const store::StoreState& snap) {
  Json j = f;
  if (const Account* a = snap.account(f.account_id)) j["account"] = account_summary(*a, snap);
  return j;
}

std::vector<Flag> open_flags(const store::StoreState& snap) {
  std::vector<Flag> out;
  for (const Flag& f : snap.flags()) {
    if (!f.resolved) out.push_back(f);
  }
  std::sort(out.begin(), out.end(), [](const Flag& a, const Flag& b) {
    return std::tie(a.detected_at, a.account_id, a.store_revision) <
           std::tie(b.detected_at, b.account_id, b.store_revision);
  });
  return out;
}

}  // namespace

Notifier webhook_notifier(const std::string& url) {
  static const std::regex kUrl(R"(^(http://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) {
    throw Error(ErrorKind::InvalidArgument, "invalid_webhook", "webhook must be an http:// URL: " + url);
  }
  std::string origin = m[1];
  std::string path = m[2].matched ? std::string(m[2]) : "/";
  return [origin, path](const Json& event) {
    httplib::Client client(origin);
    client.set_connection_timeout(2);
    client.set_read_timeout(2);
    auto res = client.Post(path, event.dump(), "application/json");
    if (!res) {
      std::cerr << "webhook " << origin << path << ": " << httplib::to_string(res.error()) << '\n';
    } else if (res->status >= 300) {
      std::cerr << "webhook " << origin << path << ": HTTP " << res->status << '\n';
    }
  };
}

Service::Service(store::LexiconStores& stores, ServiceConfig config, Clock clock, Notifier notifier)
    : stores_(stores), config_(std::move(config)), clock_(std::move(clock)), notifier_(std::move(notifier)) {}

void Service::flush() {
  if (config_.data_dir.empty()) return;
  std::lock_guard lock(save_mutex_);
  auto snap = stores_.snapshot();
  if (saved_revision_ && *saved_revision_ >= snap->revision()) return;
  store::save(*snap, config_.data_dir);
  saved_revision_ = snap->revision();
}

void Service::mount(httplib::Server& server) {
  using Body = std::function<Json(const Request&, Response&)>;

  // Wraps a handler with token checks, error mapping and JSON output.
  // Moderation handlers save the store after they run.
  auto wrap = [this](bool moderation, Body body) {
    return [this, moderation, body = std::move(body)](const Request& req, Response& res) {
      try {
        if (moderation && !config_.admin_token.empty() &&
            req.get_header_value("X-Admin-Token") != config_.admin_token) {
          send_error(res, 401, "unauthorized", "missing or wrong X-Admin-Token");
          return;
        }
        Json out = body(req, res);
        if (req.method != "GET") flush();
        res.set_content(out.dump(), "application/json");
      } catch (const Error& e) {
        send_error(res, http_status(e), e.code(), e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "internal_error", e.what());
      }
    };
  };
  auto revision_only = [this] { return Json{{"revision", stores_.revision()}}; };

  server.Post("/api/verify", wrap(false, [this](const Request& req, Response&) {
    return Json(pipeline::verify(pipeline::request_from_json(parse_body(req)), *stores_.snapshot(),
                                 config_.policy));
  }));

  server.Post("/api/register", wrap(false, [this](const Request& req, Response& res) {
    auto outcome = pipeline::register_account(pipeline::request_from_json(parse_body(req)), stores_,
                                              clock_, config_.policy);
    if (auto* reg = std::get_if<pipeline::Registered>(&outcome)) {
      res.status = 201;
      return Json{{"registered", true},
                  {"account", account_summary(reg->account, *stores_.snapshot())},
                  {"revision", reg->revision}};
    }
    return Json{{"registered", false},
                {"verdict", std::get<Verdict>(outcome)},
                {"revision", stores_.revision()}};
  }));

  server.Get("/api/accounts", wrap(false, [this](const Request& req, Response&) {
    std::optional<AccountStatus> wanted;
    if (req.has_param("status")) {
      wanted = parse_account_status(req.get_param_value("status"));
      if (!wanted) throw Error(ErrorKind::Parse, "invalid_query", "unknown status '" + req.get_param_value("status") + "'");
    }
    auto snap = stores_.snapshot();
    Json accounts = Json::array();
    for (const auto& [id, a] : snap->accounts()) {
      if (!wanted || a.status == *wanted) accounts.push_back(account_summary(a, *snap));
    }
    return Json{{"revision", snap->revision()}, {"accounts", accounts}};
  }));

  server.Post(R"(/api/accounts/([^/]+)/status)", wrap(true, [this](const Request& req, Response&) {
    Json body = parse_body(req);
    std::string token = required_string(body, "status");
    auto status = parse_account_status(token);
    if (!status) throw Error(ErrorKind::InvalidArgument, "invalid_field", "unknown status '" + token + "'");
    Account a = pipeline::set_account_status(req.matches[1].str(), *status, stores_);
    auto snap = stores_.snapshot();
    return Json{{"account", account_summary(a, *snap)}, {"revision", snap->revision()}};
  }));

  server.Post(R"(/api/accounts/([^/]+)/rename)", wrap(true, [this](const Request& req, Response&) {
    Json body = parse_body(req);
    auto outcome = pipeline::rename_account(req.matches[1].str(), required_string(body, "username"),
                                            stores_, config_.policy);
    auto snap = stores_.snapshot();
    if (auto* a = std::get_if<Account>(&outcome)) {
      return Json{{"renamed", true}, {"account", account_summary(*a, *snap)}, {"revision", snap->revision()}};
    }
    return Json{{"renamed", false}, {"verdict", std::get<Verdict>(outcome)}, {"revision", snap->revision()}};
  }));

  server.Get("/api/flags", wrap(false, [this](const Request&, Response&) {
    auto snap = stores_.snapshot();
    Json flags = Json::array();
    for (const Flag& f : open_flags(*snap)) flags.push_back(flag_with_account(f, *snap));
    return Json{{"revision", snap->revision()}, {"flags", flags}};
  }));

  server.Get("/api/report", wrap(false, [this](const Request&, Response&) {
    auto snap = stores_.snapshot();
    Json report = pipeline::generate_report(open_flags(*snap), clock_());
    report["revision"] = snap->revision();
    return report;
  }));

  server.Post("/api/scan", wrap(true, [this](const Request&, Response&) {
    std::vector<Flag> found = pipeline::post_registration_scan(stores_, clock_, config_.policy);
    auto snap = stores_.snapshot();
    Json flags = Json::array();
    for (const Flag& f : found) flags.push_back(flag_with_account(f, *snap));
    return Json{{"revision", snap->revision()},
                {"flags", flags},
                {"report", pipeline::generate_report(found, clock_())}};
  }));

  server.Post("/api/sanctions", wrap(true, [this](const Request& req, Response&) {
    Json body = parse_body(req);
    pipeline::SanctionRequest request;
    request.account_id = required_string(body, "account_id");
    auto code = optional_int(body, "sanction_code");
    if (!code) throw Error(ErrorKind::InvalidArgument, "missing_field", "missing field 'sanction_code'");
    request.sanction_code = *code;
    request.note = optional_string(body, "note").value_or("");

    auto snap = stores_.snapshot();
    if (auto rule = optional_string(body, "rule_code")) {
      auto parsed = parse_reason_code(*rule);
      if (!parsed) throw Error(ErrorKind::InvalidArgument, "invalid_field", "unknown rule code '" + *rule + "'");
      request.rule_code = *parsed;
    } else {
      // Default to the reason behind the account's latest open flag.
      for (const Flag& f : open_flags(*snap)) {
        if (f.account_id == request.account_id && !f.reasons.empty()) request.rule_code = f.reasons.front().code;
      }
    }

    Deviation d = pipeline::apply_sanction(request, stores_, clock_);
    snap = stores_.snapshot();
    const Account* account = snap->account(d.account_id);
    Json out{{"deviation", d}, {"revision", snap->revision()}};
    if (account) out["account"] = account_summary(*account, *snap);

    if (d.sanction_code == 1 && notifier_) {
      Json event{{"event", "warning"}, {"deviation", d}};
      if (account) event["account"] = out["account"];
      try {
        notifier_(event);
      } catch (const std::exception& e) {
        std::cerr << "notifier: " << e.what() << '\n';
      }
    }
    return out;
  }));

  server.Get("/api/prohibited", wrap(false, [this](const Request&, Response&) {
    auto snap = stores_.snapshot();
    Json terms = Json::array();
    for (const auto& [key, t] : snap->prohibited()) terms.push_back(t);
    return Json{{"revision", snap->revision()}, {"terms", terms}};
  }));

  server.Post("/api/prohibited", wrap(true, [this](const Request& req, Response& res) {
    Json body = parse_body(req);
    ProhibitedTerm term{required_string(body, "term"), optional_string(body, "category").value_or(""),
                        TermSeverity::Reject};
    if (auto sev = optional_string(body, "severity")) {
      auto parsed = parse_term_severity(*sev);
      if (!parsed) throw Error(ErrorKind::InvalidArgument, "invalid_field", "unknown severity '" + *sev + "'");
      term.severity = *parsed;
    }
    ProhibitedTerm stored = stores_.write([&](store::StoreWriter& w) { return w.add_prohibited(term); });
    res.status = 201;
    return Json{{"term", stored}, {"revision", stores_.revision()}};
  }));

  server.Delete("/api/prohibited", wrap(true, [this, revision_only](const Request& req, Response&) {
    stores_.remove_prohibited(required_query(req, "term"));
    return revision_only();
  }));

  server.Get("/api/blacklist", wrap(false, [this](const Request&, Response&) {
    auto snap = stores_.snapshot();
    Json entries = Json::array();
    for (const auto& [key, b] : snap->blacklist()) entries.push_back(b);
    return Json{{"revision", snap->revision()}, {"entries", entries}};
  }));

  server.Post("/api/blacklist", wrap(true, [this](const Request& req, Response& res) {
    Json body = parse_body(req);
    BlacklistEntry entry{required_string(body, "name"), optional_int(body, "sanction_code").value_or(kHighestSanction),
                         optional_string(body, "reason").value_or(""), clock_()};
    BlacklistEntry stored = stores_.write([&](store::StoreWriter& w) { return w.add_blacklist(entry); });
    res.status = 201;
    return Json{{"entry", stored}, {"revision", stores_.revision()}};
  }));

  server.Delete("/api/blacklist", wrap(true, [this, revision_only](const Request& req, Response&) {
    stores_.remove_blacklist(required_query(req, "name"));
    return revision_only();
  }));

  server.Get("/api/metrics/classification", wrap(false, [this](const Request&, Response&) {
    auto snap = stores_.snapshot();
    Json out = metrics::to_json(metrics::classify_accounts(*snap));
    out["revision"] = snap->revision();
    return out;
  }));

  server.Get("/api/metrics/efficiency", wrap(false, [this](const Request& req, Response&) {
    auto snap = stores_.snapshot();
    metrics::EfficiencyInput input = metrics::efficiency_input(*snap);
    std::string low = req.has_param("low_adequacy") ? req.get_param_value("low_adequacy") : "auto";
    if (low != "auto") {
      std::uint64_t n = 0;
      auto [ptr, ec] = std::from_chars(low.data(), low.data() + low.size(), n);
      if (ec != std::errc() || ptr != low.data() + low.size() || low.empty()) {
        throw Error(ErrorKind::Parse, "invalid_query", "low_adequacy must be 'auto' or a count");
      }
      input.n_low_adequacy = n;
    }
    return Json{{"n_verified", input.n_verified},
                {"n_low_adequacy", input.n_low_adequacy},
                {"efficiency", metrics::efficiency(input)},
                {"revision", snap->revision()}};
  }));
}

void serve(const ServeOptions& options, text::FoldTable table) {
  const auto& dir = options.service.data_dir;
  store::LexiconStores stores(dir.empty() ? store::StoreState(std::move(table)) : store::load(dir, std::move(table)));
  Notifier notifier;
  if (!options.webhook_url.empty()) notifier = webhook_notifier(options.webhook_url);
  Service service(stores, options.service, system_clock(), notifier);

  httplib::Server server;
  service.mount(server);

  // Signals are taken synchronously by one thread; the server threads inherit
  // the blocked mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &signals, &previous);

  std::atomic<bool> stopping = false;
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    if (!stopping.exchange(true)) server.stop();
  });

  int port = options.port;
  bool bound = port == 0 ? (port = server.bind_to_any_port(options.host)) > 0
                         : server.bind_to_port(options.host, port);
  if (bound) {
    std::cerr << "listening on " << options.host << ":" << port << std::endl;
    server.listen_after_bind();
  }
  if (!stopping.exchange(true)) pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);

  if (!bound) {
    throw Error(ErrorKind::Io, "bind_failed",
                "cannot listen on " + options.host + ":" + std::to_string(options.port));
  }
  service.flush();
  std::cerr << "stopped at revision " << stores.revision() << std::endl;
}

}  // namespace nameguard::service
