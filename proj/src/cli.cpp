#include "nameguard/cli.hpp"

#include "nameguard/errors.hpp"
#include "nameguard/json_codec.hpp"
#include "nameguard/metrics.hpp"
#include "nameguard/persistence.hpp"
#include "nameguard/pipeline.hpp"
#include "nameguard/service.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>

namespace nameguard::cli {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string data = "nameguard-data";
  std::string tables;
  std::string leet;
  std::string confusables;
};

// Explicit files win; otherwise tables kept next to the data, otherwise the
// shipped ones.
text::FoldTable fold_tables(const Globals& g) {
  fs::path dir = g.tables;
  if (dir.empty()) dir = fs::exists(fs::path(g.data) / "leet.tsv") ? fs::path(g.data) : text::shipped_table_dir();
  fs::path leet = g.leet.empty() ? dir / "leet.tsv" : fs::path(g.leet);
  fs::path confusables = g.confusables.empty() ? dir / "confusables.tsv" : fs::path(g.confusables);
  return text::FoldTable::load(leet).merged_with(text::FoldTable::load(confusables));
}

store::StoreState load_state(const Globals& g) { return store::load(g.data, fold_tables(g)); }

int exit_code(Decision d) {
  switch (d) {
    case Decision::Accept: return 0;
    case Decision::RequireCorrection: return 1;
    case Decision::Reject: return 2;
  }
  return 2;
}

std::string code_list(const Verdict& v, char sep) {
  std::vector<ReasonCode> seen;
  std::string out;
  for (const Reason& r : v.reasons()) {
    if (std::find(seen.begin(), seen.end(), r.code) != seen.end()) continue;
    seen.push_back(r.code);
    if (!out.empty()) out.push_back(sep);
    out += to_token(r.code);
  }
  return out;
}

void print_verdict(const Verdict& v, std::ostream& out) {
  out << to_token(v.decision());
  if (!v.reasons().empty()) out << ' ' << code_list(v, ' ');
  out << '\n';
  for (const Reason& r : v.reasons()) {
    if (!r.detail.empty()) out << "  " << to_token(r.code) << ": " << r.detail << '\n';
  }
}

void print_report(const pipeline::ModerationReport& report, const store::StoreState& snap,
                  std::ostream& out) {
  std::size_t total = 0;
  for (const auto& [code, flags] : report.groups) total += flags.size();
  out << "flags: " << total << '\n';
  for (const auto& [code, flags] : report.groups) {
    out << to_token(code) << " (" << flags.size() << ")\n";
    for (const Flag& f : flags) {
      out << "  " << f.account_id;
      if (const Account* a = snap.account(f.account_id)) {
        if (const UsernameRecord* r = snap.record(a->username_id)) out << '\t' << r->raw;
      }
      for (const Reason& r : f.reasons) {
        out << '\t' << to_token(r.code);
        if (!r.detail.empty()) out << '=' << r.detail;
      }
      out << '\n';
    }
  }
}

std::vector<std::string> reversed(const std::vector<std::string>& args) {
  return {args.rbegin(), args.rend()};
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Username verification for online communities"};
  app.name("nameguard");
  app.require_subcommand(1);

  Globals g;
  app.add_option("--data", g.data, "Store directory")->envname("NAMEGUARD_DATA");
  app.add_option("--tables", g.tables, "Directory with leet.tsv and confusables.tsv");
  app.add_option("--leet", g.leet, "Leet fold table");
  app.add_option("--confusables", g.confusables, "Confusables fold table");

  std::string name;
  std::string email;
  bool json = false;

  auto* verify = app.add_subcommand("verify", "Check one username; exit 0 accept, 1 correction, 2 reject");
  verify->add_option("name", name)->required();
  verify->add_option("--email", email);
  verify->add_flag("--json", json);

  std::string batch_file;
  auto* batch = app.add_subcommand("batch", "Check one username per line; prints name, decision, codes");
  batch->add_option("file", batch_file)->required();

  auto* scan = app.add_subcommand("scan", "Re-check every account against the current lexicons");
  scan->add_flag("--json", json);

  std::string low_adequacy = "auto";
  auto* report = app.add_subcommand("report", "Account classification and efficiency");
  report->add_flag("--json", json);
  report->add_option("--low-adequacy", low_adequacy, "'auto' or a count");

  auto* db = app.add_subcommand("db", "Edit the prohibited-content and blacklist stores");
  db->require_subcommand(1);
  std::string category;
  std::string severity = "reject";
  int sanction_code = kHighestSanction;
  std::string reason;
  auto* add_prohibited = db->add_subcommand("add-prohibited", "Add a prohibited term");
  add_prohibited->add_option("term", name)->required();
  add_prohibited->add_option("--category", category);
  add_prohibited->add_option("--severity", severity)->check(CLI::IsMember({"reject", "flag"}));
  auto* rm_prohibited = db->add_subcommand("rm-prohibited", "Remove a prohibited term");
  rm_prohibited->add_option("term", name)->required();
  auto* add_blacklist = db->add_subcommand("add-blacklist", "Blacklist a username");
  add_blacklist->add_option("name", name)->required();
  add_blacklist->add_option("--code", sanction_code)->check(CLI::Range(1, kHighestSanction));
  add_blacklist->add_option("--reason", reason);
  auto* rm_blacklist = db->add_subcommand("rm-blacklist", "Remove a blacklisted username");
  rm_blacklist->add_option("name", name)->required();
  std::string which = "all";
  auto* list = db->add_subcommand("list", "Print store contents as TSV");
  list->add_option("what", which)->check(CLI::IsMember({"all", "prohibited", "blacklist", "accounts"}));

  auto* reg = app.add_subcommand("register", "Verify and register a username");
  reg->add_option("name", name)->required();
  reg->add_option("--email", email);

  std::string account_id;
  std::string rule = "format_violation";
  std::string note;
  auto* sanction = app.add_subcommand("sanction", "Apply a sanction (1 warn .. 4 block and blacklist)");
  sanction->add_option("account", account_id)->required();
  sanction->add_option("code", sanction_code)->required();
  sanction->add_option("--rule", rule);
  sanction->add_option("--note", note);

  std::string status;
  auto* set_status = app.add_subcommand("status", "Change an account status");
  set_status->add_option("account", account_id)->required();
  set_status->add_option("status", status)->required();

  service::ServeOptions serve_opts;
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  serve->add_option("--port", serve_opts.port)->check(CLI::Range(0, 65535));
  serve->add_option("--host", serve_opts.host);
  serve->add_option("--data", g.data, "Store directory")->envname("NAMEGUARD_DATA");
  serve->add_option("--token", serve_opts.service.admin_token, "Admin token for moderation endpoints")
      ->envname("NAMEGUARD_TOKEN");
  serve->add_option("--webhook", serve_opts.webhook_url, "URL receiving warning events");

  try {
    auto rargs = reversed(args);
    app.parse(rargs);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    auto save = [&](const store::LexiconStores& stores) {
      store::save(*stores.snapshot(), g.data);
      out << "revision " << stores.revision() << '\n';
    };
    auto request = [&] {
      pipeline::RegistrationRequest r{name, std::nullopt, {}};
      if (!email.empty()) r.email = email;
      return r;
    };

    if (verify->parsed()) {
      Verdict v = pipeline::verify(request(), load_state(g));
      if (json) {
        out << Json(v).dump() << '\n';
      } else {
        print_verdict(v, out);
      }
      return exit_code(v.decision());
    }

    if (batch->parsed()) {
      std::ifstream in(batch_file, std::ios::binary);
      if (!in) throw Error(ErrorKind::Io, "io_error", "cannot read " + batch_file);
      store::StoreState state = load_state(g);
      std::string line;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim(line).empty()) continue;
        Verdict v = pipeline::verify({line, std::nullopt, {}}, state);
        out << line << '\t' << to_token(v.decision()) << '\t' << code_list(v, ',') << '\n';
      }
      if (in.bad()) throw Error(ErrorKind::Io, "io_error", "read failed for " + batch_file);
      return 0;
    }

    if (scan->parsed()) {
      store::LexiconStores stores(load_state(g));
      auto flags = pipeline::post_registration_scan(stores, system_clock());
      auto rep = pipeline::generate_report(flags, system_clock()());
      if (json) {
        out << Json(rep).dump() << '\n';
      } else {
        print_report(rep, *stores.snapshot(), out);
      }
      return 0;
    }

    if (report->parsed()) {
      store::StoreState state = load_state(g);
      metrics::ClassificationReport classes = metrics::classify_accounts(state);
      metrics::EfficiencyInput input = metrics::efficiency_input(state);
      if (low_adequacy != "auto") {
        auto [ptr, ec] = std::from_chars(low_adequacy.data(), low_adequacy.data() + low_adequacy.size(),
                                         input.n_low_adequacy);
        if (ec != std::errc() || ptr != low_adequacy.data() + low_adequacy.size()) {
          err << "--low-adequacy must be 'auto' or a count\n";
          return kExitUsage;
        }
      }
      std::optional<double> eff;
      std::string undefined;
      try {
        eff = metrics::efficiency(input);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Domain) throw;
        undefined = e.code();
      }
      if (json) {
        Json j = metrics::to_json(classes, eff);
        if (!undefined.empty()) j["efficiency_error"] = undefined;
        out << j.dump() << '\n';
      } else {
        out << metrics::to_text(classes, eff);
        if (!undefined.empty()) out << "efficiency           undefined (N_ver = N_low)\n";
      }
      return 0;
    }

    if (db->parsed()) {
      if (list->parsed()) {
        store::StoreState state = load_state(g);
        bool all = which == "all";
        if (all || which == "prohibited") {
          if (all) out << "# prohibited\n";
          for (const auto& [k, t] : state.prohibited()) {
            out << t.term << '\t' << t.category << '\t' << to_token(t.severity) << '\n';
          }
        }
        if (all || which == "blacklist") {
          if (all) out << "# blacklist\n";
          for (const auto& [k, b] : state.blacklist()) {
            out << b.normalized_name << '\t' << b.sanction_code << '\t' << b.reason << '\n';
          }
        }
        if (all || which == "accounts") {
          if (all) out << "# accounts\n";
          for (const auto& [id, a] : state.accounts()) {
            const UsernameRecord* r = state.record(a.username_id);
            out << a.id << '\t' << (r ? r->raw : "") << '\t' << to_token(a.status) << '\n';
          }
        }
        return 0;
      }
      store::LexiconStores stores(load_state(g));
      if (add_prohibited->parsed()) {
        stores.add_prohibited({name, category, *parse_term_severity(severity)});
      } else if (rm_prohibited->parsed()) {
        stores.remove_prohibited(name);
      } else if (add_blacklist->parsed()) {
        stores.add_blacklist({name, sanction_code, reason, system_clock()()});
      } else if (rm_blacklist->parsed()) {
        stores.remove_blacklist(name);
      }
      save(stores);
      return 0;
    }

    if (reg->parsed()) {
      store::LexiconStores stores(load_state(g));
      auto outcome = pipeline::register_account(request(), stores, system_clock());
      if (auto* v = std::get_if<Verdict>(&outcome)) {
        print_verdict(*v, out);
        return exit_code(v->decision());
      }
      out << "registered " << std::get<pipeline::Registered>(outcome).account.id << '\n';
      save(stores);
      return 0;
    }

    if (sanction->parsed()) {
      auto rule_code = parse_reason_code(rule);
      if (!rule_code) {
        err << "unknown rule code '" << rule << "'\n";
        return kExitUsage;
      }
      store::LexiconStores stores(load_state(g));
      Deviation d = pipeline::apply_sanction({account_id, sanction_code, *rule_code, note}, stores, system_clock());
      out << "deviation " << d.id << " account " << d.account_id << " status "
          << to_token(stores.snapshot()->account(d.account_id)->status) << '\n';
      save(stores);
      return 0;
    }

    if (set_status->parsed()) {
      auto parsed = parse_account_status(status);
      if (!parsed) {
        err << "unknown status '" << status << "'\n";
        return kExitUsage;
      }
      store::LexiconStores stores(load_state(g));
      pipeline::set_account_status(account_id, *parsed, stores);
      save(stores);
      return 0;
    }

    if (serve->parsed()) {
      serve_opts.service.data_dir = g.data;
      service::serve(serve_opts, fold_tables(g));
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::Io: return kExitIoError;
      case ErrorKind::Parse: return kExitDataError;
      default: return kExitFailure;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace nameguard::cli
