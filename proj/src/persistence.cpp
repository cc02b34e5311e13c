#include "nameguard/persistence.hpp"

#include "nameguard/errors.hpp"
#include "nameguard/text.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace nameguard::store {

namespace fs = std::filesystem;

namespace {

std::string escape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string escape_contact_value(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\\' || c == ';') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

class LineReader {
 public:
  LineReader(fs::path path, std::string content)
      : path_(std::move(path)), content_(std::move(content)) {}

  // Next non-comment, non-blank line split on TAB; false at end of file.
  bool next(std::vector<std::string>& fields) {
    while (pos_ < content_.size()) {
      auto end = content_.find('\n', pos_);
      if (end == std::string::npos) end = content_.size();
      std::string_view line(content_.data() + pos_, end - pos_);
      pos_ = end + 1;
      ++line_;
      if (line.empty() || line.front() == '#') continue;

      fields.clear();
      std::size_t start = 0;
      for (;;) {
        auto tab = line.find('\t', start);
        fields.push_back(unescape(line.substr(start, tab - start)));
        if (tab == std::string_view::npos) break;
        start = tab + 1;
      }
      return true;
    }
    return false;
  }

  Error error(const std::string& what) const {
    return Error(ErrorKind::Parse, "malformed_store",
                 path_.string() + ": line " + std::to_string(line_) + ": " + what);
  }

  void expect_fields(const std::vector<std::string>& fields, std::size_t n) const {
    if (fields.size() != n) {
      throw error("expected " + std::to_string(n) + " fields, found " +
                  std::to_string(fields.size()));
    }
  }

  long long integer(const std::string& s, const char* what) const {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw error(std::string("bad ") + what + " '" + s + "'");
    }
    return v;
  }

  Timestamp timestamp(const std::string& s) const {
    try {
      return parse_iso8601(s);
    } catch (const Error& e) {
      throw error(e.what());
    }
  }

 private:
  std::string unescape(std::string_view s) const {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] != '\\') {
        out.push_back(s[i]);
        continue;
      }
      if (i + 1 == s.size()) throw error("dangling escape");
      char e = s[++i];
      switch (e) {
        case '\\': out.push_back('\\'); break;
        case 't': out.push_back('\t'); break;
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        // Contact values keep their own escapes for the second split.
        case ';': out += "\\;"; break;
        default: throw error(std::string("unknown escape '\\") + e + "'");
      }
    }
    return out;
  }

  fs::path path_;
  std::string content_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

std::optional<LineReader> open_table(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (fs::exists(path)) {
      throw Error(ErrorKind::Io, "io_error", "cannot read " + path.string());
    }
    return std::nullopt;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return LineReader(path, buf.str());
}

void write_atomically(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "io_error", "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorKind::Io, "io_error", "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "io_error", "cannot replace " + path.string() + ": " + ec.message());
}

std::string join_contacts(const std::vector<ContactEntry>& contacts) {
  std::string out;
  for (const ContactEntry& c : contacts) {
    if (!out.empty()) out.push_back(';');
    out += to_token(c.kind);
    if (c.verified) out.push_back('*');
    out.push_back('=');
    out += escape_contact_value(c.value);
  }
  return out;
}

std::vector<ContactEntry> split_contacts(const std::string& field, const LineReader& reader) {
  std::vector<ContactEntry> contacts;
  if (field.empty()) return contacts;

  std::vector<std::string> items(1);
  for (std::size_t i = 0; i < field.size(); ++i) {
    char c = field[i];
    if (c == '\\' && i + 1 < field.size()) {
      items.back().push_back(field[++i]);
    } else if (c == ';') {
      items.emplace_back();
    } else {
      items.back().push_back(c);
    }
  }
  for (const std::string& item : items) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw reader.error("contact '" + item + "' lacks '='");
    std::string kind = item.substr(0, eq);
    bool verified = !kind.empty() && kind.back() == '*';
    if (verified) kind.pop_back();
    auto parsed = parse_contact_kind(kind);
    if (!parsed) throw reader.error("unknown contact kind '" + kind + "'");
    std::string value = item.substr(eq + 1);
    if (value.empty()) throw reader.error("empty contact value");
    contacts.push_back({*parsed, std::move(value), verified});
  }
  return contacts;
}

}  // namespace

void save(const StoreState& state, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "io_error", "cannot create " + dir.string() + ": " + ec.message());

  std::ostringstream prohibited;
  prohibited << "# term\tcategory\tseverity\n";
  for (const auto& [key, t] : state.prohibited()) {
    prohibited << escape_field(t.term) << '\t' << escape_field(t.category) << '\t'
               << to_token(t.severity) << '\n';
  }

  std::ostringstream blacklist;
  blacklist << "# normalized_name\tsanction_code\tcreated_at\treason\n";
  for (const auto& [key, b] : state.blacklist()) {
    blacklist << escape_field(b.normalized_name) << '\t' << b.sanction_code << '\t'
              << to_iso8601(b.created_at) << '\t' << escape_field(b.reason) << '\n';
  }

  std::ostringstream registry;
  registry << "# id\traw\tnormalized\tskeleton\tcreated_at\n";
  for (const auto& [id, r] : state.registry()) {
    registry << escape_field(r.id) << '\t' << escape_field(r.raw) << '\t'
             << escape_field(r.normalized) << '\t' << escape_field(r.skeleton) << '\t'
             << to_iso8601(r.created_at) << '\n';
  }

  std::ostringstream accounts;
  accounts << "# id\tusername_id\tanonymity_level\tstatus\tregistered_at\tcontacts\n";
  for (const auto& [id, a] : state.accounts()) {
    accounts << escape_field(a.id) << '\t' << escape_field(a.username_id) << '\t'
             << a.anonymity_level << '\t' << to_token(a.status) << '\t'
             << to_iso8601(a.registered_at) << '\t' << escape_field(join_contacts(a.contacts))
             << '\n';
  }

  std::ostringstream deviations;
  deviations << "# id\taccount_id\trule_code\tsanction_code\tcreated_at\tnote\n";
  for (const Deviation& d : state.deviations()) {
    deviations << escape_field(d.id) << '\t' << escape_field(d.account_id) << '\t'
               << to_token(d.rule_code) << '\t' << d.sanction_code << '\t'
               << to_iso8601(d.created_at) << '\t' << escape_field(d.note) << '\n';
  }

  std::ostringstream meta;
  meta << "# key\tvalue\nrevision\t" << state.revision() << '\n';

  write_atomically(dir / "prohibited.tsv", prohibited.str());
  write_atomically(dir / "blacklist.tsv", blacklist.str());
  write_atomically(dir / "registry.tsv", registry.str());
  write_atomically(dir / "accounts.tsv", accounts.str());
  write_atomically(dir / "deviations.tsv", deviations.str());
  write_atomically(dir / "meta.tsv", meta.str());
}

StoreState load(const fs::path& dir, text::FoldTable table) {
  StoreState state(std::move(table));
  StoreWriter writer(state);
  std::vector<std::string> f;

  // Each reader converts domain errors into "file: line N: ..." messages.
  auto guarded = [](LineReader& reader, auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::Parse && std::string_view(e.what()).find(": line ") != std::string_view::npos) throw;
      throw reader.error(e.what());
    }
  };

  if (auto reader = open_table(dir / "prohibited.tsv")) {
    while (reader->next(f)) {
      reader->expect_fields(f, 3);
      auto severity = parse_term_severity(f[2]);
      if (!severity) throw reader->error("unknown severity '" + f[2] + "'");
      guarded(*reader, [&] { writer.add_prohibited({f[0], f[1], *severity}); });
    }
  }

  if (auto reader = open_table(dir / "blacklist.tsv")) {
    while (reader->next(f)) {
      reader->expect_fields(f, 4);
      BlacklistEntry entry{f[0], static_cast<int>(reader->integer(f[1], "sanction code")),
                           f[3], reader->timestamp(f[2])};
      guarded(*reader, [&] { writer.add_blacklist(std::move(entry)); });
    }
  }

  if (auto reader = open_table(dir / "registry.tsv")) {
    while (reader->next(f)) {
      reader->expect_fields(f, 5);
      if (state.record(f[0]) != nullptr) throw reader->error("duplicate id '" + f[0] + "'");
      UsernameRecord record;
      record.id = f[0];
      record.raw = f[1];
      record.created_at = reader->timestamp(f[4]);
      guarded(*reader, [&] { writer.upsert_record(std::move(record)); });
    }
  }

  if (auto reader = open_table(dir / "accounts.tsv")) {
    while (reader->next(f)) {
      reader->expect_fields(f, 6);
      Account account;
      account.id = f[0];
      account.username_id = f[1];
      auto level = reader->integer(f[2], "anonymity level");
      auto status = parse_account_status(f[3]);
      if (!status) throw reader->error("unknown status '" + f[3] + "'");
      account.status = *status;
      account.registered_at = reader->timestamp(f[4]);
      account.contacts = split_contacts(f[5], *reader);
      if (level != anonymity_level_for(account.contacts)) {
        throw reader->error("anonymity level " + f[2] + " does not match verified contacts");
      }
      guarded(*reader, [&] { writer.upsert_account(std::move(account)); });
    }
  }

  if (auto reader = open_table(dir / "deviations.tsv")) {
    while (reader->next(f)) {
      reader->expect_fields(f, 6);
      auto rule = parse_reason_code(f[2]);
      if (!rule) throw reader->error("unknown rule code '" + f[2] + "'");
      if (f[0].empty()) throw reader->error("empty deviation id");
      Deviation d{f[0], f[1], *rule, static_cast<int>(reader->integer(f[3], "sanction code")), f[5],
                  reader->timestamp(f[4])};
      guarded(*reader, [&] { writer.record_deviation(std::move(d)); });
    }
  }

  std::uint64_t revision = 0;
  if (auto reader = open_table(dir / "meta.tsv")) {
    while (reader->next(f)) {
      reader->expect_fields(f, 2);
      if (f[0] == "revision") {
        auto v = reader->integer(f[1], "revision");
        if (v < 0) throw reader->error("negative revision");
        revision = static_cast<std::uint64_t>(v);
      } else {
        throw reader->error("unknown key '" + f[0] + "'");
      }
    }
  }
  writer.restore_revision(revision);
  return state;
}

}  // namespace nameguard::store
