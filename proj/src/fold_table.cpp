#include "nameguard/fold_table.hpp"

#include "nameguard/errors.hpp"
#include "nameguard/text.hpp"

#include <fstream>
#include <sstream>

#ifndef NAMEGUARD_TABLE_DIR
#define NAMEGUARD_TABLE_DIR "data"
#endif

namespace nameguard::text {

namespace {

Error parse_error(std::string_view source, std::size_t line, const std::string& what) {
  return Error(ErrorKind::Parse, "malformed_fold_table",
               std::string(source) + ": line " + std::to_string(line) + ": " + what);
}

}  // namespace

void FoldTable::set(char32_t from, std::u32string to) {
  auto [it, inserted] = entries_.emplace(from, to);
  if (!inserted && it->second != to) {
    throw Error(ErrorKind::Conflict, "fold_conflict",
                "code point U+" + [&] {
                  std::ostringstream os;
                  os << std::hex << std::uppercase << static_cast<unsigned>(from);
                  return os.str();
                }() + " is already mapped");
  }
}

const std::u32string* FoldTable::find(char32_t c) const {
  auto it = entries_.find(c);
  return it == entries_.end() ? nullptr : &it->second;
}

bool FoldTable::is_stable() const {
  for (const auto& [from, to] : entries_) {
    for (char32_t c : to) {
      if (entries_.count(c) != 0) return false;
    }
  }
  return true;
}

FoldTable FoldTable::merged_with(const FoldTable& other) const {
  FoldTable out = *this;
  for (const auto& [from, to] : other.entries_) out.set(from, to);
  return out;
}

FoldTable FoldTable::parse(std::string_view content, std::string_view source) {
  FoldTable table;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto end = content.find('\n', pos);
    if (end == std::string_view::npos) end = content.size();
    std::string_view line = content.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw parse_error(source, line_no, "expected 2 fields");
    std::string_view hex = line.substr(0, tab);
    std::string_view replacement = line.substr(tab + 1);
    if (hex.size() > 2 && (hex[0] == 'U' || hex[0] == 'u') && hex[1] == '+') hex.remove_prefix(2);
    if (hex.empty() || hex.size() > 6) throw parse_error(source, line_no, "bad code point");

    unsigned long cp = 0;
    for (char c : hex) {
      int digit;
      if (c >= '0' && c <= '9') digit = c - '0';
      else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
      else if (c >= 'A' && c <= 'F') digit = c - 'A' + 10;
      else throw parse_error(source, line_no, "bad code point '" + std::string(hex) + "'");
      cp = cp * 16 + static_cast<unsigned long>(digit);
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      throw parse_error(source, line_no, "code point out of range");
    }
    if (replacement.empty()) throw parse_error(source, line_no, "empty replacement");
    if (replacement.find('\t') != std::string_view::npos) {
      throw parse_error(source, line_no, "expected 2 fields");
    }
    try {
      table.set(static_cast<char32_t>(cp), to_u32(replacement));
    } catch (const Error& e) {
      throw parse_error(source, line_no, e.what());
    }
  }
  return table;
}

FoldTable FoldTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, "io_error", "cannot read fold table " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path.string());
}

std::u32string confusable_fold(std::u32string_view normalized, const FoldTable& table) {
  std::u32string out;
  out.reserve(normalized.size());
  for (char32_t c : normalized) {
    if (const std::u32string* to = table.find(c)) {
      out += *to;
    } else {
      out.push_back(c);
    }
  }
  return out;
}

std::string confusable_fold(std::string_view normalized, const FoldTable& table) {
  return to_utf8(confusable_fold(std::u32string_view(to_u32(normalized)), table));
}

std::filesystem::path shipped_table_dir() { return NAMEGUARD_TABLE_DIR; }

FoldTable load_fold_tables(const std::filesystem::path& dir) {
  return FoldTable::load(dir / "leet.tsv").merged_with(FoldTable::load(dir / "confusables.tsv"));
}

}  // namespace nameguard::text
