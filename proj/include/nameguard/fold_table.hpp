#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace nameguard::text {

// Single code point -> replacement text. Folding replaces characters one at
// a time and never rescans its own output.
class FoldTable {
 public:
  FoldTable() = default;

  // Throws Error(Conflict) when `from` is already mapped to something else.
  void set(char32_t from, std::u32string to);

  const std::u32string* find(char32_t c) const;

  bool empty() const noexcept { return entries_.empty(); }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<char32_t, std::u32string>& entries() const noexcept { return entries_; }

  // True when no replacement contains a character the table maps, so
  // folding twice equals folding once.
  bool is_stable() const;

  // Union of both tables; a source mapped differently by the two is a
  // Conflict error.
  FoldTable merged_with(const FoldTable& other) const;

  // Text format: "<hex code point>\t<replacement>" per line, '#' comment
  // lines and blank lines ignored. Errors name `source` and the 1-based line.
  static FoldTable parse(std::string_view content, std::string_view source);
  static FoldTable load(const std::filesystem::path& path);

  bool operator==(const FoldTable&) const = default;

 private:
  std::map<char32_t, std::u32string> entries_;
};

std::u32string confusable_fold(std::u32string_view normalized, const FoldTable& table);
std::string confusable_fold(std::string_view normalized, const FoldTable& table);

// Directory holding the shipped leet.tsv and confusables.tsv.
std::filesystem::path shipped_table_dir();

// leet.tsv merged with confusables.tsv from `dir`.
FoldTable load_fold_tables(const std::filesystem::path& dir);

}  // namespace nameguard::text
