#pragma once

#include "nameguard/domain.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

// Pure text layer. All functions take and return UTF-8; malformed UTF-8
// sequences decode to U+FFFD.
namespace nameguard::text {

std::u32string to_u32(std::string_view utf8);
std::string to_utf8(std::u32string_view text);

// Number of code points.
std::size_t length(std::string_view utf8);

bool is_whitespace(char32_t c);
bool is_letter(char32_t c);
bool is_combining_mark(char32_t c);

// Strips leading and trailing Unicode White_Space.
std::string trim(std::string_view s);

// trim -> compatibility decomposition -> simple lowercase -> every
// whitespace run becomes a single '.'. Total and idempotent.
std::string normalize(std::string_view raw);
std::u32string normalize(std::u32string_view raw);

// Token grammar for the "First.Last" rule.
struct FormatPolicy {
  std::size_t min_token_length = 2;
  std::size_t max_token_length = 32;
  // Allowed after the first character, in addition to letters and
  // combining marks.
  std::u32string extra_characters = U"-'";
};

struct FormatParse {
  bool valid = false;
  std::string first;
  std::string last;
  std::optional<std::string> violation;
};

FormatParse parse_format(std::string_view raw, const FormatPolicy& policy = {});

ScriptReport detect_script(std::string_view raw);

struct ContactCheck {
  bool valid = false;
  std::optional<std::string> violation;
};

inline constexpr std::size_t kMaxEmailLength = 254;

ContactCheck validate_contact(std::string_view email);

}  // namespace nameguard::text
