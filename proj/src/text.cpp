#include "nameguard/text.hpp"

#include "nameguard/errors.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/uscript.h>

#include <algorithm>
#include <cstdio>
#include <vector>

namespace nameguard::text {

namespace {

const icu::Normalizer2& nfkd() {
  static const icu::Normalizer2* instance = [] {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFKDInstance(status);
    if (U_FAILURE(status) || n == nullptr) {
      throw Error(ErrorKind::Io, "icu_unavailable",
                  std::string("cannot load NFKD data: ") + u_errorName(status));
    }
    return n;
  }();
  return *instance;
}

std::u32string from_unicode_string(const icu::UnicodeString& us) {
  std::u32string out;
  out.reserve(static_cast<std::size_t>(us.length()));
  for (int32_t i = 0; i < us.length(); i = us.moveIndex32(i, 1)) {
    out.push_back(static_cast<char32_t>(us.char32At(i)));
  }
  return out;
}

icu::UnicodeString to_unicode_string(std::u32string_view text) {
  icu::UnicodeString us;
  for (char32_t c : text) us.append(static_cast<UChar32>(c));
  return us;
}

std::u32string_view trim(std::u32string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_whitespace(s[b])) ++b;
  while (e > b && is_whitespace(s[e - 1])) --e;
  return s.substr(b, e - b);
}

std::string describe(char32_t c) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "U+%04X", static_cast<unsigned>(c));
  return "'" + to_utf8(std::u32string_view(&c, 1)) + "' (" + buf + ")";
}

std::optional<std::string> check_token(std::u32string_view token, std::string_view which,
                                       const FormatPolicy& policy) {
  std::string name = std::string(which) + " name '" + to_utf8(token) + "'";
  if (token.size() < policy.min_token_length) {
    return name + " is shorter than " + std::to_string(policy.min_token_length) + " characters";
  }
  if (token.size() > policy.max_token_length) {
    return name + " is longer than " + std::to_string(policy.max_token_length) + " characters";
  }
  if (!is_letter(token.front())) {
    return name + " must start with a letter";
  }
  for (char32_t c : token.substr(1)) {
    if (is_letter(c) || is_combining_mark(c)) continue;
    if (policy.extra_characters.find(c) != std::u32string::npos) continue;
    return name + " contains disallowed character " + describe(c);
  }
  return std::nullopt;
}

}  // namespace

std::u32string to_u32(std::string_view utf8) {
  return from_unicode_string(
      icu::UnicodeString::fromUTF8(icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size()))));
}

std::string to_utf8(std::u32string_view text) {
  std::string out;
  to_unicode_string(text).toUTF8String(out);
  return out;
}

std::string trim(std::string_view s) { return to_utf8(trim(std::u32string_view(to_u32(s)))); }

std::size_t length(std::string_view utf8) { return to_u32(utf8).size(); }

bool is_whitespace(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)) != 0; }

bool is_letter(char32_t c) { return u_isalpha(static_cast<UChar32>(c)) != 0; }

bool is_combining_mark(char32_t c) {
  auto type = u_charType(static_cast<UChar32>(c));
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK ||
         type == U_ENCLOSING_MARK;
}

std::u32string normalize(std::u32string_view raw) {
  std::u32string_view trimmed = trim(raw);

  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString decomposed = nfkd().normalize(to_unicode_string(trimmed), status);
  if (U_FAILURE(status)) {
    throw Error(ErrorKind::InvalidArgument, "normalization_failed", u_errorName(status));
  }
  std::u32string lowered = from_unicode_string(decomposed);
  for (char32_t& c : lowered) c = static_cast<char32_t>(u_tolower(static_cast<UChar32>(c)));

  // Decomposition can emit spaces at the edges (U+00A8 -> " ̈"), so
  // every run is collapsed, not only interior ones.
  std::u32string out;
  out.reserve(lowered.size());
  bool in_space = false;
  for (char32_t c : lowered) {
    if (is_whitespace(c)) {
      if (!in_space) out.push_back(U'.');
      in_space = true;
    } else {
      out.push_back(c);
      in_space = false;
    }
  }
  return out;
}

std::string normalize(std::string_view raw) { return to_utf8(normalize(to_u32(raw))); }

FormatParse parse_format(std::string_view raw, const FormatPolicy& policy) {
  FormatParse result;
  auto fail = [&](std::string message) {
    result.valid = false;
    result.first.clear();
    result.last.clear();
    result.violation = std::move(message);
    return result;
  };

  std::u32string s = to_u32(raw);
  if (s.empty()) return fail("username is empty");
  if (std::any_of(s.begin(), s.end(), is_whitespace)) {
    return fail("whitespace is not allowed; join first and last name with a single '.' separator");
  }
  auto dots = std::count(s.begin(), s.end(), U'.');
  if (dots == 0) return fail("missing '.' separator between first and last name");

  std::vector<std::u32string_view> tokens;
  std::u32string_view rest = s;
  for (;;) {
    auto pos = rest.find(U'.');
    tokens.push_back(rest.substr(0, pos));
    if (pos == std::u32string_view::npos) break;
    rest = rest.substr(pos + 1);
  }
  if (std::any_of(tokens.begin(), tokens.end(), [](auto t) { return t.empty(); })) {
    return fail("empty token: first and last name must both be present around the '.' separator");
  }
  if (tokens.size() > 2) return fail("more than one '.' separator");

  if (auto v = check_token(tokens[0], "first", policy)) return fail(*v);
  if (auto v = check_token(tokens[1], "last", policy)) return fail(*v);

  result.valid = true;
  result.first = to_utf8(tokens[0]);
  result.last = to_utf8(tokens[1]);
  result.violation.reset();
  return result;
}

ScriptReport detect_script(std::string_view raw) {
  ScriptReport report;
  for (char32_t c : to_u32(raw)) {
    if (!is_letter(c)) continue;
    UErrorCode status = U_ZERO_ERROR;
    UScriptCode code = uscript_getScript(static_cast<UChar32>(c), &status);
    Script script = Script::Other;
    if (U_SUCCESS(status)) {
      if (code == USCRIPT_LATIN) script = Script::Latin;
      else if (code == USCRIPT_CYRILLIC) script = Script::Cyrillic;
    }
    ++report.per_script_counts[script];
  }

  report.mixed = report.per_script_counts.size() >= 2;
  report.dominant = Script::None;
  int best = 0;
  // std::map iterates Latin, Cyrillic, Other; strict '>' keeps the earlier
  // script on ties.
  for (const auto& [script, count] : report.per_script_counts) {
    if (count > best) {
      best = count;
      report.dominant = script;
    }
  }
  return report;
}

ContactCheck validate_contact(std::string_view email) {
  auto fail = [](std::string message) { return ContactCheck{false, std::move(message)}; };

  std::u32string s = to_u32(email);
  if (s.empty()) return fail("contact is empty");
  if (s.size() > kMaxEmailLength) {
    return fail("address is longer than " + std::to_string(kMaxEmailLength) + " characters");
  }
  if (std::any_of(s.begin(), s.end(), is_whitespace)) return fail("address contains whitespace");
  if (std::count(s.begin(), s.end(), U'@') != 1) return fail("address must contain exactly one '@'");

  auto at = s.find(U'@');
  std::u32string_view local(s.data(), at);
  std::u32string_view domain = std::u32string_view(s).substr(at + 1);
  if (local.empty()) return fail("empty local part");
  if (domain.find(U'.') == std::u32string_view::npos) return fail("domain has no '.'");

  std::u32string_view rest = domain;
  for (;;) {
    auto pos = rest.find(U'.');
    if (rest.substr(0, pos).empty()) return fail("domain has an empty label");
    if (pos == std::u32string_view::npos) break;
    rest = rest.substr(pos + 1);
  }
  return ContactCheck{true, std::nullopt};
}

}  // namespace nameguard::text
