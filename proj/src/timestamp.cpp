#include "nameguard/timestamp.hpp"

#include "nameguard/errors.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

namespace nameguard {

std::string to_iso8601(Timestamp ts) {
  std::time_t t = static_cast<std::time_t>(ts.seconds);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

Timestamp parse_iso8601(std::string_view text) {
  auto fail = [&]() -> Error {
    return Error(ErrorKind::Parse, "bad_timestamp",
                 "invalid ISO-8601 UTC timestamp '" + std::string(text) + "'");
  };
  // YYYY-MM-DDTHH:MM:SSZ
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
    throw fail();
  }
  auto num = [&](std::size_t pos, std::size_t len) {
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      char c = text[i];
      if (c < '0' || c > '9') throw fail();
      v = v * 10 + (c - '0');
    }
    return v;
  };
  std::tm tm{};
  tm.tm_year = num(0, 4) - 1900;
  tm.tm_mon = num(5, 2) - 1;
  tm.tm_mday = num(8, 2);
  tm.tm_hour = num(11, 2);
  tm.tm_min = num(14, 2);
  tm.tm_sec = num(17, 2);
  if (tm.tm_mon < 0 || tm.tm_mon > 11 || tm.tm_mday < 1 || tm.tm_mday > 31 ||
      tm.tm_hour > 23 || tm.tm_min > 59 || tm.tm_sec > 60) {
    throw fail();
  }
  Timestamp ts{static_cast<std::int64_t>(timegm(&tm))};
  if (to_iso8601(ts) != text) throw fail();  // rejects e.g. Feb 31
  return ts;
}

Clock system_clock() {
  return [] {
    auto now = std::chrono::system_clock::now();
    return Timestamp{std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count()};
  };
}

}  // namespace nameguard
