#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

namespace nameguard {

// UTC seconds since the Unix epoch.
struct Timestamp {
  std::int64_t seconds = 0;

  auto operator<=>(const Timestamp&) const = default;
};

// "YYYY-MM-DDTHH:MM:SSZ"
std::string to_iso8601(Timestamp ts);

// Accepts exactly the format produced by to_iso8601. Throws Error(Parse).
Timestamp parse_iso8601(std::string_view text);

using Clock = std::function<Timestamp()>;

Clock system_clock();

}  // namespace nameguard
