#pragma once

#include "nameguard/domain.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace nameguard::store {

struct TermMatch {
  std::string term;
  std::size_t offset = 0;  // code point index into the folded name
  TermSeverity severity = TermSeverity::Reject;

  bool operator==(const TermMatch&) const = default;
};

// Aho-Corasick automaton over code points. Immutable once built.
class TermMatcher {
 public:
  TermMatcher();
  explicit TermMatcher(const std::vector<ProhibitedTerm>& terms);

  // Every (term, offset) occurrence, sorted by offset ascending then term
  // length descending.
  std::vector<TermMatch> find_all(std::u32string_view text) const;

 private:
  struct Node {
    std::map<char32_t, int> next;
    int fail = 0;
    int terminal = -1;     // pattern ending exactly here
    int output_link = -1;  // nearest proper suffix node that is terminal
  };

  struct Pattern {
    ProhibitedTerm term;
    std::size_t length = 0;
  };

  int step(int state, char32_t c) const;

  std::vector<Node> nodes_;
  std::vector<Pattern> patterns_;
};

}  // namespace nameguard::store
