#include "nameguard/term_matcher.hpp"

#include "nameguard/text.hpp"

#include <algorithm>
#include <queue>

namespace nameguard::store {

TermMatcher::TermMatcher() : nodes_(1) {}

TermMatcher::TermMatcher(const std::vector<ProhibitedTerm>& terms) : nodes_(1) {
  for (const ProhibitedTerm& term : terms) {
    std::u32string pattern = text::to_u32(term.term);
    if (pattern.empty()) continue;
    int state = 0;
    for (char32_t c : pattern) {
      auto it = nodes_[state].next.find(c);
      if (it == nodes_[state].next.end()) {
        nodes_.emplace_back();
        int created = static_cast<int>(nodes_.size()) - 1;
        nodes_[state].next.emplace(c, created);
        state = created;
      } else {
        state = it->second;
      }
    }
    if (nodes_[state].terminal < 0) {
      nodes_[state].terminal = static_cast<int>(patterns_.size());
      patterns_.push_back({term, pattern.size()});
    }
  }

  // Breadth-first fail links; depth-1 nodes fail to the root.
  std::queue<int> pending;
  for (const auto& [c, child] : nodes_[0].next) {
    nodes_[child].fail = 0;
    pending.push(child);
  }
  while (!pending.empty()) {
    int node = pending.front();
    pending.pop();
    for (const auto& [c, child] : nodes_[node].next) {
      int f = nodes_[node].fail;
      while (f != 0 && nodes_[f].next.count(c) == 0) f = nodes_[f].fail;
      auto it = nodes_[f].next.find(c);
      int target = (it != nodes_[f].next.end() && it->second != child) ? it->second : 0;
      nodes_[child].fail = target;
      nodes_[child].output_link =
          nodes_[target].terminal >= 0 ? target : nodes_[target].output_link;
      pending.push(child);
    }
  }
}

int TermMatcher::step(int state, char32_t c) const {
  for (;;) {
    auto it = nodes_[state].next.find(c);
    if (it != nodes_[state].next.end()) return it->second;
    if (state == 0) return 0;
    state = nodes_[state].fail;
  }
}

std::vector<TermMatch> TermMatcher::find_all(std::u32string_view text) const {
  std::vector<TermMatch> matches;
  if (patterns_.empty()) return matches;

  int state = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    state = step(state, text[i]);
    for (int node = nodes_[state].terminal >= 0 ? state : nodes_[state].output_link; node >= 0;
         node = nodes_[node].output_link) {
      const Pattern& p = patterns_[static_cast<std::size_t>(nodes_[node].terminal)];
      matches.push_back({p.term.term, i + 1 - p.length, p.term.severity});
    }
  }

  std::sort(matches.begin(), matches.end(), [](const TermMatch& a, const TermMatch& b) {
    if (a.offset != b.offset) return a.offset < b.offset;
    std::size_t la = text::length(a.term);
    std::size_t lb = text::length(b.term);
    if (la != lb) return la > lb;
    return a.term < b.term;
  });
  return matches;
}

}  // namespace nameguard::store
