#pragma once

#include "nameguard/domain.hpp"
#include "nameguard/fold_table.hpp"
#include "nameguard/term_matcher.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <vector>

namespace nameguard::store {

using SkeletonIndex = std::map<std::string, std::set<std::string>>;

// One immutable revision of the five tables plus the flag log. Readers hold
// it through a Snapshot; writers work on a private copy.
class StoreState {
 public:
  explicit StoreState(text::FoldTable table = {});

  std::uint64_t revision() const noexcept { return revision_; }
  const text::FoldTable& fold_table() const noexcept { return *fold_table_; }

  // confusable_fold(normalize(raw))
  std::string skeleton_of(std::string_view raw) const;
  // Canonical stored form of a prohibited term: the folded normalized text.
  std::string canonical_term(std::string_view term) const;

  std::vector<TermMatch> match_prohibited(std::string_view normalized_name) const;
  std::optional<BlacklistEntry> is_blacklisted(std::string_view normalized_name) const;
  std::vector<UsernameRecord> find_duplicates(std::string_view raw_name) const;

  const UsernameRecord* record(std::string_view id) const;
  const Account* account(std::string_view id) const;

  const std::map<std::string, ProhibitedTerm>& prohibited() const noexcept { return prohibited_; }
  const std::map<std::string, BlacklistEntry>& blacklist() const noexcept { return blacklist_; }
  const std::map<std::string, UsernameRecord>& registry() const noexcept { return registry_; }
  const SkeletonIndex& skeleton_index() const noexcept { return skeleton_index_; }
  const std::map<std::string, Account>& accounts() const noexcept { return accounts_; }
  const std::vector<Deviation>& deviations() const noexcept { return deviations_; }
  const std::vector<Flag>& flags() const noexcept { return flags_; }

  bool flagged_at(std::string_view account_id, std::uint64_t revision) const;
  bool has_open_flag(std::string_view account_id) const;

 private:
  friend class StoreWriter;
  friend class LexiconStores;

  std::uint64_t revision_ = 0;
  std::uint64_t id_sequence_ = 0;
  std::shared_ptr<const text::FoldTable> fold_table_;
  std::shared_ptr<const TermMatcher> matcher_;

  std::map<std::string, ProhibitedTerm> prohibited_;
  std::map<std::string, BlacklistEntry> blacklist_;
  std::map<std::string, UsernameRecord> registry_;
  SkeletonIndex skeleton_index_;
  std::map<std::string, Account> accounts_;
  std::vector<Deviation> deviations_;
  std::vector<Flag> flags_;
  std::set<std::pair<std::string, std::uint64_t>> flag_keys_;
};

using Snapshot = std::shared_ptr<const StoreState>;

// Mutation handle passed to LexiconStores::write. Changes become visible
// atomically when the write callback returns; an exception discards them.
class StoreWriter {
 public:
  explicit StoreWriter(StoreState& state) : state_(state) {}

  const StoreState& state() const noexcept { return state_; }

  // "<prefix><n>" with n drawn from a store-wide sequence.
  std::string allocate_id(std::string_view prefix);

  // Recomputes normalized/skeleton/script from raw. An existing id with a
  // different raw name is a Conflict.
  const UsernameRecord& upsert_record(UsernameRecord record);
  const UsernameRecord& rename_record(std::string_view id, std::string_view new_raw);

  // Stores the canonical form of the term (replacing an existing entry).
  const ProhibitedTerm& add_prohibited(ProhibitedTerm term);
  void remove_prohibited(std::string_view term);

  // Key is normalized on insert.
  const BlacklistEntry& add_blacklist(BlacklistEntry entry);
  void remove_blacklist(std::string_view name);

  // username_id must resolve; anonymity_level is recomputed from contacts.
  const Account& upsert_account(Account account);
  void set_account_status(std::string_view account_id, AccountStatus status);

  const Deviation& record_deviation(Deviation deviation);

  // Flag bookkeeping does not advance the revision.
  void append_flags(std::vector<Flag> flags);
  void resolve_flags(std::string_view account_id);

  // Used when reconstructing a saved store: sets the revision directly and
  // re-derives the id sequence from the ids present.
  void restore_revision(std::uint64_t revision);

  bool changed() const noexcept { return data_changed_; }
  bool flags_changed() const noexcept { return flags_changed_; }

 private:
  void touch() { data_changed_ = true; }

  StoreState& state_;
  bool data_changed_ = false;
  bool flags_changed_ = false;
};

// Single-writer / multi-reader store. Each committed write that changes data
// advances the global revision by one.
class LexiconStores {
 public:
  explicit LexiconStores(text::FoldTable table = {});
  explicit LexiconStores(StoreState initial);

  LexiconStores(const LexiconStores&) = delete;
  LexiconStores& operator=(const LexiconStores&) = delete;

  Snapshot snapshot() const;
  std::uint64_t revision() const { return snapshot()->revision(); }

  template <typename Fn>
  auto write(Fn&& fn) -> std::invoke_result_t<Fn, StoreWriter&> {
    std::lock_guard writer_lock(writer_mutex_);
    auto work = std::make_shared<StoreState>(*snapshot());
    StoreWriter writer(*work);
    if constexpr (std::is_void_v<std::invoke_result_t<Fn, StoreWriter&>>) {
      fn(writer);
      commit(std::move(work), writer);
    } else {
      auto result = fn(writer);
      commit(std::move(work), writer);
      return result;
    }
  }

  // Single-operation conveniences; each returns the resulting revision.
  std::uint64_t add_prohibited(ProhibitedTerm term);
  std::uint64_t remove_prohibited(std::string_view term);
  std::uint64_t add_blacklist(BlacklistEntry entry);
  std::uint64_t remove_blacklist(std::string_view name);
  std::uint64_t upsert_record(UsernameRecord record);
  std::uint64_t record_deviation(Deviation deviation);

 private:
  void commit(std::shared_ptr<StoreState> work, const StoreWriter& writer);

  mutable std::mutex state_mutex_;
  std::mutex writer_mutex_;
  std::shared_ptr<const StoreState> current_;
};

}  // namespace nameguard::store
