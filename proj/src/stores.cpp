#include "nameguard/stores.hpp"

#include "nameguard/errors.hpp"
#include "nameguard/text.hpp"

#include <algorithm>
#include <charconv>

namespace nameguard::store {

namespace {

std::shared_ptr<const TermMatcher> build_matcher(const std::map<std::string, ProhibitedTerm>& terms) {
  std::vector<ProhibitedTerm> list;
  list.reserve(terms.size());
  for (const auto& [key, term] : terms) list.push_back(term);
  return std::make_shared<const TermMatcher>(list);
}

Error not_found(std::string code, const std::string& what) {
  return Error(ErrorKind::NotFound, std::move(code), what);
}

}  // namespace

StoreState::StoreState(text::FoldTable table)
    : fold_table_(std::make_shared<const text::FoldTable>(std::move(table))),
      matcher_(std::make_shared<const TermMatcher>()) {}

std::string StoreState::skeleton_of(std::string_view raw) const {
  return text::to_utf8(text::confusable_fold(text::normalize(text::to_u32(raw)), *fold_table_));
}

std::string StoreState::canonical_term(std::string_view term) const { return skeleton_of(term); }

std::vector<TermMatch> StoreState::match_prohibited(std::string_view normalized_name) const {
  return matcher_->find_all(text::confusable_fold(text::to_u32(normalized_name), *fold_table_));
}

std::optional<BlacklistEntry> StoreState::is_blacklisted(std::string_view normalized_name) const {
  if (auto it = blacklist_.find(std::string(normalized_name)); it != blacklist_.end()) {
    return it->second;
  }
  if (auto it = blacklist_.find(text::confusable_fold(normalized_name, *fold_table_));
      it != blacklist_.end()) {
    return it->second;
  }
  return std::nullopt;
}

std::vector<UsernameRecord> StoreState::find_duplicates(std::string_view raw_name) const {
  std::vector<UsernameRecord> out;
  auto it = skeleton_index_.find(skeleton_of(raw_name));
  if (it == skeleton_index_.end()) return out;
  for (const std::string& id : it->second) out.push_back(registry_.at(id));
  std::sort(out.begin(), out.end(), [](const UsernameRecord& a, const UsernameRecord& b) {
    return std::tie(a.created_at, a.id) < std::tie(b.created_at, b.id);
  });
  return out;
}

const UsernameRecord* StoreState::record(std::string_view id) const {
  auto it = registry_.find(std::string(id));
  return it == registry_.end() ? nullptr : &it->second;
}

const Account* StoreState::account(std::string_view id) const {
  auto it = accounts_.find(std::string(id));
  return it == accounts_.end() ? nullptr : &it->second;
}

bool StoreState::flagged_at(std::string_view account_id, std::uint64_t revision) const {
  return flag_keys_.count({std::string(account_id), revision}) != 0;
}

bool StoreState::has_open_flag(std::string_view account_id) const {
  return std::any_of(flags_.begin(), flags_.end(), [&](const Flag& f) {
    return !f.resolved && f.account_id == account_id;
  });
}

std::string StoreWriter::allocate_id(std::string_view prefix) {
  return std::string(prefix) + std::to_string(++state_.id_sequence_);
}

const UsernameRecord& StoreWriter::upsert_record(UsernameRecord record) {
  if (record.id.empty()) {
    throw Error(ErrorKind::InvalidArgument, "invalid_record", "username record id is empty");
  }
  auto existing = state_.registry_.find(record.id);
  if (existing != state_.registry_.end() && existing->second.raw != record.raw) {
    throw Error(ErrorKind::Conflict, "record_conflict",
                "record " + record.id + " already holds a different name");
  }
  record.normalized = text::normalize(record.raw);
  record.skeleton = text::confusable_fold(record.normalized, *state_.fold_table_);
  record.script = text::detect_script(record.raw);

  if (existing != state_.registry_.end()) {
    auto& ids = state_.skeleton_index_[existing->second.skeleton];
    ids.erase(record.id);
    if (ids.empty()) state_.skeleton_index_.erase(existing->second.skeleton);
  }
  state_.skeleton_index_[record.skeleton].insert(record.id);
  auto& slot = state_.registry_[record.id];
  slot = std::move(record);
  touch();
  return slot;
}

const UsernameRecord& StoreWriter::rename_record(std::string_view id, std::string_view new_raw) {
  auto it = state_.registry_.find(std::string(id));
  if (it == state_.registry_.end()) {
    throw not_found("record_not_found", "no username record " + std::string(id));
  }
  UsernameRecord updated = it->second;
  auto& ids = state_.skeleton_index_[updated.skeleton];
  ids.erase(updated.id);
  if (ids.empty()) state_.skeleton_index_.erase(updated.skeleton);
  state_.registry_.erase(it);

  updated.raw = std::string(new_raw);
  return upsert_record(std::move(updated));
}

const ProhibitedTerm& StoreWriter::add_prohibited(ProhibitedTerm term) {
  std::string canonical = state_.canonical_term(term.term);
  if (canonical.empty()) {
    throw Error(ErrorKind::InvalidArgument, "invalid_term", "prohibited term is empty");
  }
  if (text::normalize(canonical) != canonical) {
    throw Error(ErrorKind::InvalidArgument, "invalid_term",
                "fold table maps term '" + term.term + "' outside normalized form");
  }
  term.term = canonical;
  auto& slot = state_.prohibited_[canonical];
  slot = std::move(term);
  state_.matcher_ = build_matcher(state_.prohibited_);
  touch();
  return slot;
}

void StoreWriter::remove_prohibited(std::string_view term) {
  std::string key(term);
  if (state_.prohibited_.count(key) == 0) key = state_.canonical_term(term);
  if (state_.prohibited_.erase(key) == 0) {
    throw not_found("term_not_found", "prohibited term '" + std::string(term) + "' not found");
  }
  state_.matcher_ = build_matcher(state_.prohibited_);
  touch();
}

const BlacklistEntry& StoreWriter::add_blacklist(BlacklistEntry entry) {
  entry.normalized_name = text::normalize(entry.normalized_name);
  if (entry.normalized_name.empty()) {
    throw Error(ErrorKind::InvalidArgument, "invalid_blacklist_entry", "blacklisted name is empty");
  }
  if (!sanction_from_code(entry.sanction_code)) {
    throw Error(ErrorKind::InvalidArgument, "invalid_sanction_code",
                "sanction code must be 1..4, got " + std::to_string(entry.sanction_code));
  }
  auto& slot = state_.blacklist_[entry.normalized_name];
  slot = std::move(entry);
  touch();
  return slot;
}

void StoreWriter::remove_blacklist(std::string_view name) {
  std::string key(name);
  if (state_.blacklist_.count(key) == 0) key = text::normalize(name);
  if (state_.blacklist_.erase(key) == 0) {
    throw not_found("blacklist_entry_not_found",
                    "blacklist entry '" + std::string(name) + "' not found");
  }
  touch();
}

const Account& StoreWriter::upsert_account(Account account) {
  if (account.id.empty()) {
    throw Error(ErrorKind::InvalidArgument, "invalid_account", "account id is empty");
  }
  if (state_.registry_.count(account.username_id) == 0) {
    throw not_found("record_not_found",
                    "account " + account.id + " references unknown username " + account.username_id);
  }
  for (const ContactEntry& c : account.contacts) {
    if (c.value.empty()) {
      throw Error(ErrorKind::InvalidArgument, "invalid_contact", "contact value is empty");
    }
  }
  account.anonymity_level = anonymity_level_for(account.contacts);
  auto& slot = state_.accounts_[account.id];
  slot = std::move(account);
  touch();
  return slot;
}

void StoreWriter::set_account_status(std::string_view account_id, AccountStatus status) {
  auto it = state_.accounts_.find(std::string(account_id));
  if (it == state_.accounts_.end()) {
    throw not_found("account_not_found", "no account " + std::string(account_id));
  }
  it->second.status = status;
  touch();
}

const Deviation& StoreWriter::record_deviation(Deviation deviation) {
  if (state_.accounts_.count(deviation.account_id) == 0) {
    throw not_found("account_not_found", "no account " + deviation.account_id);
  }
  if (!sanction_from_code(deviation.sanction_code)) {
    throw Error(ErrorKind::InvalidArgument, "invalid_sanction_code",
                "sanction code must be 1..4, got " + std::to_string(deviation.sanction_code));
  }
  if (deviation.id.empty()) deviation.id = allocate_id("d");
  state_.deviations_.push_back(std::move(deviation));
  touch();
  return state_.deviations_.back();
}

void StoreWriter::append_flags(std::vector<Flag> flags) {
  for (Flag& f : flags) {
    state_.flag_keys_.emplace(f.account_id, f.store_revision);
    state_.flags_.push_back(std::move(f));
    flags_changed_ = true;
  }
}

void StoreWriter::resolve_flags(std::string_view account_id) {
  for (Flag& f : state_.flags_) {
    if (!f.resolved && f.account_id == account_id) {
      f.resolved = true;
      flags_changed_ = true;
    }
  }
}

void StoreWriter::restore_revision(std::uint64_t revision) {
  state_.revision_ = revision;
  std::uint64_t highest = 0;
  auto consider = [&](const std::string& id) {
    if (id.size() < 2) return;
    std::uint64_t n = 0;
    auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), n);
    if (ec == std::errc() && ptr == id.data() + id.size()) highest = std::max(highest, n);
  };
  for (const auto& [id, r] : state_.registry_) consider(id);
  for (const auto& [id, a] : state_.accounts_) consider(id);
  for (const Deviation& d : state_.deviations_) consider(d.id);
  state_.id_sequence_ = highest;
}

LexiconStores::LexiconStores(text::FoldTable table)
    : current_(std::make_shared<const StoreState>(std::move(table))) {}

LexiconStores::LexiconStores(StoreState initial)
    : current_(std::make_shared<const StoreState>(std::move(initial))) {}

Snapshot LexiconStores::snapshot() const {
  std::lock_guard lock(state_mutex_);
  return current_;
}

void LexiconStores::commit(std::shared_ptr<StoreState> work, const StoreWriter& writer) {
  if (!writer.changed() && !writer.flags_changed()) return;
  if (writer.changed()) ++work->revision_;
  std::lock_guard lock(state_mutex_);
  current_ = std::move(work);
}

std::uint64_t LexiconStores::add_prohibited(ProhibitedTerm term) {
  return write([&](StoreWriter& w) {
    w.add_prohibited(std::move(term));
    return w.state().revision() + 1;
  });
}

std::uint64_t LexiconStores::remove_prohibited(std::string_view term) {
  return write([&](StoreWriter& w) {
    w.remove_prohibited(term);
    return w.state().revision() + 1;
  });
}

std::uint64_t LexiconStores::add_blacklist(BlacklistEntry entry) {
  return write([&](StoreWriter& w) {
    w.add_blacklist(std::move(entry));
    return w.state().revision() + 1;
  });
}

std::uint64_t LexiconStores::remove_blacklist(std::string_view name) {
  return write([&](StoreWriter& w) {
    w.remove_blacklist(name);
    return w.state().revision() + 1;
  });
}

std::uint64_t LexiconStores::upsert_record(UsernameRecord record) {
  return write([&](StoreWriter& w) {
    w.upsert_record(std::move(record));
    return w.state().revision() + 1;
  });
}

std::uint64_t LexiconStores::record_deviation(Deviation deviation) {
  return write([&](StoreWriter& w) {
    w.record_deviation(std::move(deviation));
    return w.state().revision() + 1;
  });
}

}  // namespace nameguard::store
