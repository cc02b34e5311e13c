#pragma once

#include "nameguard/domain.hpp"
#include "nameguard/stores.hpp"
#include "nameguard/text.hpp"

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace nameguard::pipeline {

struct RegistrationRequest {
  std::string username;
  std::optional<std::string> email;
  std::vector<ContactEntry> extra_contacts;
};

// Name checks shared by verify and the post-registration scan, in order:
// presence, format, script, prohibited content, blacklist, duplicates.
// Records with id `exclude_record_id` are not reported as duplicates.
std::vector<Reason> check_name(std::string_view raw, const store::StoreState& snapshot,
                               const text::FormatPolicy& policy = {},
                               std::string_view exclude_record_id = {});

// Runs every check and collects every reason; never short-circuits.
Verdict verify(const RegistrationRequest& request, const store::StoreState& snapshot,
               const text::FormatPolicy& policy = {});

struct Registered {
  Account account;
  UsernameRecord record;
  std::uint64_t revision = 0;
};

using RegistrationOutcome = std::variant<Registered, Verdict>;

// Verifies and inserts in one serialized write. Mutates the store only when
// the verdict is Accept; the new account starts UnderModeration.
RegistrationOutcome register_account(const RegistrationRequest& request,
                                     store::LexiconStores& stores, const Clock& clock,
                                     const text::FormatPolicy& policy = {});

// Re-checks the names of every non-blocked account against one snapshot.
// Accounts already flagged at that snapshot's revision are skipped. The new
// flags are appended to the store's flag log and returned.
std::vector<Flag> post_registration_scan(store::LexiconStores& stores, const Clock& clock,
                                         const text::FormatPolicy& policy = {});

struct SanctionRequest {
  std::string account_id;
  int sanction_code = 1;
  ReasonCode rule_code = ReasonCode::FormatViolation;
  std::string note;
};

// 1: warning only. 2: account back under moderation pending a rename.
// 3: temporary block. 4: block and blacklist the normalized username.
// Errors: unknown account (NotFound), already blocked (InvalidState), code
// outside 1..4 (InvalidArgument).
Deviation apply_sanction(const SanctionRequest& request, store::LexiconStores& stores,
                         const Clock& clock);

// Moderator status change (e.g. approval to Verified). Blocked is reached
// only through apply_sanction; a block lifts only if it was temporary.
Account set_account_status(std::string_view account_id, AccountStatus status,
                           store::LexiconStores& stores);

// Renames the account's username when the new name verifies (ignoring the
// account's own record as a duplicate); status becomes Corrected.
std::variant<Account, Verdict> rename_account(std::string_view account_id,
                                              std::string_view new_raw,
                                              store::LexiconStores& stores,
                                              const text::FormatPolicy& policy = {});

struct ModerationReport {
  Timestamp generated_at;
  // Keyed by each flag's first reason; ordered by detected_at within a group.
  std::map<ReasonCode, std::vector<Flag>> groups;
  std::map<ReasonCode, int> counts;  // every code present, zero included
};

ModerationReport generate_report(std::vector<Flag> flags, Timestamp generated_at);

}  // namespace nameguard::pipeline
