#pragma once

#include "nameguard/timestamp.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nameguard {

enum class ReasonCode {
  MissingField,
  FormatViolation,
  MixedScript,
  ProhibitedContent,
  Blacklisted,
  Duplicate,
  InvalidContact,
};

inline constexpr std::array kAllReasonCodes = {
    ReasonCode::MissingField,      ReasonCode::FormatViolation, ReasonCode::MixedScript,
    ReasonCode::ProhibitedContent, ReasonCode::Blacklisted,     ReasonCode::Duplicate,
    ReasonCode::InvalidContact,
};

enum class ReasonSeverity { Fatal, Correctable };

// Fatal reasons reject outright; correctable ones ask the user for new data.
ReasonSeverity reason_severity(ReasonCode code);

struct Reason {
  ReasonCode code;
  std::string detail;
  // Defaults to reason_severity(code). Prohibited terms stored with `flag`
  // severity downgrade their ProhibitedContent reason to Correctable.
  ReasonSeverity severity;

  Reason(ReasonCode code, std::string detail);
  Reason(ReasonCode code, std::string detail, ReasonSeverity severity);

  bool operator==(const Reason&) const = default;
};

enum class Decision { Accept, RequireCorrection, Reject };

// decision == Accept iff reasons is empty; the decision is derived from the
// reasons and cannot be set independently.
class Verdict {
 public:
  Verdict() = default;
  explicit Verdict(std::vector<Reason> reasons);

  Decision decision() const noexcept { return decision_; }
  const std::vector<Reason>& reasons() const noexcept { return reasons_; }
  bool accepted() const noexcept { return decision_ == Decision::Accept; }

  bool operator==(const Verdict&) const = default;

 private:
  Decision decision_ = Decision::Accept;
  std::vector<Reason> reasons_;
};

enum class Script { Latin, Cyrillic, Other, None };

struct ScriptReport {
  Script dominant = Script::None;
  bool mixed = false;
  std::map<Script, int> per_script_counts;

  bool operator==(const ScriptReport&) const = default;
};

struct UsernameRecord {
  std::string id;
  std::string raw;
  std::string normalized;
  std::string skeleton;
  ScriptReport script;
  Timestamp created_at;

  bool operator==(const UsernameRecord&) const = default;
};

enum class ContactKind { Email, Other };

struct ContactEntry {
  ContactKind kind = ContactKind::Email;
  std::string value;
  bool verified = false;

  bool operator==(const ContactEntry&) const = default;
};

enum class AnonymityClass { Identified, PartiallyAnonymous, Anonymous };

enum class AccountStatus { Verified, Corrected, CorrectedKeptName, UnderModeration, Blocked };

inline constexpr std::array kAllAccountStatuses = {
    AccountStatus::Verified, AccountStatus::Corrected, AccountStatus::CorrectedKeptName,
    AccountStatus::UnderModeration, AccountStatus::Blocked,
};

// Count of verified contacts, capped at 3.
int anonymity_level_for(const std::vector<ContactEntry>& contacts);
AnonymityClass anonymity_class_for(int level);

struct Account {
  std::string id;
  std::string username_id;
  int anonymity_level = 0;
  std::vector<ContactEntry> contacts;
  Timestamp registered_at;
  AccountStatus status = AccountStatus::UnderModeration;

  AnonymityClass anonymity_class() const { return anonymity_class_for(anonymity_level); }

  bool operator==(const Account&) const = default;
};

// Sanction ladder. Level 4 also inserts the username into the blacklist.
enum class Sanction : int {
  Warning = 1,
  ForcedRename = 2,
  TemporaryBlock = 3,
  PermanentBlock = 4,
};

inline constexpr int kHighestSanction = 4;

std::optional<Sanction> sanction_from_code(int code);

struct BlacklistEntry {
  std::string normalized_name;
  int sanction_code = kHighestSanction;
  std::string reason;
  Timestamp created_at;

  bool operator==(const BlacklistEntry&) const = default;
};

struct Deviation {
  std::string id;
  std::string account_id;
  ReasonCode rule_code = ReasonCode::FormatViolation;
  int sanction_code = 1;
  std::string note;
  Timestamp created_at;

  bool operator==(const Deviation&) const = default;
};

enum class TermSeverity { Reject, Flag };

struct ProhibitedTerm {
  std::string term;
  std::string category;
  TermSeverity severity = TermSeverity::Reject;

  bool operator==(const ProhibitedTerm&) const = default;
};

// A post-registration finding against an existing account. `resolved` is set
// once a moderator acts on the account after the flag was raised.
struct Flag {
  std::string account_id;
  std::vector<Reason> reasons;
  Timestamp detected_at;
  std::uint64_t store_revision = 0;
  bool resolved = false;

  bool operator==(const Flag&) const = default;
};

// Wire/file tokens. Parsers return nullopt on unknown tokens.
std::string_view to_token(ReasonCode code);
std::string_view to_token(Decision decision);
std::string_view to_token(AccountStatus status);
std::string_view to_token(TermSeverity severity);
std::string_view to_token(ReasonSeverity severity);
std::string_view to_token(Script script);
std::string_view to_token(AnonymityClass cls);
std::string_view to_token(ContactKind kind);

std::optional<ReasonCode> parse_reason_code(std::string_view token);
std::optional<AccountStatus> parse_account_status(std::string_view token);
std::optional<TermSeverity> parse_term_severity(std::string_view token);
std::optional<ContactKind> parse_contact_kind(std::string_view token);

}  // namespace nameguard
