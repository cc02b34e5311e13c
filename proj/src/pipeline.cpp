#include "nameguard/pipeline.hpp"

#include "nameguard/errors.hpp"

#include <algorithm>
#include <tuple>

namespace nameguard::pipeline {

namespace {

std::string describe_scripts(const ScriptReport& report) {
  std::string out;
  for (const auto& [script, count] : report.per_script_counts) {
    if (!out.empty()) out.push_back(' ');
    out += std::string(to_token(script)) + "=" + std::to_string(count);
  }
  return out;
}

Error account_not_found(std::string_view id) {
  return Error(ErrorKind::NotFound, "account_not_found", "no account " + std::string(id));
}

bool permanently_blocked(const store::StoreState& state, std::string_view account_id) {
  return std::any_of(state.deviations().begin(), state.deviations().end(), [&](const Deviation& d) {
    return d.account_id == account_id && d.sanction_code == kHighestSanction;
  });
}

}  // namespace

std::vector<Reason> check_name(std::string_view raw, const store::StoreState& snapshot,
                               const text::FormatPolicy& policy,
                               std::string_view exclude_record_id) {
  std::vector<Reason> reasons;
  std::string trimmed = text::trim(raw);
  if (trimmed.empty()) {
    reasons.emplace_back(ReasonCode::MissingField, "username");
    return reasons;
  }

  if (auto parse = text::parse_format(trimmed, policy); !parse.valid) {
    reasons.emplace_back(ReasonCode::FormatViolation, parse.violation.value_or("invalid format"));
  }

  if (auto script = text::detect_script(trimmed); script.mixed) {
    reasons.emplace_back(ReasonCode::MixedScript, describe_scripts(script));
  }

  std::string normalized = text::normalize(raw);
  for (const store::TermMatch& m : snapshot.match_prohibited(normalized)) {
    reasons.emplace_back(ReasonCode::ProhibitedContent, m.term + "@" + std::to_string(m.offset),
                         m.severity == TermSeverity::Reject ? ReasonSeverity::Fatal
                                                            : ReasonSeverity::Correctable);
  }

  if (auto entry = snapshot.is_blacklisted(normalized)) {
    reasons.emplace_back(ReasonCode::Blacklisted, entry->normalized_name);
  }

  for (const UsernameRecord& dup : snapshot.find_duplicates(raw)) {
    if (dup.id == exclude_record_id) continue;
    reasons.emplace_back(ReasonCode::Duplicate, dup.id);
  }
  return reasons;
}

Verdict verify(const RegistrationRequest& request, const store::StoreState& snapshot,
               const text::FormatPolicy& policy) {
  std::vector<Reason> reasons = check_name(request.username, snapshot, policy);

  if (request.email) {
    if (auto check = text::validate_contact(*request.email); !check.valid) {
      reasons.emplace_back(ReasonCode::InvalidContact, "email: " + check.violation.value_or(""));
    }
  }
  for (const ContactEntry& c : request.extra_contacts) {
    if (c.kind == ContactKind::Email) {
      if (auto check = text::validate_contact(c.value); !check.valid) {
        reasons.emplace_back(ReasonCode::InvalidContact, c.value + ": " + check.violation.value_or(""));
      }
    } else if (text::trim(c.value).empty()) {
      reasons.emplace_back(ReasonCode::InvalidContact, "empty contact");
    }
  }
  return Verdict(std::move(reasons));
}

RegistrationOutcome register_account(const RegistrationRequest& request,
                                     store::LexiconStores& stores, const Clock& clock,
                                     const text::FormatPolicy& policy) {
  return stores.write([&](store::StoreWriter& w) -> RegistrationOutcome {
    Verdict verdict = verify(request, w.state(), policy);
    if (!verdict.accepted()) return verdict;

    Timestamp now = clock();
    UsernameRecord record;
    record.id = w.allocate_id("u");
    record.raw = text::trim(request.username);
    record.created_at = now;
    const UsernameRecord& stored = w.upsert_record(std::move(record));

    Account account;
    account.id = w.allocate_id("a");
    account.username_id = stored.id;
    if (request.email) account.contacts.push_back({ContactKind::Email, *request.email, false});
    for (const ContactEntry& c : request.extra_contacts) account.contacts.push_back(c);
    account.registered_at = now;
    account.status = AccountStatus::UnderModeration;

    Registered out{w.upsert_account(std::move(account)), stored, w.state().revision() + 1};
    return out;
  });
}

std::vector<Flag> post_registration_scan(store::LexiconStores& stores, const Clock& clock,
                                         const text::FormatPolicy& policy) {
  store::Snapshot snap = stores.snapshot();
  Timestamp now = clock();
  std::vector<Flag> flags;
  for (const auto& [id, account] : snap->accounts()) {
    if (account.status == AccountStatus::Blocked) continue;
    if (snap->flagged_at(id, snap->revision())) continue;
    const UsernameRecord* record = snap->record(account.username_id);
    if (record == nullptr) continue;
    std::vector<Reason> reasons = check_name(record->raw, *snap, policy, record->id);
    if (reasons.empty()) continue;
    flags.push_back({id, std::move(reasons), now, snap->revision(), false});
  }

  return stores.write([&](store::StoreWriter& w) {
    // A concurrent scan may have flagged the same revision meanwhile.
    std::vector<Flag> fresh;
    for (Flag& f : flags) {
      if (!w.state().flagged_at(f.account_id, f.store_revision)) fresh.push_back(std::move(f));
    }
    w.append_flags(fresh);
    return fresh;
  });
}

Deviation apply_sanction(const SanctionRequest& request, store::LexiconStores& stores,
                         const Clock& clock) {
  auto sanction = sanction_from_code(request.sanction_code);
  if (!sanction) {
    throw Error(ErrorKind::InvalidArgument, "invalid_sanction_code",
                "sanction code must be 1..4, got " + std::to_string(request.sanction_code));
  }
  return stores.write([&](store::StoreWriter& w) {
    const Account* account = w.state().account(request.account_id);
    if (account == nullptr) throw account_not_found(request.account_id);
    if (account->status == AccountStatus::Blocked) {
      throw Error(ErrorKind::InvalidState, "account_blocked",
                  "account " + request.account_id + " is already blocked");
    }
    Timestamp now = clock();
    std::string username_id = account->username_id;

    Deviation deviation;
    deviation.account_id = request.account_id;
    deviation.rule_code = request.rule_code;
    deviation.sanction_code = request.sanction_code;
    deviation.note = request.note;
    deviation.created_at = now;

    switch (*sanction) {
      case Sanction::Warning:
        break;
      case Sanction::ForcedRename:
        w.set_account_status(request.account_id, AccountStatus::UnderModeration);
        break;
      case Sanction::TemporaryBlock:
        deviation.note = request.note.empty() ? "temporary block" : "temporary block: " + request.note;
        w.set_account_status(request.account_id, AccountStatus::Blocked);
        break;
      case Sanction::PermanentBlock: {
        w.set_account_status(request.account_id, AccountStatus::Blocked);
        const UsernameRecord* record = w.state().record(username_id);
        BlacklistEntry entry;
        entry.normalized_name = record->normalized;
        entry.sanction_code = kHighestSanction;
        entry.reason = request.note.empty() ? std::string(to_token(request.rule_code)) : request.note;
        entry.created_at = now;
        w.add_blacklist(std::move(entry));
        break;
      }
    }
    w.resolve_flags(request.account_id);
    return w.record_deviation(std::move(deviation));
  });
}

Account set_account_status(std::string_view account_id, AccountStatus status,
                           store::LexiconStores& stores) {
  if (status == AccountStatus::Blocked) {
    throw Error(ErrorKind::InvalidArgument, "use_sanction",
                "accounts are blocked through sanctions, not status changes");
  }
  return stores.write([&](store::StoreWriter& w) {
    const Account* account = w.state().account(account_id);
    if (account == nullptr) throw account_not_found(account_id);
    if (account->status == AccountStatus::Blocked && permanently_blocked(w.state(), account_id)) {
      throw Error(ErrorKind::InvalidState, "account_blocked",
                  "account " + std::string(account_id) + " is permanently blocked");
    }
    w.set_account_status(account_id, status);
    w.resolve_flags(account_id);
    return *w.state().account(account_id);
  });
}

std::variant<Account, Verdict> rename_account(std::string_view account_id,
                                              std::string_view new_raw,
                                              store::LexiconStores& stores,
                                              const text::FormatPolicy& policy) {
  return stores.write([&](store::StoreWriter& w) -> std::variant<Account, Verdict> {
    const Account* account = w.state().account(account_id);
    if (account == nullptr) throw account_not_found(account_id);
    if (account->status == AccountStatus::Blocked) {
      throw Error(ErrorKind::InvalidState, "account_blocked",
                  "account " + std::string(account_id) + " is blocked");
    }
    std::string record_id = account->username_id;
    Verdict verdict(check_name(new_raw, w.state(), policy, record_id));
    if (!verdict.accepted()) return verdict;

    w.rename_record(record_id, text::trim(new_raw));
    w.set_account_status(account_id, AccountStatus::Corrected);
    w.resolve_flags(account_id);
    return *w.state().account(account_id);
  });
}

ModerationReport generate_report(std::vector<Flag> flags, Timestamp generated_at) {
  ModerationReport report;
  report.generated_at = generated_at;
  for (ReasonCode code : kAllReasonCodes) report.counts[code] = 0;

  for (Flag& f : flags) {
    if (f.reasons.empty()) continue;
    ReasonCode primary = f.reasons.front().code;
    ++report.counts[primary];
    report.groups[primary].push_back(std::move(f));
  }
  for (auto& [code, group] : report.groups) {
    std::sort(group.begin(), group.end(), [](const Flag& a, const Flag& b) {
      return std::tie(a.detected_at, a.account_id, a.store_revision) <
             std::tie(b.detected_at, b.account_id, b.store_revision);
    });
  }
  return report;
}

}  // namespace nameguard::pipeline
