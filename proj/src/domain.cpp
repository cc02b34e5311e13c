#include "nameguard/domain.hpp"

#include "nameguard/errors.hpp"

#include <algorithm>

namespace nameguard {

namespace {

template <typename Enum, std::size_t N>
struct TokenTable {
  std::array<std::pair<Enum, std::string_view>, N> rows;

  std::string_view name(Enum value) const {
    for (const auto& [e, s] : rows) {
      if (e == value) return s;
    }
    return "unknown";
  }

  std::optional<Enum> parse(std::string_view token) const {
    for (const auto& [e, s] : rows) {
      if (s == token) return e;
    }
    return std::nullopt;
  }
};

constexpr TokenTable<ReasonCode, 7> kReasonTokens{{{
    {ReasonCode::MissingField, "missing_field"},
    {ReasonCode::FormatViolation, "format_violation"},
    {ReasonCode::MixedScript, "mixed_script"},
    {ReasonCode::ProhibitedContent, "prohibited_content"},
    {ReasonCode::Blacklisted, "blacklisted"},
    {ReasonCode::Duplicate, "duplicate"},
    {ReasonCode::InvalidContact, "invalid_contact"},
}}};

constexpr TokenTable<Decision, 3> kDecisionTokens{{{
    {Decision::Accept, "accept"},
    {Decision::RequireCorrection, "require_correction"},
    {Decision::Reject, "reject"},
}}};

constexpr TokenTable<AccountStatus, 5> kStatusTokens{{{
    {AccountStatus::Verified, "verified"},
    {AccountStatus::Corrected, "corrected"},
    {AccountStatus::CorrectedKeptName, "corrected_kept_name"},
    {AccountStatus::UnderModeration, "under_moderation"},
    {AccountStatus::Blocked, "blocked"},
}}};

constexpr TokenTable<TermSeverity, 2> kTermSeverityTokens{{{
    {TermSeverity::Reject, "reject"},
    {TermSeverity::Flag, "flag"},
}}};

constexpr TokenTable<ReasonSeverity, 2> kReasonSeverityTokens{{{
    {ReasonSeverity::Fatal, "fatal"},
    {ReasonSeverity::Correctable, "correctable"},
}}};

constexpr TokenTable<Script, 4> kScriptTokens{{{
    {Script::Latin, "latin"},
    {Script::Cyrillic, "cyrillic"},
    {Script::Other, "other"},
    {Script::None, "none"},
}}};

constexpr TokenTable<AnonymityClass, 3> kAnonymityTokens{{{
    {AnonymityClass::Identified, "identified"},
    {AnonymityClass::PartiallyAnonymous, "partially_anonymous"},
    {AnonymityClass::Anonymous, "anonymous"},
}}};

constexpr TokenTable<ContactKind, 2> kContactKindTokens{{{
    {ContactKind::Email, "email"},
    {ContactKind::Other, "other"},
}}};

bool detail_required(ReasonCode code) {
  return code == ReasonCode::ProhibitedContent || code == ReasonCode::Blacklisted ||
         code == ReasonCode::Duplicate;
}

}  // namespace

ReasonSeverity reason_severity(ReasonCode code) {
  switch (code) {
    case ReasonCode::ProhibitedContent:
    case ReasonCode::Blacklisted:
      return ReasonSeverity::Fatal;
    case ReasonCode::MissingField:
    case ReasonCode::FormatViolation:
    case ReasonCode::MixedScript:
    case ReasonCode::Duplicate:
    case ReasonCode::InvalidContact:
      return ReasonSeverity::Correctable;
  }
  return ReasonSeverity::Correctable;
}

Reason::Reason(ReasonCode code, std::string detail)
    : Reason(code, std::move(detail), reason_severity(code)) {}

Reason::Reason(ReasonCode code, std::string detail, ReasonSeverity severity)
    : code(code), detail(std::move(detail)), severity(severity) {
  if (this->detail.empty() && detail_required(code)) {
    throw Error(ErrorKind::InvalidArgument, "reason_detail_required",
                std::string("reason ") + std::string(to_token(code)) + " requires a detail");
  }
}

Verdict::Verdict(std::vector<Reason> reasons) : reasons_(std::move(reasons)) {
  if (reasons_.empty()) {
    decision_ = Decision::Accept;
  } else if (std::any_of(reasons_.begin(), reasons_.end(),
                         [](const Reason& r) { return r.severity == ReasonSeverity::Fatal; })) {
    decision_ = Decision::Reject;
  } else {
    decision_ = Decision::RequireCorrection;
  }
}

int anonymity_level_for(const std::vector<ContactEntry>& contacts) {
  auto verified = std::count_if(contacts.begin(), contacts.end(),
                                [](const ContactEntry& c) { return c.verified; });
  return static_cast<int>(std::min<std::ptrdiff_t>(verified, 3));
}

AnonymityClass anonymity_class_for(int level) {
  if (level <= 0) return AnonymityClass::Anonymous;
  if (level >= 3) return AnonymityClass::Identified;
  return AnonymityClass::PartiallyAnonymous;
}

std::optional<Sanction> sanction_from_code(int code) {
  if (code < 1 || code > kHighestSanction) return std::nullopt;
  return static_cast<Sanction>(code);
}

std::string_view to_token(ReasonCode code) { return kReasonTokens.name(code); }
std::string_view to_token(Decision decision) { return kDecisionTokens.name(decision); }
std::string_view to_token(AccountStatus status) { return kStatusTokens.name(status); }
std::string_view to_token(TermSeverity severity) { return kTermSeverityTokens.name(severity); }
std::string_view to_token(ReasonSeverity severity) { return kReasonSeverityTokens.name(severity); }
std::string_view to_token(Script script) { return kScriptTokens.name(script); }
std::string_view to_token(AnonymityClass cls) { return kAnonymityTokens.name(cls); }
std::string_view to_token(ContactKind kind) { return kContactKindTokens.name(kind); }

std::optional<ReasonCode> parse_reason_code(std::string_view t) { return kReasonTokens.parse(t); }
std::optional<AccountStatus> parse_account_status(std::string_view t) { return kStatusTokens.parse(t); }
std::optional<TermSeverity> parse_term_severity(std::string_view t) { return kTermSeverityTokens.parse(t); }
std::optional<ContactKind> parse_contact_kind(std::string_view t) { return kContactKindTokens.parse(t); }

}  // namespace nameguard
