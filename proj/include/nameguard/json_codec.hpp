#pragma once

#include "nameguard/domain.hpp"
#include "nameguard/metrics.hpp"
#include "nameguard/pipeline.hpp"
#include "nameguard/stores.hpp"

#include <json.hpp>

// Wire representation: snake_case keys, enum values as lowercase tokens,
// timestamps as ISO-8601 UTC strings.
namespace nameguard {

using Json = nlohmann::json;

void to_json(Json& j, const Reason& r);
void to_json(Json& j, const Verdict& v);
void to_json(Json& j, const ScriptReport& s);
void to_json(Json& j, const UsernameRecord& r);
void to_json(Json& j, const ContactEntry& c);
void to_json(Json& j, const Account& a);
void to_json(Json& j, const BlacklistEntry& b);
void to_json(Json& j, const Deviation& d);
void to_json(Json& j, const ProhibitedTerm& t);
void to_json(Json& j, const Flag& f);

// Throws Error(InvalidArgument) on missing or mistyped fields.
ContactEntry contact_from_json(const Json& j);

namespace store {
void to_json(Json& j, const TermMatch& m);
}

namespace pipeline {
void to_json(Json& j, const ModerationReport& r);
// {"username": ..., "email"?: ..., "contacts"?: [{kind, value, verified?}]}
RegistrationRequest request_from_json(const Json& j);
}

namespace metrics {
// {total, counts, percentages, efficiency?}
Json to_json(const ClassificationReport& report, std::optional<double> efficiency = {});
}

// Account joined with its username record.
Json account_summary(const Account& account, const store::StoreState& snapshot);

// Every table plus the revision; deterministic for a given state.
Json dump_store(const store::StoreState& snapshot);

}  // namespace nameguard
