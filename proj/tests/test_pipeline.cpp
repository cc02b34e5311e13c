#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nameguard/errors.hpp"
#include "nameguard/json_codec.hpp"
#include "nameguard/pipeline.hpp"
#include "support/pipeline_oracle.hpp"
#include "support/universe.hpp"

#include <algorithm>

using namespace nameguard;
using namespace nameguard::pipeline;
using nameguard::store::LexiconStores;

namespace {

text::FoldTable shipped() { return text::load_fold_tables(text::shipped_table_dir()); }

Clock ticking_clock() {
  auto t = std::make_shared<std::int64_t>(1'700'000'000);
  return [t] { return Timestamp{(*t)++}; };
}

RegistrationRequest req(std::string name, std::optional<std::string> email = std::nullopt) {
  return {std::move(name), std::move(email), {}};
}

std::vector<ReasonCode> codes(const Verdict& v) {
  std::vector<ReasonCode> out;
  for (const Reason& r : v.reasons()) out.push_back(r.code);
  return out;
}

Registered must_register(LexiconStores& stores, const std::string& name, const Clock& clock) {
  auto outcome = register_account(req(name), stores, clock);
  REQUIRE(std::holds_alternative<Registered>(outcome));
  return std::get<Registered>(outcome);
}

}  // namespace

TEST_CASE("verify: clean name against empty stores") {
  LexiconStores stores(shipped());
  Verdict v = verify(req("Ivan.Petrenko"), *stores.snapshot());
  CHECK(v.decision() == Decision::Accept);
  CHECK(v.reasons().empty());
}

TEST_CASE("verify: prohibited content rejects") {
  LexiconStores stores(shipped());
  stores.add_prohibited({"spam", "ads", TermSeverity::Reject});
  Verdict v = verify(req("Spam.Lord"), *stores.snapshot());
  CHECK(v.decision() == Decision::Reject);
  REQUIRE(v.reasons().size() == 1);
  CHECK(v.reasons()[0].code == ReasonCode::ProhibitedContent);
  CHECK(v.reasons()[0].detail == "spam@0");
}

TEST_CASE("verify: flag-severity terms ask for a correction") {
  LexiconStores stores(shipped());
  stores.add_prohibited({"lord", "titles", TermSeverity::Flag});
  Verdict v = verify(req("Spam.Lord"), *stores.snapshot());
  CHECK(v.decision() == Decision::RequireCorrection);
  REQUIRE(v.reasons().size() == 1);
  CHECK(v.reasons()[0].detail == "lord@5");
  CHECK(v.reasons()[0].severity == ReasonSeverity::Correctable);
}

TEST_CASE("verify: format violation is correctable") {
  LexiconStores stores(shipped());
  Verdict v = verify(req("ivan petrenko"), *stores.snapshot());
  CHECK(v.decision() == Decision::RequireCorrection);
  CHECK(codes(v) == std::vector{ReasonCode::FormatViolation});
}

TEST_CASE("verify: blacklisted name rejects") {
  LexiconStores stores(shipped());
  stores.add_blacklist({"troll.king", 4, "abuse", Timestamp{}});
  Verdict v = verify(req("Troll.King"), *stores.snapshot());
  CHECK(v.decision() == Decision::Reject);
  CHECK(codes(v) == std::vector{ReasonCode::Blacklisted});
  CHECK(v.reasons()[0].detail == "troll.king");
}

TEST_CASE("verify collects every reason in check order") {
  LexiconStores stores(shipped());
  stores.add_prohibited({"ivan", "", TermSeverity::Flag});
  stores.add_blacklist({"іvan petrenko", 4, "", Timestamp{}});
  stores.upsert_record({"u7", "Ivan.Petrenko", "", "", {}, Timestamp{}});
  Verdict v = verify(req("Іvan Petrenko", "not-an-email"), *stores.snapshot());
  CHECK(codes(v) == std::vector{ReasonCode::FormatViolation, ReasonCode::MixedScript,
                                ReasonCode::ProhibitedContent, ReasonCode::Blacklisted,
                                ReasonCode::Duplicate, ReasonCode::InvalidContact});
  CHECK(v.decision() == Decision::Reject);
  CHECK(v.reasons()[4].detail == "u7");
}

TEST_CASE("verify: missing username and contacts") {
  LexiconStores stores(shipped());
  Verdict empty = verify(req("   "), *stores.snapshot());
  CHECK(codes(empty) == std::vector{ReasonCode::MissingField});

  CHECK(verify(req("Ivan.Petrenko", "ivan@example.com"), *stores.snapshot()).accepted());
  CHECK(codes(verify(req("Ivan.Petrenko", "a@b"), *stores.snapshot())) ==
        std::vector{ReasonCode::InvalidContact});

  RegistrationRequest extra = req("Ivan.Petrenko");
  extra.extra_contacts = {{ContactKind::Other, "  ", false}, {ContactKind::Email, "x@y.z", false}};
  CHECK(codes(verify(extra, *stores.snapshot())) == std::vector{ReasonCode::InvalidContact});
}

TEST_CASE("verify is pure over a snapshot") {
  LexiconStores stores(shipped());
  stores.add_prohibited({"spam", "", TermSeverity::Reject});
  auto snap = stores.snapshot();
  Json first = verify(req("Spam.Spam"), *snap);
  stores.add_prohibited({"pam", "", TermSeverity::Reject});
  for (int i = 0; i < 5; ++i) CHECK(Json(verify(req("Spam.Spam"), *snap)).dump() == first.dump());
  CHECK(Json(verify(req("Spam.Spam"), *stores.snapshot())).dump() != first.dump());
}

TEST_CASE("verify agrees with the brute-force oracle") {
  testing::Rng rng(2024);
  text::FoldTable table = shipped();
  int disagreements = 0;
  for (int i = 0; i < 1000; ++i) {
    testing::Universe u = testing::random_universe(rng);
    LexiconStores stores(table);
    testing::load_universe(stores, u);
    std::string why = testing::compare_with_oracle(verify(testing::universe_request(u), *stores.snapshot()),
                                                   testing::oracle_reasons(u));
    if (!why.empty()) {
      ++disagreements;
      MESSAGE("candidate '" << text::to_utf8(u.candidate) << "': " << why);
    }
  }
  CHECK(disagreements == 0);
}

TEST_CASE("adding a term never turns a rejection into an acceptance") {
  testing::Rng rng(77);
  text::FoldTable table = shipped();
  for (int i = 0; i < 500; ++i) {
    testing::Universe u = testing::random_universe(rng);
    LexiconStores stores(table);
    testing::load_universe(stores, u);
    Decision before = verify(testing::universe_request(u), *stores.snapshot()).decision();

    std::string term = text::to_utf8(testing::small_string(rng, U"aboi", 1, 3));
    stores.add_prohibited({term, "", TermSeverity::Reject});
    Decision after = verify(testing::universe_request(u), *stores.snapshot()).decision();
    if (before == Decision::Reject) CHECK(after == Decision::Reject);

    stores.remove_prohibited(term);
    Decision removed = verify(testing::universe_request(u), *stores.snapshot()).decision();
    if (after == Decision::Accept) CHECK(removed == Decision::Accept);
  }
}

TEST_CASE("register persists accepted requests only") {
  LexiconStores stores(shipped());
  auto clock = ticking_clock();

  auto rev0 = stores.revision();
  auto outcome = register_account(req("Ivan.Petrenko", "ivan@example.com"), stores, clock);
  REQUIRE(std::holds_alternative<Registered>(outcome));
  const auto& reg = std::get<Registered>(outcome);
  auto snap = stores.snapshot();
  CHECK(snap->registry().size() == 1);
  CHECK(snap->accounts().size() == 1);
  CHECK(snap->revision() == rev0 + 1);
  CHECK(reg.revision == snap->revision());
  CHECK(reg.account.status == AccountStatus::UnderModeration);
  CHECK(reg.account.username_id == reg.record.id);
  CHECK(reg.record.normalized == "ivan.petrenko");
  CHECK(reg.account.contacts.size() == 1);
  CHECK(reg.account.anonymity_class() == AnonymityClass::Anonymous);

  auto rejected = register_account(req("bad name"), stores, clock);
  REQUIRE(std::holds_alternative<Verdict>(rejected));
  CHECK(stores.revision() == rev0 + 1);

  // U+0456 folds onto the registered Latin name.
  auto dup = register_account(req("Іvan.Petrenko"), stores, clock);
  REQUIRE(std::holds_alternative<Verdict>(dup));
  auto dup_codes = codes(std::get<Verdict>(dup));
  CHECK(std::count(dup_codes.begin(), dup_codes.end(), ReasonCode::Duplicate) == 1);
  CHECK(stores.snapshot()->registry().size() == 1);
}

TEST_CASE("register mutates iff the verdict is accept") {
  testing::Rng rng(5);
  text::FoldTable table = shipped();
  auto clock = ticking_clock();
  for (int i = 0; i < 300; ++i) {
    testing::Universe u = testing::random_universe(rng);
    LexiconStores stores(table);
    testing::load_universe(stores, u);
    auto rev = stores.revision();
    Verdict expected = verify(testing::universe_request(u), *stores.snapshot());
    auto outcome = register_account(testing::universe_request(u), stores, clock);
    CHECK(std::holds_alternative<Registered>(outcome) == expected.accepted());
    CHECK(stores.revision() == (expected.accepted() ? rev + 1 : rev));
  }
}

TEST_CASE("post-registration scan flags existing accounts after lexicon updates") {
  LexiconStores stores(shipped());
  auto clock = ticking_clock();
  auto john = must_register(stores, "John.Spamer", clock);
  must_register(stores, "Ivan.Petrenko", clock);

  CHECK(post_registration_scan(stores, clock).empty());

  stores.add_prohibited({"spam", "ads", TermSeverity::Reject});
  auto flags = post_registration_scan(stores, clock);
  REQUIRE(flags.size() == 1);
  CHECK(flags[0].account_id == john.account.id);
  CHECK(flags[0].store_revision == stores.revision());
  REQUIRE(flags[0].reasons.size() == 1);
  CHECK(flags[0].reasons[0].code == ReasonCode::ProhibitedContent);
  CHECK(flags[0].reasons[0].detail == "spam@5");

  auto rev = stores.revision();
  CHECK(post_registration_scan(stores, clock).empty());
  CHECK(stores.revision() == rev);
  CHECK(stores.snapshot()->flags().size() == 1);
  CHECK(stores.snapshot()->has_open_flag(john.account.id));
}

TEST_CASE("scan skips blocked accounts and excludes self from duplicates") {
  LexiconStores stores(shipped());
  auto clock = ticking_clock();
  auto a = must_register(stores, "Ivan.Petrenko", clock);
  CHECK(post_registration_scan(stores, clock).empty());

  stores.add_prohibited({"ivan", "", TermSeverity::Reject});
  apply_sanction({a.account.id, 3, ReasonCode::ProhibitedContent, ""}, stores, clock);
  CHECK(post_registration_scan(stores, clock).empty());
}

TEST_CASE("sanctions") {
  LexiconStores stores(shipped());
  auto clock = ticking_clock();
  auto troll = must_register(stores, "Troll.King", clock);
  auto warned = must_register(stores, "Ivan.Petrenko", clock);

  SUBCASE("warning leaves status alone") {
    Deviation d = apply_sanction({warned.account.id, 1, ReasonCode::FormatViolation, "fix it"}, stores, clock);
    CHECK(d.sanction_code == 1);
    CHECK(d.note == "fix it");
    CHECK(stores.snapshot()->account(warned.account.id)->status == AccountStatus::UnderModeration);
    CHECK(stores.snapshot()->deviations().size() == 1);
  }

  SUBCASE("highest sanction blocks and blacklists") {
    apply_sanction({troll.account.id, 4, ReasonCode::ProhibitedContent, "abuse"}, stores, clock);
    auto snap = stores.snapshot();
    CHECK(snap->account(troll.account.id)->status == AccountStatus::Blocked);
    auto entry = snap->is_blacklisted("troll.king");
    REQUIRE(entry);
    CHECK(entry->sanction_code == 4);
    Verdict again = verify(req("Troll.King"), *snap);
    CHECK(again.decision() == Decision::Reject);
    auto c = codes(again);
    CHECK(std::find(c.begin(), c.end(), ReasonCode::Blacklisted) != c.end());

    try {
      apply_sanction({troll.account.id, 1, ReasonCode::FormatViolation, ""}, stores, clock);
      FAIL("expected invalid-state");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidState);
    }
    CHECK_THROWS_AS(set_account_status(troll.account.id, AccountStatus::Verified, stores), Error);
  }

  SUBCASE("temporary block can be lifted") {
    Deviation d = apply_sanction({warned.account.id, 3, ReasonCode::MixedScript, "7 days"}, stores, clock);
    CHECK(d.note == "temporary block: 7 days");
    CHECK(stores.snapshot()->account(warned.account.id)->status == AccountStatus::Blocked);
    CHECK(stores.snapshot()->blacklist().empty());
    set_account_status(warned.account.id, AccountStatus::UnderModeration, stores);
    CHECK(stores.snapshot()->account(warned.account.id)->status == AccountStatus::UnderModeration);
  }

  SUBCASE("forced rename then rename") {
    apply_sanction({warned.account.id, 2, ReasonCode::FormatViolation, ""}, stores, clock);
    CHECK(stores.snapshot()->account(warned.account.id)->status == AccountStatus::UnderModeration);

    auto refused = rename_account(warned.account.id, "Troll.King", stores);
    REQUIRE(std::holds_alternative<Verdict>(refused));
    CHECK(codes(std::get<Verdict>(refused)) == std::vector{ReasonCode::Duplicate});

    // Renaming to a case variant of its own name is not a duplicate of itself.
    auto renamed = rename_account(warned.account.id, "IVAN.Petrenko", stores);
    REQUIRE(std::holds_alternative<Account>(renamed));
    CHECK(std::get<Account>(renamed).status == AccountStatus::Corrected);
    CHECK(stores.snapshot()->record(warned.record.id)->raw == "IVAN.Petrenko");
  }

  SUBCASE("errors") {
    try {
      apply_sanction({"missing", 1, ReasonCode::FormatViolation, ""}, stores, clock);
      FAIL("expected not-found");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NotFound);
      CHECK(e.code() == "account_not_found");
    }
    CHECK_THROWS_AS(apply_sanction({warned.account.id, 0, ReasonCode::FormatViolation, ""}, stores, clock), Error);
    CHECK_THROWS_AS(set_account_status(warned.account.id, AccountStatus::Blocked, stores), Error);
  }
}

TEST_CASE("sanctions and approvals resolve open flags") {
  LexiconStores stores(shipped());
  auto clock = ticking_clock();
  auto a = must_register(stores, "John.Spamer", clock);
  stores.add_prohibited({"spam", "", TermSeverity::Flag});
  REQUIRE(post_registration_scan(stores, clock).size() == 1);
  CHECK(stores.snapshot()->has_open_flag(a.account.id));
  set_account_status(a.account.id, AccountStatus::CorrectedKeptName, stores);
  CHECK_FALSE(stores.snapshot()->has_open_flag(a.account.id));
}

TEST_CASE("highest sanction then re-verify rejects as blacklisted") {
  testing::Rng rng(50);
  for (int i = 0; i < 50; ++i) {
    LexiconStores stores(shipped());
    auto clock = ticking_clock();
    std::string name = testing::plausible_name(rng);
    auto outcome = register_account(req(name), stores, clock);
    if (!std::holds_alternative<Registered>(outcome)) {
      // Mixed-script draws need a record inserted directly.
      stores.write([&](store::StoreWriter& w) {
        w.upsert_record({"u1", name, "", "", {}, Timestamp{}});
        Account acc;
        acc.id = "a1";
        acc.username_id = "u1";
        w.upsert_account(acc);
      });
    }
    std::string id = stores.snapshot()->accounts().begin()->first;
    apply_sanction({id, 4, ReasonCode::ProhibitedContent, ""}, stores, clock);
    Verdict v = verify(req(name), *stores.snapshot());
    CHECK(v.decision() == Decision::Reject);
    auto c = codes(v);
    CHECK(std::find(c.begin(), c.end(), ReasonCode::Blacklisted) != c.end());
  }
}

TEST_CASE("generate_report") {
  auto empty = generate_report({}, Timestamp{5});
  CHECK(empty.groups.empty());
  CHECK(empty.counts.size() == kAllReasonCodes.size());
  for (const auto& [code, n] : empty.counts) CHECK(n == 0);

  std::vector<Flag> flags = {
      {"a1", {Reason(ReasonCode::ProhibitedContent, "spam@0")}, Timestamp{3}, 2, false},
      {"a2", {Reason(ReasonCode::Duplicate, "u1"), Reason(ReasonCode::ProhibitedContent, "x@0")}, Timestamp{1}, 2, false},
      {"a3", {Reason(ReasonCode::ProhibitedContent, "spam@4")}, Timestamp{1}, 2, false},
  };
  auto report = generate_report(flags, Timestamp{9});
  CHECK(report.counts.at(ReasonCode::ProhibitedContent) == 2);
  CHECK(report.counts.at(ReasonCode::Duplicate) == 1);
  CHECK(report.counts.at(ReasonCode::Blacklisted) == 0);
  REQUIRE(report.groups.at(ReasonCode::ProhibitedContent).size() == 2);
  CHECK(report.groups.at(ReasonCode::ProhibitedContent)[0].account_id == "a3");

  std::string canonical = Json(report).dump();
  testing::Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(flags.begin(), flags.end(), rng);
    CHECK(Json(generate_report(flags, Timestamp{9})).dump() == canonical);
  }
}
