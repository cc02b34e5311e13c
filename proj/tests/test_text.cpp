#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nameguard/errors.hpp"
#include "nameguard/fold_table.hpp"
#include "nameguard/text.hpp"
#include "support/corpus.hpp"

#include <algorithm>

using namespace nameguard;
using namespace nameguard::text;

TEST_CASE("normalize") {
  CHECK(normalize("John.Smith") == "john.smith");
  // U+FF2A decomposes <wide> to U+004A.
  CHECK(normalize("Ｊohn.Smith") == "john.smith");
  CHECK(normalize("  Іван.Петренко ") == "іван.петренко");
  CHECK(normalize("") == "");
  CHECK(normalize(" \t ") == "");
  CHECK(normalize("ivan   petrenko") == "ivan.petrenko");
  CHECK(normalize("Ivan．Petrenko") == "ivan.petrenko");
  CHECK(normalize("ﬁona") == "fiona");
  CHECK(normalize("a¨") == "a.̈");
}

TEST_CASE("normalize is idempotent on fuzzed text") {
  testing::Rng rng(7);
  for (int i = 0; i < 2000; ++i) {
    std::string s = testing::fuzz_string(rng);
    std::string once = normalize(s);
    INFO("input: " << s);
    CHECK(normalize(once) == once);
  }
}

TEST_CASE("normalize output has no whitespace") {
  testing::Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    std::u32string out = to_u32(normalize(testing::fuzz_string(rng)));
    CHECK(std::none_of(out.begin(), out.end(), is_whitespace));
  }
}

TEST_CASE("parse_format") {
  auto ok = parse_format("Ivan.Petrenko");
  CHECK(ok.valid);
  CHECK(ok.first == "Ivan");
  CHECK(ok.last == "Petrenko");
  CHECK_FALSE(ok.violation);

  auto spaced = parse_format("ivan petrenko");
  CHECK_FALSE(spaced.valid);
  REQUIRE(spaced.violation);
  CHECK(spaced.violation->find("separator") != std::string::npos);
  CHECK(spaced.first.empty());

  auto hyphen = parse_format("Anna-Maria.O'Neil");
  CHECK(hyphen.valid);
  CHECK(hyphen.first == "Anna-Maria");
  CHECK(hyphen.last == "O'Neil");

  auto empty_token = parse_format("Ivan..Petrenko");
  CHECK_FALSE(empty_token.valid);
  REQUIRE(empty_token.violation);
  CHECK(empty_token.violation->find("empty token") != std::string::npos);

  CHECK(parse_format("Іван.Петренко").valid);
  CHECK(parse_format("Ｊohn.Smith").valid);
  CHECK(parse_format("José.Garcia").valid);
}

TEST_CASE("parse_format edge cases") {
  CHECK_FALSE(parse_format("").valid);
  CHECK_FALSE(parse_format("IvanPetrenko").valid);
  CHECK_FALSE(parse_format(".Petrenko").valid);
  CHECK_FALSE(parse_format("Ivan.").valid);
  CHECK_FALSE(parse_format("Ivan.Petro.Petrenko").valid);
  CHECK_FALSE(parse_format("I.Petrenko").valid);
  CHECK(parse_format("Iv.Petrenko").valid);
  CHECK_FALSE(parse_format("-van.Petrenko").valid);
  CHECK_FALSE(parse_format("Iv4n.Petrenko").valid);
  CHECK_FALSE(parse_format("Ivan.Petrenko_").valid);
  CHECK_FALSE(parse_format("Ivan.Petrenko\t").valid);
  CHECK(parse_format(std::string(32, 'a') + ".bb").valid);
  CHECK_FALSE(parse_format(std::string(33, 'a') + ".bb").valid);

  FormatPolicy relaxed;
  relaxed.min_token_length = 1;
  relaxed.extra_characters = U"-'_";
  CHECK(parse_format("I.Petrenko_", relaxed).valid);
}

TEST_CASE("accepted names have exactly one interior dot and no whitespace") {
  testing::Rng rng(3);
  const std::u32string alphabet = U"ab.-' і";
  for (int i = 0; i < 5000; ++i) {
    std::string s = to_utf8(testing::small_string(rng, alphabet, 0, 10));
    if (!parse_format(s).valid) continue;
    std::u32string u = to_u32(s);
    CHECK(std::count(u.begin(), u.end(), U'.') == 1);
    CHECK(u.front() != U'.');
    CHECK(u.back() != U'.');
    CHECK(std::none_of(u.begin(), u.end(), is_whitespace));
  }
}

TEST_CASE("detect_script") {
  auto latin = detect_script("Ivan.Petrenko");
  CHECK(latin.dominant == Script::Latin);
  CHECK_FALSE(latin.mixed);

  auto cyr = detect_script("Іван.Петренко");
  CHECK(cyr.dominant == Script::Cyrillic);
  CHECK_FALSE(cyr.mixed);

  // U+0406 then eleven Latin letters.
  auto mixed = detect_script("Іvan.Petrenko");
  CHECK(mixed.dominant == Script::Latin);
  CHECK(mixed.mixed);
  CHECK(mixed.per_script_counts.at(Script::Latin) == 11);
  CHECK(mixed.per_script_counts.at(Script::Cyrillic) == 1);

  auto none = detect_script("123.-'");
  CHECK(none.dominant == Script::None);
  CHECK_FALSE(none.mixed);
  CHECK(none.per_script_counts.empty());

  auto greek = detect_script("αβγ.ab");
  CHECK(greek.dominant == Script::Other);
  CHECK(greek.mixed);
}

TEST_CASE("detect_script breaks ties toward Latin") {
  CHECK(detect_script("ab.аб").dominant == Script::Latin);
  CHECK(detect_script("аб.ab").dominant == Script::Latin);
  CHECK(detect_script("аб.αβ").dominant == Script::Cyrillic);
  testing::Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    int n = testing::uniform(rng, 1, 8);
    std::u32string s;
    for (int k = 0; k < n; ++k) s += U"aб";
    std::shuffle(s.begin(), s.end(), rng);
    CHECK(detect_script(to_utf8(s)).dominant == Script::Latin);
  }
}

TEST_CASE("validate_contact") {
  CHECK(validate_contact("a@b.co").valid);
  auto ws = validate_contact("a b@c.d");
  CHECK_FALSE(ws.valid);
  CHECK(ws.violation->find("whitespace") != std::string::npos);
  CHECK_FALSE(validate_contact("a@b").valid);
  CHECK_FALSE(validate_contact("").valid);
  CHECK_FALSE(validate_contact("@b.co").valid);
  CHECK_FALSE(validate_contact("a@@b.co").valid);
  CHECK_FALSE(validate_contact("a@b@c.co").valid);
  CHECK_FALSE(validate_contact("a@b..co").valid);
  CHECK_FALSE(validate_contact("a@.b.co").valid);
  CHECK_FALSE(validate_contact("a@b.co.").valid);
  CHECK(validate_contact("іван@приклад.укр").valid);

  std::string local(242, 'x');
  CHECK(validate_contact(local + "@example.com").valid);  // 254
  CHECK_FALSE(validate_contact(local + "x@example.com").valid);
}

TEST_CASE("confusable_fold") {
  FoldTable leet;
  leet.set(U'0', U"o");
  leet.set(U'1', U"i");
  CHECK(confusable_fold(std::string_view("j0hn.sm1th"), leet) == "john.smith");

  FoldTable conf;
  conf.set(U'і', U"i");
  CHECK(confusable_fold(std::string_view("іvan.petrenko"), conf) == "ivan.petrenko");

  CHECK(confusable_fold(std::string_view("john.smith"), FoldTable{}) == "john.smith");
}

TEST_CASE("fold table parsing") {
  auto t = FoldTable::parse("# comment\n0030\to\n\nU+0456\ti\n", "t.tsv");
  CHECK(t.size() == 2);
  CHECK(*t.find(U'0') == U"o");
  CHECK(*t.find(U'і') == U"i");

  auto expect_line = [](std::string_view content, std::string_view needle) {
    try {
      FoldTable::parse(content, "bad.tsv");
      FAIL("expected a parse error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_line("0030\to\nzz\tq\n", "bad.tsv: line 2");
  expect_line("# c\n0030\n", "line 2: expected 2 fields");
  expect_line("0030\t\n", "line 1: empty replacement");
  expect_line("D800\tx\n", "out of range");
  expect_line("0030\to\n0030\tq\n", "line 2");
}

TEST_CASE("shipped fold tables") {
  FoldTable leet = FoldTable::load(shipped_table_dir() / "leet.tsv");
  FoldTable conf = FoldTable::load(shipped_table_dir() / "confusables.tsv");
  CHECK(*leet.find(U'0') == U"o");
  CHECK(*leet.find(U'1') == U"i");
  CHECK(*leet.find(U'4') == U"a");
  CHECK(*conf.find(U'і') == U"i");
  FoldTable merged = load_fold_tables(shipped_table_dir());
  CHECK(merged.size() == leet.size() + conf.size());
  CHECK(leet.is_stable());
  CHECK(conf.is_stable());
  CHECK(merged.is_stable());

  for (const auto& [from, to] : merged.entries()) {
    // Keys are in normalized form, otherwise they could never apply.
    CHECK(to_u32(normalize(to_utf8(std::u32string(1, from)))) == std::u32string(1, from));
  }

  testing::Rng rng(13);
  for (int i = 0; i < 2000; ++i) {
    std::string n = normalize(testing::fuzz_string(rng));
    std::string once = confusable_fold(std::string_view(n), merged);
    CHECK(confusable_fold(std::string_view(once), merged) == once);
  }
}

TEST_CASE("unstable tables are detected") {
  FoldTable t;
  t.set(U'a', U"b");
  t.set(U'b', U"c");
  CHECK_FALSE(t.is_stable());
  CHECK_THROWS_AS(t.set(U'a', U"c"), Error);
  FoldTable other;
  other.set(U'a', U"z");
  CHECK_THROWS_AS(t.merged_with(other), Error);
}
