#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "nameguard/errors.hpp"
#include "nameguard/persistence.hpp"
#include "support/universe.hpp"

#include <fstream>
#include <sstream>

using namespace nameguard;
using namespace nameguard::store;
namespace fs = std::filesystem;

namespace {

text::FoldTable shipped() { return text::load_fold_tables(text::shipped_table_dir()); }

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream(p, std::ios::binary) << content;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string load_error(const fs::path& dir) {
  try {
    load(dir, shipped());
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    return e.what();
  }
  FAIL("expected a parse error");
  return {};
}

const std::vector<std::string> kProbes = {"Ivan.Petrenko", "spam.lord", "Troll.King", "іvan.petrenko",
                                          "a b", ""};

}  // namespace

TEST_CASE("missing directory loads as an empty store") {
  auto dir = testing::fresh_temp_dir("missing") / "nope";
  StoreState s = load(dir, shipped());
  CHECK(s.revision() == 0);
  CHECK(s.registry().empty());
}

TEST_CASE("round trip preserves query answers and revision") {
  testing::Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    LexiconStores stores(shipped());
    testing::populate(stores, rng, 3, 2, 5);
    auto snap = stores.snapshot();
    auto dir = testing::fresh_temp_dir("rt");
    save(*snap, dir);
    StoreState loaded = load(dir, shipped());
    CHECK(loaded.revision() == snap->revision());
    CHECK(testing::query_report(loaded, kProbes) == testing::query_report(*snap, kProbes));
    CHECK(loaded.skeleton_index() == snap->skeleton_index());

    // Saving the loaded copy reproduces the files byte for byte.
    auto again = testing::fresh_temp_dir("rt2");
    save(loaded, again);
    for (const char* f : kStoreFiles) CHECK(read_file(dir / f) == read_file(again / f));
    fs::remove_all(dir);
    fs::remove_all(again);
  }
}

TEST_CASE("loaded stores continue the id sequence") {
  LexiconStores stores(shipped());
  testing::Rng rng(4);
  testing::populate(stores, rng, 0, 0, 3);
  auto dir = testing::fresh_temp_dir("ids");
  save(*stores.snapshot(), dir);
  LexiconStores reloaded(load(dir, shipped()));
  std::string id = reloaded.write([](StoreWriter& w) { return w.allocate_id("u"); });
  CHECK(reloaded.snapshot()->record(id) == nullptr);
  CHECK(reloaded.snapshot()->account(id) == nullptr);
}

TEST_CASE("comment lines are ignored") {
  auto dir = testing::fresh_temp_dir("comments");
  write_file(dir / "prohibited.tsv", "# term\tcategory\tseverity\nspam\tads\treject\n# trailing\n");
  StoreState s = load(dir, shipped());
  CHECK(s.prohibited().size() == 1);
  CHECK(s.prohibited().at("spam").category == "ads");
}

TEST_CASE("malformed lines name the file and line") {
  auto dir = testing::fresh_temp_dir("bad");
  write_file(dir / "registry.tsv",
             "# id\traw\tnormalized\tskeleton\tcreated_at\n"
             "u1\tIvan.Petrenko\tivan.petrenko\tivan.petrenko\t2020-01-01T00:00:00Z\n"
             "u2\tPetro.Ivanenko\n");
  std::string msg = load_error(dir);
  CHECK(msg.find("registry.tsv") != std::string::npos);
  CHECK(msg.find("line 3: expected 5 fields") != std::string::npos);

  fs::remove(dir / "registry.tsv");
  write_file(dir / "prohibited.tsv", "spam\tads\tmaybe\n");
  CHECK(load_error(dir).find("prohibited.tsv: line 1: unknown severity") != std::string::npos);

  write_file(dir / "prohibited.tsv", "spam\tads\treject\textra\n");
  CHECK(load_error(dir).find("line 1: expected 3 fields") != std::string::npos);

  fs::remove(dir / "prohibited.tsv");
  write_file(dir / "blacklist.tsv", "\n\ntroll.king\t4\tyesterday\tabuse\n");
  CHECK(load_error(dir).find("blacklist.tsv: line 3") != std::string::npos);

  write_file(dir / "blacklist.tsv", "troll.king\t9\t2020-01-01T00:00:00Z\tabuse\n");
  CHECK(load_error(dir).find("blacklist.tsv: line 1") != std::string::npos);

  write_file(dir / "blacklist.tsv", "troll.king\t4\t2020-01-01T00:00:00Z\tbad\\qescape\n");
  CHECK(load_error(dir).find("unknown escape") != std::string::npos);
}

TEST_CASE("accounts must reference known usernames") {
  auto dir = testing::fresh_temp_dir("refs");
  write_file(dir / "accounts.tsv", "a1\tu404\t0\tverified\t2020-01-01T00:00:00Z\t\n");
  std::string msg = load_error(dir);
  CHECK(msg.find("accounts.tsv: line 1") != std::string::npos);
  CHECK(msg.find("u404") != std::string::npos);
}

TEST_CASE("account file format") {
  LexiconStores stores(shipped());
  stores.write([](StoreWriter& w) {
    w.upsert_record({"u1", "Ivan.Petrenko", "", "", {}, Timestamp{0}});
    Account a;
    a.id = "a1";
    a.username_id = "u1";
    a.contacts = {{ContactKind::Email, "ivan@example.com", true}, {ContactKind::Other, "tel;+380", false}};
    a.registered_at = Timestamp{86400};
    a.status = AccountStatus::CorrectedKeptName;
    w.upsert_account(a);
  });
  auto dir = testing::fresh_temp_dir("acct");
  save(*stores.snapshot(), dir);
  std::string content = read_file(dir / "accounts.tsv");
  CHECK(content.find("a1\tu1\t1\tcorrected_kept_name\t1970-01-02T00:00:00Z\t"
                     "email*=ivan@example.com;other=tel\\\\;+380\n") != std::string::npos);
  StoreState loaded = load(dir, shipped());
  CHECK(*loaded.account("a1") == *stores.snapshot()->account("a1"));
}

TEST_CASE("anonymity level must agree with the contacts") {
  auto dir = testing::fresh_temp_dir("level");
  write_file(dir / "registry.tsv", "u1\tIvan.Petrenko\tivan.petrenko\tivan.petrenko\t2020-01-01T00:00:00Z\n");
  write_file(dir / "accounts.tsv", "a1\tu1\t2\tverified\t2020-01-01T00:00:00Z\temail*=a@b.co\n");
  CHECK(load_error(dir).find("accounts.tsv: line 1: anonymity level 2") != std::string::npos);
}

TEST_CASE("stale derived columns are recomputed from raw") {
  auto dir = testing::fresh_temp_dir("derived");
  write_file(dir / "registry.tsv", "u1\tІvan.Petrenko\tstale\tstale\t2020-01-01T00:00:00Z\n");
  StoreState s = load(dir, shipped());
  CHECK(s.record("u1")->normalized == "іvan.petrenko");
  CHECK(s.record("u1")->skeleton == "ivan.petrenko");
  CHECK(s.skeleton_index().at("ivan.petrenko").count("u1") == 1);
}
