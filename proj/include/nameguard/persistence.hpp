#pragma once

#include "nameguard/stores.hpp"

#include <filesystem>

// Plain-text table storage: one TSV file per table, UTF-8, LF endings,
// '#' comment lines ignored.
//
//   prohibited.tsv  term, category, severity (reject|flag)
//   blacklist.tsv   normalized_name, sanction_code, created_at, reason
//   registry.tsv    id, raw, normalized, skeleton, created_at
//   accounts.tsv    id, username_id, anonymity_level, status, registered_at, contacts
//   deviations.tsv  id, account_id, rule_code, sanction_code, created_at, note
//   meta.tsv        revision
//
// Field text escapes backslash, TAB, LF and CR as \\, \t, \n, \r. Contacts
// are ';'-joined "kind=value" pairs; a verified contact writes its kind with
// a trailing '*', and ';' inside a value is written as "\;".
namespace nameguard::store {

inline constexpr const char* kStoreFiles[] = {"prohibited.tsv", "blacklist.tsv", "registry.tsv",
                                              "accounts.tsv", "deviations.tsv", "meta.tsv"};

// Creates the directory if needed; each file is replaced atomically.
void save(const StoreState& state, const std::filesystem::path& dir);

// Missing directory or files load as empty tables. Malformed input throws
// Error(Parse) naming the file and 1-based line. Normalized forms and
// skeletons are recomputed with `table`.
StoreState load(const std::filesystem::path& dir, text::FoldTable table);

}  // namespace nameguard::store
