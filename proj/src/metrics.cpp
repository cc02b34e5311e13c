#include "nameguard/metrics.hpp"

#include "nameguard/errors.hpp"

#include <cstdio>
#include <vector>

namespace nameguard::metrics {

double efficiency(const EfficiencyInput& input) {
  if (input.n_low_adequacy > input.n_verified) {
    throw Error(ErrorKind::InvalidArgument, "invariant_violation",
                "low-adequacy count " + std::to_string(input.n_low_adequacy) +
                    " exceeds verified count " + std::to_string(input.n_verified));
  }
  if (input.n_low_adequacy == input.n_verified) {
    throw Error(ErrorKind::Domain, "efficiency_undefined",
                "efficiency requires N_ver != N_low (both are " +
                    std::to_string(input.n_verified) + ")");
  }
  return static_cast<double>(input.n_verified) /
         static_cast<double>(input.n_verified - input.n_low_adequacy);
}

EfficiencyInput efficiency_input(const store::StoreState& snapshot) {
  EfficiencyInput input;
  for (const auto& [id, account] : snapshot.accounts()) {
    ++input.n_verified;
    if (account.status == AccountStatus::UnderModeration || snapshot.has_open_flag(id)) {
      ++input.n_low_adequacy;
    }
  }
  return input;
}

Category category_of(AccountStatus status) {
  switch (status) {
    case AccountStatus::Verified: return Category::Reliable;
    case AccountStatus::Corrected: return Category::Updated;
    case AccountStatus::CorrectedKeptName: return Category::UpdatedKeptName;
    case AccountStatus::Blocked: return Category::Blocked;
    case AccountStatus::UnderModeration: return Category::UnderModeration;
  }
  return Category::UnderModeration;
}

std::string_view to_token(Category category) {
  switch (category) {
    case Category::Reliable: return "reliable";
    case Category::Updated: return "updated";
    case Category::UpdatedKeptName: return "updated_kept_name";
    case Category::Blocked: return "blocked";
    case Category::UnderModeration: return "under_moderation";
  }
  return "unknown";
}

int rounded_percent(std::uint64_t count, std::uint64_t total) {
  // floor(100c/t + 1/2) for non-negative counts.
  return static_cast<int>((200 * count + total) / (2 * total));
}

ClassificationReport classify_accounts(std::span<const Account> accounts) {
  if (accounts.empty()) {
    throw Error(ErrorKind::Domain, "no_accounts", "classification needs at least one account");
  }
  ClassificationReport report;
  for (Category c : kAllCategories) report.counts[c] = 0;
  for (const Account& a : accounts) ++report.counts[category_of(a.status)];
  report.total = accounts.size();
  for (const auto& [c, n] : report.counts) report.percentages[c] = rounded_percent(n, report.total);
  return report;
}

ClassificationReport classify_accounts(const store::StoreState& snapshot) {
  std::vector<Account> accounts;
  accounts.reserve(snapshot.accounts().size());
  for (const auto& [id, a] : snapshot.accounts()) accounts.push_back(a);
  return classify_accounts(accounts);
}

std::string to_text(const ClassificationReport& report, std::optional<double> efficiency) {
  std::string out;
  char line[128];
  std::snprintf(line, sizeof line, "%-20s %10s %8s\n", "category", "accounts", "percent");
  out += line;
  for (Category c : kAllCategories) {
    std::snprintf(line, sizeof line, "%-20s %10llu %7d%%\n", std::string(to_token(c)).c_str(),
                  static_cast<unsigned long long>(report.counts.at(c)), report.percentages.at(c));
    out += line;
  }
  std::snprintf(line, sizeof line, "%-20s %10llu\n", "total",
                static_cast<unsigned long long>(report.total));
  out += line;
  if (efficiency) {
    std::snprintf(line, sizeof line, "%-20s %10.6g\n", "efficiency", *efficiency);
    out += line;
  }
  return out;
}

}  // namespace nameguard::metrics
