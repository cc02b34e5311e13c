#pragma once

#include "nameguard/domain.hpp"
#include "nameguard/stores.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>

namespace nameguard::metrics {

struct EfficiencyInput {
  std::uint64_t n_verified = 0;      // accounts that went through verification
  std::uint64_t n_low_adequacy = 0;  // of those, accounts with low data adequacy
};

// n_verified / (n_verified - n_low_adequacy).
// Equal counts: Error(Domain, "efficiency_undefined").
// n_low_adequacy > n_verified: Error(InvalidArgument, "invariant_violation").
double efficiency(const EfficiencyInput& input);

// Every account counts as verified; low adequacy means UnderModeration or an
// unresolved flag.
EfficiencyInput efficiency_input(const store::StoreState& snapshot);

enum class Category { Reliable, Updated, UpdatedKeptName, Blocked, UnderModeration };

inline constexpr std::array kAllCategories = {Category::Reliable, Category::Updated,
                                              Category::UpdatedKeptName, Category::Blocked,
                                              Category::UnderModeration};

Category category_of(AccountStatus status);
std::string_view to_token(Category category);

struct ClassificationReport {
  std::uint64_t total = 0;
  std::map<Category, std::uint64_t> counts;  // all five categories present
  std::map<Category, int> percentages;
};

// round(100 * count / total), halves away from zero, in exact integer math.
int rounded_percent(std::uint64_t count, std::uint64_t total);

// Error(Domain, "no_accounts") on an empty set.
ClassificationReport classify_accounts(std::span<const Account> accounts);
ClassificationReport classify_accounts(const store::StoreState& snapshot);

// Plain-text table; efficiency rendered when given.
std::string to_text(const ClassificationReport& report, std::optional<double> efficiency = {});

}  // namespace nameguard::metrics
