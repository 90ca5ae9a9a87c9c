#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace aov {

enum class UnanimityMode {
  kWinnerOnly,   // p^n: every member chose the favoured candidate
  kGeneralized,  // p^n + (1-p)^n: unanimity for either side of a two-way split
};

struct BoothPrivacyQuery {
  std::uint64_t booth_size = 1;
  double winning_probability = 0.5;
  std::uint64_t electorate = 1;
  double max_expected_exposed = 1.0;
};

/// C(n, x) p^x (1-p)^(n-x), evaluated in log space.
double binom_pmf(std::uint64_t n, std::uint64_t x, double p);

double all_same_prob(std::uint64_t n, double p, UnanimityMode mode = UnanimityMode::kWinnerOnly);

/// ceil(N / n) booths, each exposed with all_same_prob(n, p).
double expected_exposed_booths(std::uint64_t electorate, std::uint64_t booth_size, double p,
                               UnanimityMode mode = UnanimityMode::kWinnerOnly);

/// Smallest booth size whose expected exposed-booth count is within the bound. Doubling then
/// bisection; throws Error(kUnsatisfiable) when no size up to the electorate qualifies.
std::uint64_t recommend_booth_size(std::uint64_t electorate, double p, double max_expected_exposed,
                                   UnanimityMode mode = UnanimityMode::kWinnerOnly);
inline std::uint64_t recommend_booth_size(const BoothPrivacyQuery& q,
                                          UnanimityMode mode = UnanimityMode::kWinnerOnly) {
  return recommend_booth_size(q.electorate, q.winning_probability, q.max_expected_exposed, mode);
}

/// (x, pmf) for x = 0..n.
std::vector<std::pair<std::uint64_t, double>> pmf_curve(std::uint64_t n, double p);

/// Neumaier-compensated sum.
double compensated_sum(const std::vector<double>& values);

}  // namespace aov
