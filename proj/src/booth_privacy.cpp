#include "aov/booth_privacy.hpp"

#include <cmath>
#include <limits>

#include "aov/error.hpp"

namespace aov {
namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::kInvalidParams, "probability must be in [0, 1]");
}

std::uint64_t booth_count(std::uint64_t electorate, std::uint64_t booth_size) {
  return (electorate + booth_size - 1) / booth_size;
}

}  // namespace

double binom_pmf(std::uint64_t n, std::uint64_t x, double p) {
  check_probability(p);
  if (x > n) throw Error(ErrorCode::kInvalidParams, "x must not exceed n");
  if (p == 0.0) return x == 0 ? 1.0 : 0.0;
  if (p == 1.0) return x == n ? 1.0 : 0.0;
  const double dn = static_cast<double>(n);
  const double dx = static_cast<double>(x);
  const double log_choose = std::lgamma(dn + 1) - std::lgamma(dx + 1) - std::lgamma(dn - dx + 1);
  return std::exp(log_choose + dx * std::log(p) + (dn - dx) * std::log1p(-p));
}

double all_same_prob(std::uint64_t n, double p, UnanimityMode mode) {
  check_probability(p);
  const double winner = binom_pmf(n, n, p);
  if (mode == UnanimityMode::kWinnerOnly) return winner;
  return winner + binom_pmf(n, 0, p);
}

double expected_exposed_booths(std::uint64_t electorate, std::uint64_t booth_size, double p,
                               UnanimityMode mode) {
  if (booth_size == 0) throw Error(ErrorCode::kInvalidParams, "booth size must be >= 1");
  return static_cast<double>(booth_count(electorate, booth_size)) *
         all_same_prob(booth_size, p, mode);
}

std::uint64_t recommend_booth_size(std::uint64_t electorate, double p, double max_expected_exposed,
                                   UnanimityMode mode) {
  if (!(max_expected_exposed > 0)) {
    throw Error(ErrorCode::kInvalidParams, "bound must be positive");
  }
  if (electorate == 0) throw Error(ErrorCode::kInvalidParams, "electorate must be >= 1");
  auto ok = [&](std::uint64_t n) {
    return expected_exposed_booths(electorate, n, p, mode) <= max_expected_exposed;
  };
  if (ok(1)) return 1;
  // Doubling: find hi with ok(hi), lo with !ok(lo).
  std::uint64_t lo = 1;
  std::uint64_t hi = 2;
  while (hi < electorate && !ok(hi)) {
    lo = hi;
    hi *= 2;
  }
  if (hi >= electorate) {
    hi = electorate;
    if (!ok(hi)) {
      throw Error(ErrorCode::kUnsatisfiable, "no booth size up to the electorate meets the bound");
    }
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (ok(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<std::pair<std::uint64_t, double>> pmf_curve(std::uint64_t n, double p) {
  std::vector<std::pair<std::uint64_t, double>> out;
  out.reserve(n + 1);
  for (std::uint64_t x = 0; x <= n; ++x) out.emplace_back(x, binom_pmf(n, x, p));
  return out;
}

double compensated_sum(const std::vector<double>& values) {
  double sum = 0.0;
  double carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  }
  return sum + carry;
}

}  // namespace aov
