#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "aov/trigger.hpp"

namespace aov {

enum class AdversaryMode { kNone, kRetryNoVdf, kWithholdWithVdf };
enum class ArrivalModel { kDeterministic, kPoisson };

std::string to_string(AdversaryMode mode);
AdversaryMode adversary_mode_from_string(const std::string& s);

struct SimConfig {
  std::uint64_t rng_seed = 1;
  double horizon_minutes = 525600.0;
  double block_time_mean = 10.0;
  EpochSchedule schedule;
  double adversary_share = 0.0;  // alpha: fraction of hash power held by the adversary
  AdversaryMode adversary_mode = AdversaryMode::kNone;
  std::uint32_t a_max = 10;
  std::uint32_t retries = 0;       // R in retry-no-vdf mode; 0 means a_max
  std::uint64_t block_count = 0;   // adversary sim length; 0 means horizon / block_time_mean
  std::uint32_t prover_count = 10;
  double prover_job_minutes = 100.0;
  ArrivalModel arrivals = ArrivalModel::kDeterministic;
  std::uint32_t maturity_lag = 6;  // blocks between mining and delivery to the validator
  bool withhold = true;            // withhold-with-vdf: drop non-triggering candidates

  void validate() const;
  std::uint32_t effective_retries() const { return retries == 0 ? a_max : retries; }
};

struct EpochSample {
  std::uint64_t epoch_index = 0;
  std::uint64_t length_blocks = 0;
  double length_minutes = 0.0;
  bool triggered_by_adversary = false;
};

/// Poisson block arrivals; each processed header ends the epoch with probability
/// 1/trigger_modulus(schedule). Only epochs completed inside the horizon are returned.
std::vector<EpochSample> run_epoch_sim(const SimConfig& config);

struct AdversaryReport {
  AdversaryMode mode = AdversaryMode::kNone;
  std::uint64_t blocks = 0;
  std::uint64_t adversary_blocks = 0;   // heights the adversary won
  std::uint64_t adversary_triggers = 0; // epoch ends on adversary-published blocks
  std::uint64_t honest_blocks = 0;
  std::uint64_t honest_triggers = 0;
  std::uint64_t withheld = 0;
  std::uint64_t modulus = 1;
  double alpha = 0.0;
  std::uint32_t retries = 0;

  double baseline_rate() const { return 1.0 / static_cast<double>(modulus); }
  /// Triggers per adversary-won block.
  double adversary_trigger_rate() const;
  double honest_trigger_rate() const;
  /// Adversary triggers per block, to compare with alpha / m.
  double adversary_rate_per_block() const;
  /// Share of all epoch ends that came from adversary blocks, to compare with alpha.
  double adversary_trigger_fraction() const;
  std::vector<EpochSample> epochs;
};

AdversaryReport run_adversary_sim(const SimConfig& config);

struct BusyInterval {
  double start = 0.0;
  double end = 0.0;
  std::uint64_t job = 0;
};

struct FleetStats {
  std::uint64_t max_queue_length = 0;
  double max_wait_minutes = 0.0;
  double mean_wait_minutes = 0.0;
  std::vector<double> utilization;              // busy fraction of [0, horizon] per prover
  std::vector<std::vector<BusyInterval>> busy;  // per prover, in start order
  std::vector<std::pair<double, std::uint64_t>> queue_samples;  // (arrival time, waiting jobs)
  std::uint64_t jobs = 0;
  std::uint64_t final_queue_length = 0;  // jobs arrived but not started by the horizon
};

/// Block arrivals feed a FIFO queue served by the first idle prover (lowest index on ties).
FleetStats run_prover_schedule(const SimConfig& config);

struct HistogramBin {
  std::uint64_t lo = 0;  // inclusive
  std::uint64_t hi = 0;  // inclusive; UINT64_MAX for the open tail
  std::uint64_t observed = 0;
  double expected = 0.0;
};

struct EpochStats {
  std::uint64_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  std::vector<HistogramBin> histogram;  // bins of the geometric fit
  double chi_square = 0.0;
  int dof = 0;
  std::optional<double> p_value;  // absent when dof < 1
};

/// Statistics of epoch lengths in blocks, with a chi-square fit against a geometric law
/// whose parameter is estimated as 1/mean.
EpochStats summarize(const std::vector<EpochSample>& samples);
EpochStats summarize_lengths(const std::vector<std::uint64_t>& lengths);

namespace detail {

double uniform01(std::mt19937_64& rng);
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound);
double exponential(std::mt19937_64& rng, double mean);

}  // namespace detail

}  // namespace aov
