#include "aov/sim.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "aov/error.hpp"

namespace aov {

namespace detail {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Rejection sampling keeps this identical across standard libraries.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = 0;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

double exponential(std::mt19937_64& rng, double mean) {
  return -mean * std::log1p(-uniform01(rng));
}

}  // namespace detail

namespace {

using detail::exponential;
using detail::uniform01;
using detail::uniform_below;

bool trigger_draw(std::mt19937_64& rng, std::uint64_t m) { return uniform_below(rng, m) == 0; }

}  // namespace

std::string to_string(AdversaryMode mode) {
  switch (mode) {
    case AdversaryMode::kNone: return "none";
    case AdversaryMode::kRetryNoVdf: return "retry-no-vdf";
    case AdversaryMode::kWithholdWithVdf: return "withhold-with-vdf";
  }
  return "none";
}

AdversaryMode adversary_mode_from_string(const std::string& s) {
  if (s == "none") return AdversaryMode::kNone;
  if (s == "retry-no-vdf") return AdversaryMode::kRetryNoVdf;
  if (s == "withhold-with-vdf") return AdversaryMode::kWithholdWithVdf;
  throw Error(ErrorCode::kInvalidParams, "unknown adversary mode: " + s);
}

void SimConfig::validate() const {
  schedule.validate();
  if (!(adversary_share >= 0.0 && adversary_share < 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "adversary share must be in [0, 1)");
  }
  if (prover_count < 1) throw Error(ErrorCode::kInvalidParams, "prover_count must be >= 1");
  if (!(horizon_minutes > 0) || !(block_time_mean > 0) || !(prover_job_minutes > 0)) {
    throw Error(ErrorCode::kInvalidParams, "times must be positive");
  }
  if (a_max < 1) throw Error(ErrorCode::kInvalidParams, "a_max must be >= 1");
}

std::vector<EpochSample> run_epoch_sim(const SimConfig& config) {
  config.validate();
  if (config.adversary_mode != AdversaryMode::kNone) {
    throw Error(ErrorCode::kInvalidParams, "run_epoch_sim models honest mining only");
  }
  const std::uint64_t m = trigger_modulus(config.schedule);
  const auto stride = static_cast<std::uint64_t>(config.schedule.stride);
  std::mt19937_64 rng(config.rng_seed);

  std::vector<double> block_times;
  for (double t = exponential(rng, config.block_time_mean); t <= config.horizon_minutes;
       t += exponential(rng, config.block_time_mean)) {
    block_times.push_back(t);
  }

  std::vector<EpochSample> out;
  std::uint64_t last_height = 0;
  double last_time = 0.0;
  for (std::uint64_t height = 1; height <= block_times.size(); ++height) {
    if (height % stride != 0) continue;
    if (!trigger_draw(rng, m)) continue;
    // The validator only sees the header once it has matured.
    const std::uint64_t seen_at = height + config.maturity_lag;
    if (seen_at > block_times.size()) break;
    const double seen_time = block_times[seen_at - 1];
    out.push_back(EpochSample{out.size(), height - last_height, seen_time - last_time, false});
    last_height = height;
    last_time = seen_time;
  }
  return out;
}

double AdversaryReport::adversary_trigger_rate() const {
  return adversary_blocks == 0 ? 0.0
                               : static_cast<double>(adversary_triggers) / adversary_blocks;
}

double AdversaryReport::honest_trigger_rate() const {
  return honest_blocks == 0 ? 0.0 : static_cast<double>(honest_triggers) / honest_blocks;
}

double AdversaryReport::adversary_rate_per_block() const {
  return blocks == 0 ? 0.0 : static_cast<double>(adversary_triggers) / blocks;
}

double AdversaryReport::adversary_trigger_fraction() const {
  const std::uint64_t total = adversary_triggers + honest_triggers;
  return total == 0 ? 0.0 : static_cast<double>(adversary_triggers) / total;
}

AdversaryReport run_adversary_sim(const SimConfig& config) {
  config.validate();
  if (config.adversary_mode == AdversaryMode::kNone) {
    throw Error(ErrorCode::kInvalidParams, "run_adversary_sim needs an adversary mode");
  }
  AdversaryReport report;
  report.mode = config.adversary_mode;
  report.modulus = trigger_modulus(config.schedule);
  report.alpha = config.adversary_share;
  report.retries = config.adversary_mode == AdversaryMode::kRetryNoVdf ? config.effective_retries() : 1;
  report.blocks = config.block_count != 0
                      ? config.block_count
                      : static_cast<std::uint64_t>(config.horizon_minutes / config.block_time_mean);
  const std::uint64_t m = report.modulus;
  const auto stride = static_cast<std::uint64_t>(config.schedule.stride);
  std::mt19937_64 rng(config.rng_seed);

  std::uint64_t last_end = 0;
  for (std::uint64_t height = 1; height <= report.blocks; ++height) {
    const bool processed = height % stride == 0;
    const bool adversary_won = uniform01(rng) < config.adversary_share;
    bool triggered = false;
    bool by_adversary = false;
    if (adversary_won) {
      ++report.adversary_blocks;
      if (config.adversary_mode == AdversaryMode::kRetryNoVdf) {
        // Without a delay she sees each candidate's outcome instantly and regrinds.
        for (std::uint32_t i = 0; i < report.retries && !triggered; ++i) {
          triggered = processed && trigger_draw(rng, m);
        }
        by_adversary = triggered;
      } else {
        // One evaluated candidate. Withholding a loser hands the height to the honest chain,
        // which has published by the time her evaluation finishes.
        triggered = processed && trigger_draw(rng, m);
        by_adversary = triggered;
        if (!triggered && config.withhold) {
          ++report.withheld;
          ++report.honest_blocks;
          triggered = processed && trigger_draw(rng, m);
          if (triggered) ++report.honest_triggers;
        }
      }
      if (by_adversary) ++report.adversary_triggers;
    } else {
      ++report.honest_blocks;
      triggered = processed && trigger_draw(rng, m);
      if (triggered) ++report.honest_triggers;
    }
    if (triggered) {
      report.epochs.push_back(EpochSample{report.epochs.size(), height - last_end,
                                          (height - last_end) * config.block_time_mean,
                                          by_adversary});
      last_end = height;
    }
  }
  return report;
}

FleetStats run_prover_schedule(const SimConfig& config) {
  config.validate();
  std::mt19937_64 rng(config.rng_seed);
  std::vector<double> arrivals;
  if (config.arrivals == ArrivalModel::kDeterministic) {
    for (std::uint64_t k = 0;; ++k) {
      const double t = static_cast<double>(k) * config.block_time_mean;
      if (t >= config.horizon_minutes) break;
      arrivals.push_back(t);
    }
  } else {
    for (double t = exponential(rng, config.block_time_mean); t < config.horizon_minutes;
         t += exponential(rng, config.block_time_mean)) {
      arrivals.push_back(t);
    }
  }

  FleetStats stats;
  stats.jobs = arrivals.size();
  stats.busy.resize(config.prover_count);
  stats.utilization.assign(config.prover_count, 0.0);
  std::vector<double> free_at(config.prover_count, 0.0);
  std::vector<double> starts;
  starts.reserve(arrivals.size());
  double total_wait = 0.0;

  for (std::uint64_t job = 0; job < arrivals.size(); ++job) {
    const double arrival = arrivals[job];
    std::size_t chosen = config.prover_count;
    for (std::size_t i = 0; i < free_at.size(); ++i) {
      if (free_at[i] <= arrival) {
        chosen = i;
        break;
      }
    }
    if (chosen == config.prover_count) {
      chosen = static_cast<std::size_t>(
          std::min_element(free_at.begin(), free_at.end()) - free_at.begin());
    }
    const double start = std::max(arrival, free_at[chosen]);
    const double end = start + config.prover_job_minutes;
    free_at[chosen] = end;
    stats.busy[chosen].push_back(BusyInterval{start, end, job});
    starts.push_back(start);
    const double wait = start - arrival;
    total_wait += wait;
    stats.max_wait_minutes = std::max(stats.max_wait_minutes, wait);
    const double lo = std::min(start, config.horizon_minutes);
    const double hi = std::min(end, config.horizon_minutes);
    stats.utilization[chosen] += hi - lo;
  }
  for (double& u : stats.utilization) u /= config.horizon_minutes;
  stats.mean_wait_minutes = arrivals.empty() ? 0.0 : total_wait / arrivals.size();

  // FIFO with equal job lengths starts jobs in arrival order, so `starts` is sorted.
  std::size_t started = 0;
  for (std::uint64_t job = 0; job < arrivals.size(); ++job) {
    const double t = arrivals[job];
    while (started < starts.size() && starts[started] <= t) ++started;
    const std::uint64_t waiting = job + 1 - std::min<std::uint64_t>(started, job + 1);
    stats.queue_samples.emplace_back(t, waiting);
    stats.max_queue_length = std::max(stats.max_queue_length, waiting);
  }
  stats.final_queue_length = static_cast<std::uint64_t>(
      std::count_if(starts.begin(), starts.end(),
                    [&](double s) { return s >= config.horizon_minutes; }));
  return stats;
}

EpochStats summarize(const std::vector<EpochSample>& samples) {
  std::vector<std::uint64_t> lengths;
  lengths.reserve(samples.size());
  for (const auto& s : samples) lengths.push_back(s.length_blocks);
  return summarize_lengths(lengths);
}

EpochStats summarize_lengths(const std::vector<std::uint64_t>& lengths) {
  if (lengths.empty()) throw Error(ErrorCode::kEmptySamples, "no epoch samples to summarize");
  EpochStats st;
  st.count = lengths.size();
  const double n = static_cast<double>(st.count);
  double sum = 0.0;
  for (auto v : lengths) sum += static_cast<double>(v);
  st.mean = sum / n;
  double sq = 0.0;
  for (auto v : lengths) sq += (v - st.mean) * (v - st.mean);
  st.variance = st.count > 1 ? sq / (n - 1) : 0.0;
  st.min = *std::min_element(lengths.begin(), lengths.end());
  st.max = *std::max_element(lengths.begin(), lengths.end());

  // Geometric law on {1, 2, ...}: F(k) = 1 - (1-p)^k. Bin edges at roughly equal
  // probability so every bin carries a useful expected count.
  const double p = std::min(1.0, 1.0 / st.mean);
  auto cdf = [&](std::uint64_t k) {
    if (p >= 1.0) return 1.0;
    return -std::expm1(static_cast<double>(k) * std::log1p(-p));
  };
  const int target_bins =
      static_cast<int>(std::clamp<std::uint64_t>(st.count / 5, 2, 20));
  std::vector<std::uint64_t> edges;  // inclusive upper edges of all but the tail bin
  if (p < 1.0) {
    for (int i = 1; i < target_bins; ++i) {
      const double c = static_cast<double>(i) / target_bins;
      const auto k = static_cast<std::uint64_t>(
          std::max(1.0, std::ceil(std::log1p(-c) / std::log1p(-p))));
      if (edges.empty() || k > edges.back()) edges.push_back(k);
    }
  }
  std::uint64_t lo = 1;
  for (std::uint64_t hi : edges) {
    st.histogram.push_back(HistogramBin{lo, hi, 0, n * (cdf(hi) - cdf(lo - 1))});
    lo = hi + 1;
  }
  st.histogram.push_back(
      HistogramBin{lo, std::numeric_limits<std::uint64_t>::max(), 0, n * (1.0 - cdf(lo - 1))});
  for (auto v : lengths) {
    for (auto& bin : st.histogram) {
      if (v >= bin.lo && v <= bin.hi) {
        ++bin.observed;
        break;
      }
    }
  }
  for (const auto& bin : st.histogram) {
    if (bin.expected > 0) {
      const double d = static_cast<double>(bin.observed) - bin.expected;
      st.chi_square += d * d / bin.expected;
    } else if (bin.observed > 0) {
      st.chi_square = std::numeric_limits<double>::infinity();
    }
  }
  st.dof = static_cast<int>(st.histogram.size()) - 2;
  if (st.dof >= 1) {
    st.p_value = std::isinf(st.chi_square)
                     ? 0.0
                     : boost::math::gamma_q(st.dof / 2.0, st.chi_square / 2.0);
  }
  return st;
}

}  // namespace aov
