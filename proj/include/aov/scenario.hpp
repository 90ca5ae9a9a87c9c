#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "aov/election.hpp"

namespace aov {

/// One accepted state-machine operation. `args` carries everything needed to re-apply it.
struct Event {
  std::uint64_t seq = 0;
  std::string op;
  nlohmann::json args;
  std::string args_digest;  // hex SHA-256 of args.dump()
  std::string state_hash;   // hex state hash after the operation

  nlohmann::json to_json() const;
  static Event from_json(const nlohmann::json& j);
};

std::string args_digest(const nlohmann::json& args);

void write_event_log(const std::filesystem::path& path, const std::vector<Event>& events);
/// Throws Error(kParse) naming the offending line.
std::vector<Event> read_event_log(const std::filesystem::path& path);

/// Applies one logged operation (setup, registration, voting, revote, bpo_add, vdf_add, tally)
/// to the election and returns an operation-specific result object.
nlohmann::json apply_command(Election& election, const std::string& op, const nlohmann::json& args);

/// Re-applies a log from scratch and checks every recorded digest and state hash.
/// Throws Error(kDivergence) naming the first diverging sequence number.
Hash256 replay(const std::vector<Event>& events);

struct ScenarioFailure {
  std::uint64_t seq = 0;  // sequence number the failing operation would have had
  ErrorCode code = ErrorCode::kScenarioInvalid;
  std::string message;
};

struct ScenarioResult {
  std::string name;
  std::vector<std::string> candidates;
  std::vector<TallyResult> tallies;
  std::vector<Event> events;
  std::uint32_t initial_winner = 0;
  std::uint32_t final_winner = 0;
  Hash256 final_state_hash{};
  std::uint64_t blocks_processed = 0;
  std::uint64_t tally_attempts = 0;
  std::vector<Notice> notices;
  nlohmann::json final_state;  // canonical election state at the end of the run
  std::optional<ScenarioFailure> failure;
};

/// Parses scenario text; syntax and schema problems raise Error(kScenarioInvalid) with a line
/// number where one is known.
nlohmann::json parse_scenario(const std::string& text);
nlohmann::json load_scenario(const std::filesystem::path& path);
/// Structural checks (types, names, references). Throws Error(kScenarioInvalid).
void validate_scenario(const nlohmann::json& scenario);
/// AOV_SEED, when set, replaces the scenario's rng_seed.
std::optional<std::uint64_t> seed_from_env();

/// Runs a scenario end to end: setup, scripted registration and voting, then per delivered
/// header bpo_add, vdf_add and a tally attempt. Contract errors stop the run and are returned in
/// `failure`; invalid scenarios throw Error(kScenarioInvalid).
/// `base_dir` resolves relative header-file paths.
ScenarioResult run_scenario(const nlohmann::json& scenario,
                            const std::filesystem::path& base_dir = {});

/// Writes events.jsonl, tallies.csv, final_state.json and summary.json.
void write_scenario_outputs(const ScenarioResult& result, const std::filesystem::path& out_dir);

std::string tallies_csv(const ScenarioResult& result);

}  // namespace aov
