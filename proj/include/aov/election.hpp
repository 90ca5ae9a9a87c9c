#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "aov/btc_header.hpp"
#include "aov/ec.hpp"
#include "aov/trigger.hpp"
#include "aov/vdf.hpp"
#include "aov/vote_protocol.hpp"
#include "aov/wallet.hpp"

namespace aov {

struct ElectionParams {
  std::string curve = "secp256k1";
  std::uint32_t candidate_count = 2;
  double supermajority_threshold = 0.70;
  double min_participation = 0.70;  // fraction of baseline_turnout
  std::uint32_t booth_rows = 1;     // X
  std::uint32_t booth_cols = 1;     // Y
  EpochSchedule schedule;
  Point ea_public_key;
  VdfParams vdf;
  Bytes seed;  // carried for parity with the contract parameters; not mixed into the trigger
  std::uint64_t baseline_turnout = 0;
  std::vector<std::uint64_t> baseline_tally;  // per candidate, from the last main election
  std::uint32_t incumbent = 0;
  bool main_election = false;
  std::string protocol = "plaintext";
  std::uint64_t booth_seed = 0;  // seeds the booth-assignment RNG

  std::uint32_t booth_count() const { return booth_rows * booth_cols; }
  const CurveParams& curve_params() const;
  void validate() const;
};

enum class AddressStatus { kPending, kValid, kVoted, kInvalid };
std::string to_string(AddressStatus s);

struct BoothState {
  std::uint32_t booth_no = 0;
  std::map<Address, AddressStatus> registry;
  std::map<Address, Bytes> votes;  // address -> blinded vote
};

struct ValidatorState {
  std::map<std::uint64_t, BlockHeader> headers;
  std::map<std::uint64_t, Target> targets;
  std::map<std::uint64_t, VdfCertificate> vdf_deposits;
  std::optional<std::uint64_t> blockheight_stored;
};

struct TallyResult {
  std::uint64_t epoch = 0;
  std::uint64_t triggered_at = 0;
  std::vector<std::vector<std::uint64_t>> per_booth;
  std::vector<std::uint64_t> totals;
  std::uint64_t turnout = 0;
  std::uint64_t rejected = 0;
  std::uint32_t previous_winner = 0;
  std::uint32_t winner = 0;

  bool winner_changed() const { return winner != previous_winner; }
};

struct TallyOutcome {
  TriggerVerdict verdict;
  std::optional<TallyResult> result;  // set iff the trigger fired

  bool triggered() const { return result.has_value(); }
};

/// Contract-side notices that are not errors, e.g. wallets an observer can now link.
struct Notice {
  std::string kind;
  std::uint64_t epoch = 0;
  std::string detail;
};

/// Main election: strict majority of turnout. Between main elections: a challenger needs a
/// share >= supermajority_threshold and turnout >= min_participation * baseline_turnout.
/// Otherwise the previous winner stays.
std::uint32_t apply_winner_rule(const std::vector<std::uint64_t>& totals, std::uint64_t turnout,
                                std::uint32_t prev_winner, const ElectionParams& params);

/// The registration, booth, validator and aggregator contracts as one single-writer state
/// machine. Every mutating call either succeeds completely or throws and leaves state as it was.
class Election {
 public:
  Election() = default;
  Election(const Election& other);
  Election& operator=(const Election& other);
  Election(Election&&) noexcept = default;
  Election& operator=(Election&&) noexcept = default;

  void setup(ElectionParams params);
  void registration(const Address& addr, bool valid, ByteView ea_signature);
  /// `pk` must hash to `addr`; the signature covers voting_message(addr, blinded, zkp).
  void voting(const Address& addr, const Point& pk, ByteView blinded, ByteView zkp,
              ByteView signature);
  /// Posts the next wallet address as pending. `prev_pk` is the key behind a registered address
  /// of the same participant and signs revote_message(next).
  void revote(const Point& prev_pk, const Address& next, ByteView signature);
  void vdf_add(const VdfCertificate& cert, std::uint64_t height);
  /// `chain_tip` is the height of the newest known block; the header needs 6 confirmations.
  void bpo_add(const Target& target, const BlockHeader& header, std::uint64_t height,
               std::uint64_t chain_tip);
  TallyOutcome tally(std::uint64_t height, const std::map<Address, Opening>& openings = {});

  static Bytes registration_message(const Address& addr, bool valid);
  static Bytes voting_message(const Address& addr, ByteView blinded, ByteView zkp);
  static Bytes revote_message(const Address& next);

  bool initialized() const { return params_.has_value(); }
  const ElectionParams& params() const;
  std::uint32_t winner() const { return winner_; }
  std::uint64_t epoch() const { return epoch_; }
  std::optional<AddressStatus> status(const Address& addr) const;
  std::optional<std::uint32_t> booth_of(const Address& addr) const;
  const std::vector<BoothState>& booths() const { return booths_; }
  const ValidatorState& validator() const { return validator_; }
  const std::vector<TallyResult>& tallies() const { return tallies_; }
  const std::vector<Notice>& notices() const { return notices_; }
  std::uint64_t voted_count() const;

  /// Sorted-key JSON of the entire state; the state hash is SHA-256 over its dump().
  nlohmann::json canonical_json() const;
  Hash256 state_hash() const;

 private:
  void require_initialized() const;
  std::uint32_t assign_booth(const Address& addr);
  void set_status(const Address& addr, AddressStatus s);

  std::optional<ElectionParams> params_;
  std::unique_ptr<VoteProtocol> protocol_;
  std::vector<BoothState> booths_;
  std::map<Address, std::uint32_t> booth_index_;
  ValidatorState validator_;
  std::mt19937_64 booth_rng_;
  std::uint64_t assignments_ = 0;
  std::uint32_t winner_ = 0;
  std::uint64_t epoch_ = 0;
  std::vector<TallyResult> tallies_;
  std::vector<Notice> notices_;
};

}  // namespace aov
