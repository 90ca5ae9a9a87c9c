#include "aov/election.hpp"

#include <cmath>

#include "aov/error.hpp"
#include "aov/hash.hpp"
#include "aov/json_codec.hpp"
#include "aov/signature.hpp"

namespace aov {
namespace {

constexpr std::int64_t kPpm = 1'000'000;

// Fractions are compared exactly at parts-per-million resolution.
std::int64_t to_ppm(double fraction) { return std::llround(fraction * kPpm); }

bool share_at_least(std::uint64_t part, std::uint64_t whole, double fraction) {
  return static_cast<unsigned __int128>(part) * kPpm >=
         static_cast<unsigned __int128>(whole) * static_cast<std::uint64_t>(to_ppm(fraction));
}

Bytes tagged(std::string_view tag) { return Bytes(tag.begin(), tag.end()); }

}  // namespace

const CurveParams& ElectionParams::curve_params() const {
  if (curve == "secp256k1") return secp256k1();
  if (curve == "toy") return toy_curve();
  throw Error(ErrorCode::kInvalidParams, "unknown curve: " + curve);
}

void ElectionParams::validate() const {
  curve_params();
  if (!(supermajority_threshold > 0.5 && supermajority_threshold <= 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "supermajority threshold must be in (0.5, 1]");
  }
  if (!(min_participation >= 0.0 && min_participation <= 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "min_participation must be in [0, 1]");
  }
  if (candidate_count < 2) throw Error(ErrorCode::kInvalidParams, "need at least 2 candidates");
  if (booth_rows < 1 || booth_cols < 1) {
    throw Error(ErrorCode::kInvalidParams, "booth grid must be at least 1x1");
  }
  if (!baseline_tally.empty() && baseline_tally.size() != candidate_count) {
    throw Error(ErrorCode::kInvalidParams, "baseline tally needs one entry per candidate");
  }
  if (incumbent >= candidate_count) throw Error(ErrorCode::kInvalidParams, "incumbent out of range");
  if (ea_public_key.infinity || !on_curve(ea_public_key, curve_params())) {
    throw Error(ErrorCode::kInvalidParams, "EA public key is not a curve point");
  }
  schedule.validate();
  vdf.validate();
  make_vote_protocol(protocol, candidate_count);
}

std::string to_string(AddressStatus s) {
  switch (s) {
    case AddressStatus::kPending: return "pending";
    case AddressStatus::kValid: return "valid";
    case AddressStatus::kVoted: return "voted";
    case AddressStatus::kInvalid: return "invalid";
  }
  return "invalid";
}

std::uint32_t apply_winner_rule(const std::vector<std::uint64_t>& totals, std::uint64_t turnout,
                                std::uint32_t prev_winner, const ElectionParams& params) {
  if (turnout == 0) return prev_winner;
  if (params.main_election) {
    for (std::uint32_t c = 0; c < totals.size(); ++c) {
      if (2 * static_cast<unsigned __int128>(totals[c]) > turnout) return c;
    }
    return prev_winner;
  }
  if (!share_at_least(turnout, params.baseline_turnout, params.min_participation)) {
    return prev_winner;
  }
  for (std::uint32_t c = 0; c < totals.size(); ++c) {
    if (c == prev_winner) continue;
    if (share_at_least(totals[c], turnout, params.supermajority_threshold)) return c;
  }
  return prev_winner;
}

Bytes Election::registration_message(const Address& addr, bool valid) {
  Bytes msg = tagged("aov/registration");
  append(msg, addr);
  msg.push_back(valid ? 1 : 0);
  return msg;
}

Bytes Election::voting_message(const Address& addr, ByteView blinded, ByteView zkp) {
  Bytes msg = tagged("aov/voting");
  append(msg, addr);
  append_u32_be(msg, static_cast<std::uint32_t>(blinded.size()));
  append(msg, blinded);
  append(msg, zkp);
  return msg;
}

Bytes Election::revote_message(const Address& next) {
  Bytes msg = tagged("aov/revote");
  append(msg, next);
  return msg;
}

const ElectionParams& Election::params() const {
  require_initialized();
  return *params_;
}

void Election::require_initialized() const {
  if (!params_) throw Error(ErrorCode::kNotInitialized, "setup has not run");
}

void Election::setup(ElectionParams params) {
  if (params_) throw Error(ErrorCode::kAlreadyInitialized, "setup may run only once");
  params.validate();
  protocol_ = make_vote_protocol(params.protocol, params.candidate_count);
  booths_.clear();
  for (std::uint32_t i = 0; i < params.booth_count(); ++i) {
    booths_.push_back(BoothState{i + 1, {}, {}});
  }
  booth_rng_.seed(params.booth_seed);
  winner_ = params.incumbent;
  params_ = std::move(params);
}

Election::Election(const Election& other)
    : params_(other.params_),
      protocol_(other.params_ ? make_vote_protocol(other.params_->protocol,
                                                   other.params_->candidate_count)
                              : nullptr),
      booths_(other.booths_),
      booth_index_(other.booth_index_),
      validator_(other.validator_),
      booth_rng_(other.booth_rng_),
      assignments_(other.assignments_),
      winner_(other.winner_),
      epoch_(other.epoch_),
      tallies_(other.tallies_),
      notices_(other.notices_) {}

Election& Election::operator=(const Election& other) {
  if (this != &other) {
    Election copy(other);
    *this = std::move(copy);
  }
  return *this;
}

std::optional<AddressStatus> Election::status(const Address& addr) const {
  const auto it = booth_index_.find(addr);
  if (it == booth_index_.end()) return std::nullopt;
  return booths_[it->second].registry.at(addr);
}

std::optional<std::uint32_t> Election::booth_of(const Address& addr) const {
  const auto it = booth_index_.find(addr);
  if (it == booth_index_.end()) return std::nullopt;
  return booths_[it->second].booth_no;
}

std::uint64_t Election::voted_count() const {
  std::uint64_t n = 0;
  for (const auto& booth : booths_) {
    for (const auto& [addr, s] : booth.registry) n += s == AddressStatus::kVoted ? 1 : 0;
  }
  return n;
}

std::uint32_t Election::assign_booth(const Address& addr) {
  const auto it = booth_index_.find(addr);
  if (it != booth_index_.end()) return it->second;
  const auto count = static_cast<std::uint64_t>(booths_.size());
  // Rejection sampling for an unbiased, library-independent index.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % count;
  std::uint64_t draw = 0;
  do {
    draw = booth_rng_();
  } while (draw >= limit);
  const auto index = static_cast<std::uint32_t>(draw % count);
  ++assignments_;
  booth_index_[addr] = index;
  return index;
}

void Election::set_status(const Address& addr, AddressStatus s) {
  const std::uint32_t index = assign_booth(addr);
  booths_[index].registry[addr] = s;
  if (s == AddressStatus::kInvalid) booths_[index].votes.erase(addr);
}

void Election::registration(const Address& addr, bool valid, ByteView ea_signature) {
  require_initialized();
  const CurveParams& curve = params_->curve_params();
  const Signature sig = decode_signature(ea_signature, curve);
  if (!verify_signature(params_->ea_public_key, registration_message(addr, valid), sig, curve)) {
    throw Error(ErrorCode::kBadSignature, "registration not signed by the EA");
  }
  const auto current = status(addr);
  if (!valid) {
    set_status(addr, AddressStatus::kInvalid);
    return;
  }
  if (current && *current != AddressStatus::kPending) {
    throw Error(ErrorCode::kNotValidAddress,
                "only new or pending addresses can be validated, status is " + to_string(*current));
  }
  set_status(addr, AddressStatus::kValid);
}

void Election::voting(const Address& addr, const Point& pk, ByteView blinded, ByteView zkp,
                      ByteView signature) {
  require_initialized();
  const auto current = status(addr);
  if (!current || *current != AddressStatus::kValid) {
    throw Error(ErrorCode::kNotValidAddress, "address is not registered as valid");
  }
  const CurveParams& curve = params_->curve_params();
  if (pk.infinity || !on_curve(pk, curve) || wallet_address(pk, curve) != addr) {
    throw Error(ErrorCode::kBadSignature, "public key does not belong to the address");
  }
  const Signature sig = decode_signature(signature, curve);
  if (!verify_signature(pk, voting_message(addr, blinded, zkp), sig, curve)) {
    throw Error(ErrorCode::kBadSignature, "vote signature does not verify");
  }
  if (!protocol_->verify_zkp(blinded, zkp)) {
    throw Error(ErrorCode::kBadProof, "vote proof rejected");
  }
  BoothState& booth = booths_[booth_index_.at(addr)];
  booth.votes[addr] = Bytes(blinded.begin(), blinded.end());
  booth.registry[addr] = AddressStatus::kVoted;
}

void Election::revote(const Point& prev_pk, const Address& next, ByteView signature) {
  require_initialized();
  const CurveParams& curve = params_->curve_params();
  if (prev_pk.infinity || !on_curve(prev_pk, curve)) {
    throw Error(ErrorCode::kBadSignature, "previous key is not a curve point");
  }
  const Address prev = wallet_address(prev_pk, curve);
  const auto prev_status = status(prev);
  if (!prev_status) throw Error(ErrorCode::kBadSignature, "previous address is not registered");
  const Signature sig = decode_signature(signature, curve);
  if (!verify_signature(prev_pk, revote_message(next), sig, curve)) {
    throw Error(ErrorCode::kBadSignature, "revote signature does not verify");
  }
  if (status(next)) {
    throw Error(ErrorCode::kNotValidAddress, "next address is already registered");
  }
  if (*prev_status == AddressStatus::kValid || *prev_status == AddressStatus::kVoted) {
    // Same-interval revote: retire the old wallet so only one vote can count. Observers can
    // now link the two addresses.
    set_status(prev, AddressStatus::kInvalid);
    notices_.push_back(Notice{"linkage", epoch_, to_hex(prev) + "->" + to_hex(next)});
  }
  set_status(next, AddressStatus::kPending);
}

void Election::vdf_add(const VdfCertificate& cert, std::uint64_t height) {
  require_initialized();
  if (!validator_.headers.contains(height)) {
    throw Error(ErrorCode::kUnknownHeight, "no header stored at height " + std::to_string(height));
  }
  validator_.vdf_deposits[height] = cert;
}

void Election::bpo_add(const Target& target, const BlockHeader& header, std::uint64_t height,
                       std::uint64_t chain_tip) {
  require_initialized();
  if (validator_.blockheight_stored && height <= *validator_.blockheight_stored) {
    throw Error(ErrorCode::kStaleHeight, "height " + std::to_string(height) + " is not newer than " +
                                             std::to_string(*validator_.blockheight_stored));
  }
  const auto stride = static_cast<std::uint64_t>(params_->schedule.stride);
  if (stride > 1 && height % stride != 0) {
    throw Error(ErrorCode::kStrideViolation,
                "height " + std::to_string(height) + " is not a multiple of " + std::to_string(stride));
  }
  if (chain_tip < height || chain_tip - height + 1 < 6) {
    throw Error(ErrorCode::kImmatureHeader, "header needs at least 6 confirmations");
  }
  validator_.headers[height] = header;
  validator_.targets.insert_or_assign(height, target);
  validator_.blockheight_stored = height;
}

TallyOutcome Election::tally(std::uint64_t height, const std::map<Address, Opening>& openings) {
  require_initialized();
  if (validator_.blockheight_stored != height) {
    throw Error(ErrorCode::kHeightMismatch, "tally height is not the latest stored header");
  }
  const auto deposit = validator_.vdf_deposits.find(height);
  if (deposit == validator_.vdf_deposits.end()) {
    throw Error(ErrorCode::kMissingDeposit, "no VDF deposit at height " + std::to_string(height));
  }
  TallyOutcome outcome;
  try {
    outcome.verdict = evaluate_trigger(deposit->second, params_->vdf, validator_.headers.at(height),
                                       validator_.targets.at(height), params_->schedule);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMismatchedInput) throw;
    return outcome;
  }
  if (!outcome.verdict.triggered) return outcome;

  TallyResult result;
  result.epoch = epoch_;
  result.triggered_at = height;
  result.totals.assign(params_->candidate_count, 0);
  for (auto& booth : booths_) {
    std::map<Address, Opening> local;
    for (const auto& [addr, blinded] : booth.votes) {
      const auto it = openings.find(addr);
      if (it != openings.end()) local.emplace(addr, it->second);
    }
    const BoothCount counted = protocol_->booth_tally(booth.votes, local);
    for (std::size_t c = 0; c < counted.counts.size(); ++c) result.totals[c] += counted.counts[c];
    result.rejected += counted.rejected;
    result.per_booth.push_back(counted.counts);
  }
  for (auto v : result.totals) result.turnout += v;
  result.previous_winner = winner_;
  result.winner = apply_winner_rule(result.totals, result.turnout, winner_, *params_);

  // Every interval re-tallies from scratch: spent wallets retire and voters revote.
  for (auto& booth : booths_) {
    for (auto& [addr, s] : booth.registry) {
      if (s == AddressStatus::kVoted) s = AddressStatus::kInvalid;
    }
    booth.votes.clear();
  }
  winner_ = result.winner;
  ++epoch_;
  tallies_.push_back(result);
  outcome.result = std::move(result);
  return outcome;
}

nlohmann::json Election::canonical_json() const {
  using nlohmann::json;
  json j;
  j["initialized"] = initialized();
  if (!params_) return j;
  j["params"] = codec::params_json(*params_);
  json booths = json::array();
  for (const auto& booth : booths_) {
    json registry = json::object();
    for (const auto& [addr, s] : booth.registry) registry[to_hex(addr)] = to_string(s);
    json votes = json::object();
    for (const auto& [addr, blinded] : booth.votes) votes[to_hex(addr)] = to_hex(blinded);
    booths.push_back({{"booth_no", booth.booth_no}, {"registry", registry}, {"votes", votes}});
  }
  j["booths"] = booths;
  json validator = json::object();
  json headers = json::object();
  for (const auto& [h, header] : validator_.headers) headers[std::to_string(h)] = header_to_hex(header);
  json targets = json::object();
  for (const auto& [h, t] : validator_.targets) targets[std::to_string(h)] = codec::bigint_json(t.value());
  json deposits = json::object();
  for (const auto& [h, cert] : validator_.vdf_deposits) {
    deposits[std::to_string(h)] = codec::certificate_json(cert, params_->vdf.modulus);
  }
  validator["headers"] = headers;
  validator["targets"] = targets;
  validator["vdf_deposits"] = deposits;
  validator["blockheight_stored"] =
      validator_.blockheight_stored ? json(*validator_.blockheight_stored) : json(nullptr);
  j["validator"] = validator;
  j["booth_assignments"] = assignments_;
  j["winner"] = winner_;
  j["epoch"] = epoch_;
  json tallies = json::array();
  for (const auto& t : tallies_) tallies.push_back(codec::tally_json(t));
  j["tallies"] = tallies;
  json notices = json::array();
  for (const auto& n : notices_) {
    notices.push_back({{"kind", n.kind}, {"epoch", n.epoch}, {"detail", n.detail}});
  }
  j["notices"] = notices;
  return j;
}

Hash256 Election::state_hash() const { return sha256(as_bytes(canonical_json().dump())); }

}  // namespace aov
