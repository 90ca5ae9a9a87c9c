#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "aov/bytes.hpp"
#include "aov/wallet.hpp"

namespace aov {

/// What a voter reveals to its booth at tally time (commit-reveal only).
struct Opening {
  std::uint32_t choice = 0;
  Bytes blinding_key;

  friend bool operator==(const Opening&, const Opening&) = default;
};

struct BoothCount {
  std::vector<std::uint64_t> counts;  // per candidate
  std::uint64_t rejected = 0;         // stored votes that failed to open
};

/// The plug-in seam for the underlying voting scheme. blind/prove run on the voter's side;
/// verify_zkp and booth_tally run in the booth contract.
class VoteProtocol {
 public:
  explicit VoteProtocol(std::uint32_t candidate_count) : candidate_count_(candidate_count) {}
  virtual ~VoteProtocol() = default;

  virtual std::string name() const = 0;
  virtual Bytes blind(std::uint32_t choice, ByteView blinding_key) const = 0;
  virtual Bytes prove(std::uint32_t choice, ByteView blinding_key, ByteView blinded) const = 0;
  virtual bool verify_zkp(ByteView blinded, ByteView proof) const = 0;
  virtual BoothCount booth_tally(const std::map<Address, Bytes>& votes,
                                 const std::map<Address, Opening>& openings) const = 0;

  std::uint32_t candidate_count() const { return candidate_count_; }

 private:
  std::uint32_t candidate_count_;
};

/// Blinded vote is the choice itself (4 bytes, big-endian); the proof is a range check.
/// Testing only: provides no ballot secrecy.
class PlaintextProtocol final : public VoteProtocol {
 public:
  using VoteProtocol::VoteProtocol;
  std::string name() const override { return "plaintext"; }
  Bytes blind(std::uint32_t choice, ByteView blinding_key) const override;
  Bytes prove(std::uint32_t choice, ByteView blinding_key, ByteView blinded) const override;
  bool verify_zkp(ByteView blinded, ByteView proof) const override;
  BoothCount booth_tally(const std::map<Address, Bytes>& votes,
                         const std::map<Address, Opening>& openings) const override;
};

/// Blinded vote is SHA-256(be32(choice) || key) with a fresh 32-byte key per vote. Votes are
/// counted only when a matching opening is presented at tally time.
class CommitRevealProtocol final : public VoteProtocol {
 public:
  using VoteProtocol::VoteProtocol;
  std::string name() const override { return "commit-reveal"; }
  Bytes blind(std::uint32_t choice, ByteView blinding_key) const override;
  Bytes prove(std::uint32_t choice, ByteView blinding_key, ByteView blinded) const override;
  bool verify_zkp(ByteView blinded, ByteView proof) const override;
  BoothCount booth_tally(const std::map<Address, Bytes>& votes,
                         const std::map<Address, Opening>& openings) const override;
};

std::unique_ptr<VoteProtocol> make_vote_protocol(const std::string& name,
                                                 std::uint32_t candidate_count);

}  // namespace aov
