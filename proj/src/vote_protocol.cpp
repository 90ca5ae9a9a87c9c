#include "aov/vote_protocol.hpp"

#include <algorithm>

#include "aov/error.hpp"
#include "aov/hash.hpp"

namespace aov {
namespace {

constexpr std::string_view kWellFormedTag = "aov/commit/well-formed";

Bytes well_formedness_tag(ByteView blinded) {
  Bytes msg(kWellFormedTag.begin(), kWellFormedTag.end());
  append(msg, blinded);
  const Hash256 h = sha256(msg);
  return Bytes(h.begin(), h.end());
}

}  // namespace

Bytes PlaintextProtocol::blind(std::uint32_t choice, ByteView) const {
  Bytes out;
  append_u32_be(out, choice);
  return out;
}

Bytes PlaintextProtocol::prove(std::uint32_t, ByteView, ByteView) const { return {}; }

bool PlaintextProtocol::verify_zkp(ByteView blinded, ByteView proof) const {
  if (blinded.size() != 4 || !proof.empty()) return false;
  const std::uint32_t choice = static_cast<std::uint32_t>(blinded[0]) << 24 |
                               static_cast<std::uint32_t>(blinded[1]) << 16 |
                               static_cast<std::uint32_t>(blinded[2]) << 8 | blinded[3];
  return choice < candidate_count();
}

BoothCount PlaintextProtocol::booth_tally(const std::map<Address, Bytes>& votes,
                                          const std::map<Address, Opening>&) const {
  BoothCount out{std::vector<std::uint64_t>(candidate_count(), 0), 0};
  for (const auto& [addr, blinded] : votes) {
    if (!verify_zkp(blinded, {})) {
      ++out.rejected;
      continue;
    }
    const std::uint32_t choice = static_cast<std::uint32_t>(blinded[0]) << 24 |
                                 static_cast<std::uint32_t>(blinded[1]) << 16 |
                                 static_cast<std::uint32_t>(blinded[2]) << 8 | blinded[3];
    ++out.counts[choice];
  }
  return out;
}

Bytes CommitRevealProtocol::blind(std::uint32_t choice, ByteView blinding_key) const {
  if (blinding_key.size() != 32) {
    throw Error(ErrorCode::kInvalidParams, "commit-reveal needs a 32-byte blinding key");
  }
  Bytes msg;
  append_u32_be(msg, choice);
  append(msg, blinding_key);
  const Hash256 h = sha256(msg);
  return Bytes(h.begin(), h.end());
}

Bytes CommitRevealProtocol::prove(std::uint32_t, ByteView, ByteView blinded) const {
  return well_formedness_tag(blinded);
}

bool CommitRevealProtocol::verify_zkp(ByteView blinded, ByteView proof) const {
  if (blinded.size() != 32) return false;
  const Bytes expected = well_formedness_tag(blinded);
  return proof.size() == expected.size() && std::equal(proof.begin(), proof.end(), expected.begin());
}

BoothCount CommitRevealProtocol::booth_tally(const std::map<Address, Bytes>& votes,
                                             const std::map<Address, Opening>& openings) const {
  BoothCount out{std::vector<std::uint64_t>(candidate_count(), 0), 0};
  for (const auto& [addr, blinded] : votes) {
    const auto it = openings.find(addr);
    if (it == openings.end() || it->second.choice >= candidate_count() ||
        it->second.blinding_key.size() != 32 ||
        blind(it->second.choice, it->second.blinding_key) != blinded) {
      ++out.rejected;
      continue;
    }
    ++out.counts[it->second.choice];
  }
  return out;
}

std::unique_ptr<VoteProtocol> make_vote_protocol(const std::string& name,
                                                 std::uint32_t candidate_count) {
  if (name == "plaintext") return std::make_unique<PlaintextProtocol>(candidate_count);
  if (name == "commit-reveal") return std::make_unique<CommitRevealProtocol>(candidate_count);
  throw Error(ErrorCode::kInvalidParams, "unknown vote protocol: " + name);
}

}  // namespace aov
