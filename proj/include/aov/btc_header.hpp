#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "aov/bigint.hpp"
#include "aov/bytes.hpp"

namespace aov {

/// Bitcoin block header. Digests are held in serialization (internal) byte order.
struct BlockHeader {
  std::int32_t version = 0;
  Hash256 prev_hash{};
  Hash256 merkle_root{};
  std::uint32_t timestamp = 0;
  std::uint32_t nbits = 0;
  std::uint32_t nonce = 0;

  friend bool operator==(const BlockHeader&, const BlockHeader&) = default;
};

inline constexpr std::size_t kHeaderSize = 80;
using EncodedHeader = std::array<std::uint8_t, kHeaderSize>;

EncodedHeader encode(const BlockHeader& h);
BlockHeader decode(ByteView bytes);

std::string header_to_hex(const BlockHeader& h);
BlockHeader header_from_hex(std::string_view hex);

/// Proof-of-work threshold; always in [1, 2^256 - 1].
class Target {
 public:
  explicit Target(BigInt value);

  static Target max();

  const BigInt& value() const { return value_; }
  /// Leading zero bits of the 256-bit target.
  unsigned difficulty_bits() const;

  friend bool operator==(const Target&, const Target&) = default;

 private:
  BigInt value_;
};

Target decode_nbits(std::uint32_t nbits);
/// Smallest compact encoding whose decoded value is <= t (lossy for targets with more than
/// 23 significant bits).
std::uint32_t encode_nbits(const Target& t);

Hash256 pow_hash(const BlockHeader& h);
/// The digest read as a little-endian 256-bit integer, as consensus compares it.
BigInt pow_value(const BlockHeader& h);
bool check_pow(const BlockHeader& h, const Target& t);

/// Displayed block id (byte-reversed digest), as printed by block explorers.
std::string block_id_hex(const BlockHeader& h);

/// Searches nonces starting at template.nonce. Throws Error(kExhausted).
BlockHeader mine_test_header(const BlockHeader& tmpl, const Target& t, std::uint64_t max_iters);

BlockHeader genesis_header();

}  // namespace aov
