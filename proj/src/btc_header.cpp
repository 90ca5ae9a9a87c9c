#include "aov/btc_header.hpp"

#include <algorithm>

#include "aov/error.hpp"
#include "aov/hash.hpp"

namespace aov {
namespace {

const BigInt& max_256() {
  static const BigInt v = (BigInt(1) << 256) - 1;
  return v;
}

void put_u32_le(std::uint8_t* out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

std::uint32_t get_u32_le(const std::uint8_t* in) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = v << 8 | in[i];
  return v;
}

}  // namespace

EncodedHeader encode(const BlockHeader& h) {
  EncodedHeader out{};
  put_u32_le(out.data(), static_cast<std::uint32_t>(h.version));
  std::copy(h.prev_hash.begin(), h.prev_hash.end(), out.begin() + 4);
  std::copy(h.merkle_root.begin(), h.merkle_root.end(), out.begin() + 36);
  put_u32_le(out.data() + 68, h.timestamp);
  put_u32_le(out.data() + 72, h.nbits);
  put_u32_le(out.data() + 76, h.nonce);
  return out;
}

BlockHeader decode(ByteView bytes) {
  if (bytes.size() != kHeaderSize) {
    throw Error(ErrorCode::kMalformedHeader,
                "header must be 80 bytes, got " + std::to_string(bytes.size()));
  }
  BlockHeader h;
  h.version = static_cast<std::int32_t>(get_u32_le(bytes.data()));
  std::copy_n(bytes.begin() + 4, 32, h.prev_hash.begin());
  std::copy_n(bytes.begin() + 36, 32, h.merkle_root.begin());
  h.timestamp = get_u32_le(bytes.data() + 68);
  h.nbits = get_u32_le(bytes.data() + 72);
  h.nonce = get_u32_le(bytes.data() + 76);
  return h;
}

std::string header_to_hex(const BlockHeader& h) { return to_hex(encode(h)); }

BlockHeader header_from_hex(std::string_view hex) {
  Bytes raw = from_hex(hex);
  return decode(raw);
}

Target::Target(BigInt value) : value_(std::move(value)) {
  if (value_ <= 0) throw Error(ErrorCode::kZeroTarget, "target must be positive");
  if (value_ > max_256()) throw Error(ErrorCode::kOverflowTarget, "target exceeds 256 bits");
}

Target Target::max() { return Target(max_256()); }

unsigned Target::difficulty_bits() const {
  return static_cast<unsigned>(256 - bit_length(value_));
}

Target decode_nbits(std::uint32_t nbits) {
  const std::uint32_t exponent = nbits >> 24;
  const std::uint32_t mantissa = nbits & 0x007fffffu;
  if ((nbits & 0x00800000u) != 0) {
    throw Error(ErrorCode::kNegativeTarget, "compact target has the sign bit set");
  }
  BigInt value = mantissa;
  if (exponent <= 3) {
    value >>= 8 * (3 - exponent);
  } else {
    // Reject before shifting so absurd exponents cannot allocate huge integers.
    if (mantissa != 0 && bit_length(value) + 8 * (exponent - 3) > 256) {
      throw Error(ErrorCode::kOverflowTarget, "compact target exceeds 256 bits");
    }
    value <<= 8 * (exponent - 3);
  }
  return Target(value);
}

std::uint32_t encode_nbits(const Target& t) {
  std::uint32_t size = static_cast<std::uint32_t>(byte_length(t.value()));
  std::uint32_t mantissa = 0;
  if (size <= 3) {
    mantissa = static_cast<std::uint32_t>(t.value() << (8 * (3 - size)));
  } else {
    mantissa = static_cast<std::uint32_t>(t.value() >> (8 * (size - 3)));
  }
  if ((mantissa & 0x00800000u) != 0) {
    mantissa >>= 8;
    ++size;
  }
  return size << 24 | mantissa;
}

Hash256 pow_hash(const BlockHeader& h) { return double_sha256(encode(h)); }

BigInt pow_value(const BlockHeader& h) { return from_bytes_le(pow_hash(h)); }

bool check_pow(const BlockHeader& h, const Target& t) { return pow_value(h) < t.value(); }

std::string block_id_hex(const BlockHeader& h) {
  Hash256 digest = pow_hash(h);
  std::reverse(digest.begin(), digest.end());
  return to_hex(digest);
}

BlockHeader mine_test_header(const BlockHeader& tmpl, const Target& t, std::uint64_t max_iters) {
  BlockHeader h = tmpl;
  for (std::uint64_t i = 0; i < max_iters; ++i) {
    if (check_pow(h, t)) return h;
    ++h.nonce;
  }
  throw Error(ErrorCode::kExhausted, "no valid nonce within " + std::to_string(max_iters) + " tries");
}

BlockHeader genesis_header() {
  return header_from_hex(
      "0100000000000000000000000000000000000000000000000000000000000000000000003ba3edfd7a7b12b27ac7"
      "2c3e67768f617fc81bc3888a51323a9fb8aa4b1e5e4a29ab5f49ffff001d1dac2b7c");
}

}  // namespace aov
