#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "aov/btc_header.hpp"
#include "aov/error.hpp"

namespace aov {
namespace {

BlockHeader random_header(std::mt19937_64& rng) {
  BlockHeader h;
  h.version = static_cast<std::int32_t>(rng());
  for (auto& b : h.prev_hash) b = static_cast<std::uint8_t>(rng());
  for (auto& b : h.merkle_root) b = static_cast<std::uint8_t>(rng());
  h.timestamp = static_cast<std::uint32_t>(rng());
  h.nbits = static_cast<std::uint32_t>(rng());
  h.nonce = static_cast<std::uint32_t>(rng());
  return h;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kParse;
}

TEST(Nbits, GenesisTarget) {
  Target t = decode_nbits(0x1d00ffff);
  EXPECT_EQ(t.value(), BigInt(0xffff) << (8 * 26));
  EXPECT_EQ(t.difficulty_bits(), 32u);
  EXPECT_EQ(encode_nbits(t), 0x1d00ffffu);
}

TEST(Nbits, SmallestExponent) {
  EXPECT_EQ(decode_nbits(0x03000001).value(), 1);
  EXPECT_EQ(decode_nbits(0x01120000).value(), 0x12);
  EXPECT_EQ(decode_nbits(0x02123400).value(), 0x1234);
}

TEST(Nbits, Rejections) {
  EXPECT_EQ(code_of([] { decode_nbits(0x1d800001); }), ErrorCode::kNegativeTarget);
  EXPECT_EQ(code_of([] { decode_nbits(0x2200ffff); }), ErrorCode::kOverflowTarget);
  EXPECT_EQ(code_of([] { decode_nbits(0x1d000000); }), ErrorCode::kZeroTarget);
}

TEST(Nbits, RoundTripOnEncodableTargets) {
  for (std::uint32_t nbits : {0x1d00ffffu, 0x1b0404cbu, 0x2000ffffu, 0x1f00ffffu, 0x207fffffu}) {
    EXPECT_EQ(encode_nbits(decode_nbits(nbits)), nbits) << std::hex << nbits;
  }
}

TEST(Target, Bounds) {
  EXPECT_THROW(Target(0), Error);
  EXPECT_THROW(Target(BigInt(1) << 256), Error);
  EXPECT_EQ(Target::max().value(), (BigInt(1) << 256) - 1);
  EXPECT_EQ(Target::max().difficulty_bits(), 0u);
}

TEST(Header, EncodingIsLittleEndian) {
  BlockHeader h;
  h.version = 0x01020304;
  h.timestamp = 0x0a0b0c0d;
  h.nbits = 0x1d00ffff;
  h.nonce = 0xdeadbeef;
  EncodedHeader e = encode(h);
  EXPECT_EQ(e[0], 0x04);
  EXPECT_EQ(e[3], 0x01);
  EXPECT_EQ(e[68], 0x0d);
  EXPECT_EQ(e[72], 0xff);
  EXPECT_EQ(e[75], 0x1d);
  EXPECT_EQ(e[76], 0xef);
}

TEST(Header, RoundTripRandom) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    BlockHeader h = random_header(rng);
    EXPECT_EQ(decode(encode(h)), h);
    EXPECT_EQ(header_from_hex(header_to_hex(h)), h);
  }
}

TEST(Header, MalformedLength) {
  Bytes short_bytes(79);
  EXPECT_EQ(code_of([&] { decode(short_bytes); }), ErrorCode::kMalformedHeader);
  EXPECT_THROW(header_from_hex("zz"), Error);
}

TEST(Pow, GenesisPassesItsOwnTarget) {
  EXPECT_TRUE(check_pow(genesis_header(), decode_nbits(0x1d00ffff)));
  EXPECT_FALSE(check_pow(genesis_header(), decode_nbits(0x1b0404cb)));
}

TEST(Pow, NonceChangesDigest) {
  BlockHeader a = genesis_header();
  BlockHeader b = a;
  b.nonce += 1;
  EXPECT_NE(pow_hash(a), pow_hash(b));
}

TEST(Pow, ExtremeTargets) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    BlockHeader h = random_header(rng);
    EXPECT_TRUE(check_pow(h, Target::max()));
    EXPECT_FALSE(check_pow(h, Target(1)));
  }
}

TEST(Pow, MonotoneInTarget) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    BlockHeader h = random_header(rng);
    BigInt v = pow_value(h);
    // the tightest passing target is v + 1
    if (v + 1 < (BigInt(1) << 256)) {
      EXPECT_TRUE(check_pow(h, Target(v + 1)));
      EXPECT_FALSE(check_pow(h, Target(v == 0 ? 1 : v)));
    }
    for (unsigned k : {2u, 8u, 64u}) {
      Target lo((BigInt(1) << (256 - k)));
      Target hi((BigInt(1) << (256 - k + 1)));
      if (check_pow(h, lo)) EXPECT_TRUE(check_pow(h, hi));
    }
  }
}

TEST(Pow, AcceptanceRateMatchesTarget) {
  std::mt19937_64 rng(2024);
  const int trials = 20000;
  for (unsigned k : {1u, 2u, 4u}) {
    Target t(BigInt(1) << (256 - k));
    int hits = 0;
    for (int i = 0; i < trials; ++i) hits += check_pow(random_header(rng), t) ? 1 : 0;
    double p = std::ldexp(1.0, -static_cast<int>(k));
    double sigma = std::sqrt(trials * p * (1 - p));
    EXPECT_NEAR(hits, trials * p, 3 * sigma) << "k=" << k;
  }
}

TEST(Mining, MaxTargetKeepsTemplate) {
  BlockHeader tmpl = genesis_header();
  tmpl.nonce = 0;
  EXPECT_EQ(mine_test_header(tmpl, Target::max(), 1), tmpl);
}

TEST(Mining, HalfTargetIsCheap) {
  std::mt19937_64 rng(5);
  std::uint64_t total = 0;
  const int runs = 400;
  Target t(BigInt(1) << 255);
  for (int i = 0; i < runs; ++i) {
    BlockHeader tmpl = random_header(rng);
    tmpl.nonce = 0;
    BlockHeader h = mine_test_header(tmpl, t, 64);
    EXPECT_TRUE(check_pow(h, t));
    BlockHeader same = h;
    same.nonce = tmpl.nonce;
    EXPECT_EQ(same, tmpl);
    total += h.nonce + 1;
  }
  // geometric with p = 1/2: mean 2, sd sqrt(2) per run
  EXPECT_NEAR(static_cast<double>(total) / runs, 2.0, 3 * std::sqrt(2.0 / runs));
}

TEST(Mining, Exhausted) {
  BlockHeader tmpl = genesis_header();
  EXPECT_EQ(code_of([&] { mine_test_header(tmpl, Target(1), 10); }), ErrorCode::kExhausted);
}

}  // namespace
}  // namespace aov
