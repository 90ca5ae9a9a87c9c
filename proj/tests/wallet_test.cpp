#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>
#include <type_traits>

#include "aov/error.hpp"
#include "aov/hash.hpp"
#include "aov/signature.hpp"
#include "aov/wallet.hpp"

namespace aov {
namespace {

// Textbook affine arithmetic, kept separate from the library's Jacobian code.
Point oracle_add(const Point& a, const Point& b, const CurveParams& c) {
  if (a.infinity) return b;
  if (b.infinity) return a;
  const BigInt& p = c.p;
  if (a.x == b.x && mod_floor(a.y + b.y, p) == 0) return Point{};
  BigInt lambda;
  if (a.x == b.x) {
    lambda = mod_floor((3 * a.x * a.x + c.a) * mod_inverse_prime(mod_floor(2 * a.y, p), p), p);
  } else {
    lambda = mod_floor((b.y - a.y) * mod_inverse_prime(mod_floor(b.x - a.x, p), p), p);
  }
  BigInt x = mod_floor(lambda * lambda - a.x - b.x, p);
  BigInt y = mod_floor(lambda * (a.x - x) - a.y, p);
  return Point::affine(x, y);
}

Point oracle_mul(BigInt k, Point pt, const CurveParams& c) {
  Point acc;
  while (k > 0) {
    if (boost::multiprecision::bit_test(k, 0)) acc = oracle_add(acc, pt, c);
    pt = oracle_add(pt, pt, c);
    k >>= 1;
  }
  return acc;
}

WalletChain chain_for(const CurveParams& c, std::uint64_t tag, bool small = false) {
  WalletChain w;
  Bytes seed;
  append_u64_be(seed, tag);
  w.sk0 = from_bytes_be(sha256(seed)) % (c.order - 1) + 1;
  w.hk = hmac_sha256(seed, as_bytes("hk"));
  w.g = small ? 2 : 37;
  w.p = small ? BigInt(467) : (BigInt(1) << 61) - 1;
  w.validate(c, small);
  return w;
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

TEST(Curve, ParametersValidate) {
  EXPECT_NO_THROW(secp256k1().validate());
  EXPECT_NO_THROW(toy_curve().validate());
  CurveParams broken = toy_curve();
  broken.base.y += 1;
  EXPECT_THROW(broken.validate(), Error);
}

TEST(Curve, ToyGroupExhaustive) {
  const CurveParams& c = toy_curve();
  Point acc;
  for (int k = 1; k <= 1013; ++k) {
    acc = oracle_add(acc, c.base, c);
    Point lib = base_mul(k, c);
    ASSERT_EQ(lib, acc) << "k=" << k;
    if (k < 1013) ASSERT_TRUE(on_curve(lib, c));
  }
  EXPECT_TRUE(acc.infinity);
}

TEST(Curve, AdditionLaws) {
  const CurveParams& c = secp256k1();
  Point p = base_mul(7, c), q = base_mul(11, c);
  EXPECT_EQ(add(p, q, c), base_mul(18, c));
  EXPECT_EQ(add(p, negate(p, c), c), Point{});
  EXPECT_EQ(add(p, Point{}, c), p);
  EXPECT_EQ(scalar_mul(c.order + 5, c.base, c), base_mul(5, c));
  EXPECT_EQ(scalar_mul(-1, c.base, c), negate(c.base, c));
}

TEST(Curve, CompressionRoundTrip) {
  for (const CurveParams* c : {&secp256k1(), &toy_curve()}) {
    for (int k = 1; k < 60; ++k) {
      Point p = base_mul(k, *c);
      Bytes enc = compress(p, *c);
      EXPECT_EQ(enc.size(), 1 + c->field_bytes());
      EXPECT_EQ(decompress(enc, *c), p);
    }
  }
  EXPECT_EQ(code_of([] { compress(Point{}, secp256k1()); }), ErrorCode::kIdentityPoint);
  Bytes bad(33, 0);
  bad[0] = 0x05;
  EXPECT_EQ(code_of([&] { decompress(bad, secp256k1()); }), ErrorCode::kInvalidPoint);
}

TEST(Curve, SqrtModPrime) {
  for (BigInt p : {BigInt(1009), BigInt(467), BigInt(17), secp256k1().p}) {
    for (int v = 1; v < 60; ++v) {
      BigInt sq = mod_floor(BigInt(v) * v, p);
      BigInt r = sqrt_mod_prime(sq, p);
      EXPECT_EQ(mod_floor(r * r, p), sq);
    }
  }
  EXPECT_THROW(sqrt_mod_prime(3, 17), Error);  // 3 is a non-residue mod 17
}

TEST(WalletChain, Validation) {
  const CurveParams& c = secp256k1();
  WalletChain w = chain_for(c, 1);
  WalletChain bad = w;
  bad.sk0 = 0;
  EXPECT_THROW(bad.validate(c), Error);
  bad = w;
  bad.sk0 = c.order;
  EXPECT_THROW(bad.validate(c), Error);
  bad = w;
  bad.p = 467;
  bad.g = 2;
  EXPECT_THROW(bad.validate(c), Error);
  EXPECT_NO_THROW(bad.validate(c, true));
  bad = w;
  bad.g = bad.p - 1;  // order 2
  EXPECT_THROW(bad.validate(c), Error);
  bad = w;
  bad.p = (BigInt(1) << 61) + 1;
  EXPECT_THROW(bad.validate(c), Error);
}

TEST(Offset, DeterministicAndIndexSensitive) {
  const CurveParams& c = secp256k1();
  WalletChain w = chain_for(c, 2);
  EXPECT_EQ(derive_offset(w.hk, w.g, w.p, 5, c), derive_offset(w.hk, w.g, w.p, 5, c));
  EXPECT_NE(derive_offset(w.hk, w.g, w.p, 5, c), derive_offset(w.hk, w.g, w.p, 6, c));
  EXPECT_NE(derive_offset(w.hk, w.g, w.p, 5, c), derive_offset(w.hk, w.g, w.p, 5, c, 1));
}

TEST(Offset, IterationRange) {
  const CurveParams& c = secp256k1();
  WalletChain w = chain_for(c, 3);
  EXPECT_EQ(code_of([&] { derive_offset(w.hk, w.g, w.p, 0, c); }), ErrorCode::kIterationOutOfRange);
  EXPECT_EQ(code_of([&] { derive_sk(w, max_iteration() + 1, c); }), ErrorCode::kIterationOutOfRange);
  EXPECT_NO_THROW(derive_sk(w, max_iteration(), c));
  EXPECT_EQ(max_iteration(), (BigInt(1) << 128) - 1);
}

TEST(Offset, ForcedValues) {
  EXPECT_EQ(sk_from_offset(5, 11, 13), 3);
  const CurveParams& c = secp256k1();
  WalletChain w = chain_for(c, 4);
  EXPECT_EQ(sk_from_offset(w.sk0, 0, c.order), w.sk0);
  Point pk0 = base_mul(w.sk0, c);
  EXPECT_EQ(pk_from_offset(pk0, 0, c), pk0);
}

// PK_1 = PK_0 + offset_1 * BP  and  (SK_0 + offset_1) * BP = PK_1
TEST(Derivation, KeyRelation) {
  const CurveParams& c = secp256k1();
  WalletChain w = chain_for(c, 5);
  SyncRecord rec = make_sync_record(w, c);
  BigInt off = derive_offset(w.hk, w.g, w.p, 1, c);
  Point pk1 = derive_pk_ea(rec, c, 1);
  EXPECT_EQ(pk1, add(rec.pk0, oracle_mul(off, c.base, c), c));
  EXPECT_EQ(oracle_mul(mod_floor(w.sk0 + off, c.order), c.base, c), pk1);
  EXPECT_EQ(derive_sk(w, 1, c), mod_floor(w.sk0 + off, c.order));
}

TEST(Derivation, AgreementDefaultCurve) {
  const CurveParams& c = secp256k1();
  WalletChain w = chain_for(c, 6);
  SyncRecord rec = make_sync_record(w, c);
  for (int e = 1; e <= 100; ++e) {
    BigInt sk = derive_sk(w, e, c);
    Point ea = derive_pk_ea(rec, c, e);
    ASSERT_EQ(oracle_mul(sk, c.base, c), ea) << "e=" << e;
    EXPECT_EQ(wallet_address(ea, c), wallet_address(base_mul(sk, c), c));
  }
}

TEST(Derivation, AgreementToyCurveExhaustive) {
  const CurveParams& c = toy_curve();
  for (std::uint64_t tag : {7u, 8u}) {
    WalletChain w = chain_for(c, tag, true);
    SyncRecord rec = make_sync_record(w, c);
    for (int e = 1; e <= 1013; ++e) {
      BigInt sk = derive_sk(w, e, c);
      ASSERT_NE(sk, 0);
      ASSERT_EQ(oracle_mul(sk, c.base, c), derive_pk_ea(rec, c, e)) << "e=" << e;
    }
  }
}

TEST(Address, Properties) {
  const CurveParams& c = secp256k1();
  Point p = base_mul(424242, c);
  EXPECT_EQ(wallet_address(p, c), wallet_address(p, c));
  EXPECT_NE(wallet_address(p, c), wallet_address(negate(p, c), c));
  EXPECT_EQ(code_of([&] { wallet_address(Point{}, c); }), ErrorCode::kIdentityPoint);
  Hash256 full = sha256(compress(p, c));
  Address a = wallet_address(p, c);
  EXPECT_TRUE(std::equal(a.begin(), a.end(), full.begin()));
}

TEST(SyncRecord, HoldsNoScalarSecret) {
  const CurveParams& c = secp256k1();
  SyncRecord rec = make_sync_record(chain_for(c, 9), c);
  auto& [pk0, hk, g, p, w0] = rec;
  static_assert(std::is_same_v<std::remove_reference_t<decltype(pk0)>, Point>);
  static_assert(std::is_same_v<std::remove_reference_t<decltype(hk)>, Hash256>);
  static_assert(std::is_same_v<std::remove_reference_t<decltype(w0)>, Address>);
  EXPECT_EQ(w0, wallet_address(pk0, c));
  EXPECT_EQ(g, 37);
  EXPECT_EQ(p, (BigInt(1) << 61) - 1);
}

// A naive-Bayes classifier over the 160 address bits, trained on 200 addresses of each chain,
// tries to attribute 1000 fresh addresses. It should do no better than a coin.
TEST(Unlinkability, BitClassifierIsAtChance) {
  const CurveParams& c = secp256k1();
  const WalletChain chains[2] = {chain_for(c, 100), chain_for(c, 200)};
  auto address_bits = [&](const WalletChain& w, int e) {
    Address a = wallet_address(base_mul(derive_sk(w, e, c), c), c);
    std::array<int, 160> bits{};
    for (int i = 0; i < 160; ++i) bits[i] = (a[i / 8] >> (7 - i % 8)) & 1;
    return bits;
  };
  std::array<std::array<double, 160>, 2> ones{};
  const int train = 200;
  for (int k = 0; k < 2; ++k) {
    for (int e = 1; e <= train; ++e) {
      auto bits = address_bits(chains[k], e);
      for (int i = 0; i < 160; ++i) ones[k][i] += bits[i];
    }
  }
  std::mt19937_64 rng(12);
  const int trials = 1000;
  int correct = 0;
  for (int t = 0; t < trials; ++t) {
    int truth = static_cast<int>(rng() & 1);
    auto bits = address_bits(chains[truth], train + 1 + t);
    double score[2] = {0, 0};
    for (int k = 0; k < 2; ++k) {
      for (int i = 0; i < 160; ++i) {
        double p1 = (ones[k][i] + 1) / (train + 2);
        score[k] += std::log(bits[i] ? p1 : 1 - p1);
      }
    }
    int guess = score[1] > score[0] ? 1 : 0;
    correct += guess == truth ? 1 : 0;
  }
  EXPECT_LE(correct, trials * 0.5 + 3 * std::sqrt(trials * 0.25));
}

TEST(Signature, RoundTripAndTamper) {
  const CurveParams& c = secp256k1();
  BigInt sk = 0xC0FFEE;
  Point pk = base_mul(sk, c);
  Bytes msg = {'v', 'o', 't', 'e'};
  Signature s = sign(sk, msg, c);
  EXPECT_TRUE(verify_signature(pk, msg, s, c));
  Bytes other = msg;
  other[0] ^= 1;
  EXPECT_FALSE(verify_signature(pk, other, s, c));
  EXPECT_FALSE(verify_signature(base_mul(sk + 1, c), msg, s, c));
  Signature bad = s;
  bad.s += 1;
  EXPECT_FALSE(verify_signature(pk, msg, bad, c));
}

TEST(Signature, DeterministicEncoding) {
  for (const CurveParams* c : {&secp256k1(), &toy_curve()}) {
    BigInt sk = 77;
    Bytes msg = {1, 2, 3};
    Signature s = sign(sk, msg, *c);
    Bytes enc = encode_signature(s, *c);
    EXPECT_EQ(enc, encode_signature(sign(sk, msg, *c), *c));
    Signature d = decode_signature(enc, *c);
    EXPECT_TRUE(verify_signature(base_mul(sk, *c), msg, d, *c));
    enc.pop_back();
    EXPECT_EQ(code_of([&] { decode_signature(enc, *c); }), ErrorCode::kBadSignature);
  }
}

}  // namespace
}  // namespace aov
