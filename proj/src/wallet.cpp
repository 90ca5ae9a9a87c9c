#include "aov/wallet.hpp"

#include <algorithm>

#include "aov/error.hpp"
#include "aov/hash.hpp"

namespace aov {
namespace {

void check_iteration(const BigInt& e) {
  if (e < 1 || e > max_iteration()) {
    throw Error(ErrorCode::kIterationOutOfRange, "iteration index must be in [1, 2^128 - 1]");
  }
}

}  // namespace

const BigInt& max_iteration() {
  static const BigInt v = (BigInt(1) << 128) - 1;
  return v;
}

void WalletChain::validate(const CurveParams& curve, bool small_field_ok) const {
  if (sk0 < 1 || sk0 >= curve.order) {
    throw Error(ErrorCode::kInvalidParams, "sk0 must lie in [1, q - 1]");
  }
  if (!is_probable_prime(p)) throw Error(ErrorCode::kInvalidParams, "PRNG field p is not prime");
  if (!small_field_ok && p < (BigInt(1) << 31)) {
    throw Error(ErrorCode::kInvalidParams, "PRNG field p must be >= 2^31");
  }
  if (g < 2 || g >= p) throw Error(ErrorCode::kInvalidParams, "g must lie in [2, p - 1]");
  // g must not have small order; probe the first powers.
  BigInt acc = 1;
  const BigInt limit = std::min<BigInt>(BigInt(1024), p - 2);
  for (BigInt k = 1; k <= limit; ++k) {
    acc = acc * g % p;
    if (acc == 1) throw Error(ErrorCode::kInvalidParams, "g has small order");
  }
}

SyncRecord make_sync_record(const WalletChain& chain, const CurveParams& curve) {
  SyncRecord rec;
  rec.pk0 = base_mul(chain.sk0, curve);
  rec.hk = chain.hk;
  rec.g = chain.g;
  rec.p = chain.p;
  rec.w0 = wallet_address(rec.pk0, curve);
  return rec;
}

BigInt derive_offset(const Hash256& hk, const BigInt& g, const BigInt& p, const BigInt& e,
                     const CurveParams& curve, std::uint32_t attempt) {
  check_iteration(e);
  Bytes msg = to_bytes_be(mod_pow(g, e, p), byte_length(p));
  if (attempt != 0) append_u32_be(msg, attempt);
  return from_bytes_be(hmac_sha256(hk, msg)) % curve.order;
}

BigInt sk_from_offset(const BigInt& sk0, const BigInt& offset, const BigInt& order) {
  return mod_floor(sk0 + offset, order);
}

Point pk_from_offset(const Point& pk0, const BigInt& offset, const CurveParams& curve) {
  return add(pk0, base_mul(offset, curve), curve);
}

BigInt derive_sk(const WalletChain& chain, const BigInt& e, const CurveParams& curve) {
  for (std::uint32_t attempt = 0;; ++attempt) {
    BigInt sk = sk_from_offset(chain.sk0, derive_offset(chain.hk, chain.g, chain.p, e, curve, attempt),
                               curve.order);
    if (sk != 0) return sk;
  }
}

Point derive_pk_ea(const SyncRecord& rec, const CurveParams& curve, const BigInt& e) {
  for (std::uint32_t attempt = 0;; ++attempt) {
    Point pk = pk_from_offset(rec.pk0, derive_offset(rec.hk, rec.g, rec.p, e, curve, attempt), curve);
    if (!pk.infinity) return pk;
  }
}

Address wallet_address(const Point& pk, const CurveParams& curve) {
  if (pk.infinity) throw Error(ErrorCode::kIdentityPoint, "the identity has no wallet address");
  const Hash256 digest = sha256(compress(pk, curve));
  Address out{};
  std::copy_n(digest.begin(), out.size(), out.begin());
  return out;
}

}  // namespace aov
