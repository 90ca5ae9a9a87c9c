#include "aov/signature.hpp"

#include "aov/error.hpp"
#include "aov/hash.hpp"

namespace aov {
namespace {

BigInt challenge(const Point& r, const Point& pk, ByteView message, const CurveParams& curve) {
  Bytes buf = compress(r, curve);
  append(buf, compress(pk, curve));
  append(buf, message);
  return from_bytes_be(sha256(buf)) % curve.order;
}

}  // namespace

Signature sign(const BigInt& sk, ByteView message, const CurveParams& curve) {
  const Bytes key = to_bytes_be(mod_floor(sk, curve.order), curve.scalar_bytes());
  const Point pk = base_mul(sk, curve);
  for (std::uint32_t attempt = 0;; ++attempt) {
    Bytes msg(message.begin(), message.end());
    append_u32_be(msg, attempt);
    const BigInt k = from_bytes_be(hmac_sha256(key, msg)) % curve.order;
    if (k == 0) continue;
    Signature sig;
    sig.r = base_mul(k, curve);
    sig.s = mod_floor(k + challenge(sig.r, pk, message, curve) * sk, curve.order);
    return sig;
  }
}

bool verify_signature(const Point& pk, ByteView message, const Signature& sig,
                      const CurveParams& curve) {
  if (pk.infinity || sig.r.infinity || !on_curve(pk, curve) || !on_curve(sig.r, curve)) {
    return false;
  }
  if (sig.s < 0 || sig.s >= curve.order) return false;
  const Point lhs = base_mul(sig.s, curve);
  const Point rhs = add(sig.r, scalar_mul(challenge(sig.r, pk, message, curve), pk, curve), curve);
  return lhs == rhs;
}

Bytes encode_signature(const Signature& sig, const CurveParams& curve) {
  Bytes out = compress(sig.r, curve);
  append(out, to_bytes_be(sig.s, curve.scalar_bytes()));
  return out;
}

Signature decode_signature(ByteView bytes, const CurveParams& curve) {
  const std::size_t point_len = 1 + curve.field_bytes();
  if (bytes.size() != point_len + curve.scalar_bytes()) {
    throw Error(ErrorCode::kBadSignature, "signature has the wrong length");
  }
  Signature sig;
  try {
    sig.r = decompress(bytes.first(point_len), curve);
  } catch (const Error&) {
    throw Error(ErrorCode::kBadSignature, "signature nonce point is invalid");
  }
  sig.s = from_bytes_be(bytes.subspan(point_len));
  return sig;
}

}  // namespace aov
