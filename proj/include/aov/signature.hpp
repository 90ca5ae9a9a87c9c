#pragma once

#include "aov/bigint.hpp"
#include "aov/bytes.hpp"
#include "aov/ec.hpp"

namespace aov {

/// Schnorr signature (R, s) with s*G == R + H(R || P || m)*P.
struct Signature {
  Point r;
  BigInt s;
};

/// Deterministic: the nonce is HMAC-SHA-256 keyed by the secret over the message.
Signature sign(const BigInt& sk, ByteView message, const CurveParams& curve);
bool verify_signature(const Point& pk, ByteView message, const Signature& sig,
                      const CurveParams& curve);

Bytes encode_signature(const Signature& sig, const CurveParams& curve);
/// Throws Error(kBadSignature) on malformed bytes.
Signature decode_signature(ByteView bytes, const CurveParams& curve);

}  // namespace aov
