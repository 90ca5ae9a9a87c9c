#pragma once

#include <array>

#include "aov/bigint.hpp"
#include "aov/bytes.hpp"
#include "aov/ec.hpp"

namespace aov {

using Address = std::array<std::uint8_t, 20>;

/// Iteration indices run over [1, 2^128 - 1].
const BigInt& max_iteration();

/// Participant-side material. Only the participant ever holds sk0.
struct WalletChain {
  BigInt sk0;
  Hash256 hk{};  // secret shared with the EA at registration
  BigInt g;      // generator of F_p^*
  BigInt p;      // PRNG field prime, unrelated to the curve field

  /// `small_field_ok` admits p < 2^31 for toy configurations.
  void validate(const CurveParams& curve, bool small_field_ok = false) const;
};

/// What the EA keeps after registration. Holds no scalar secret.
struct SyncRecord {
  Point pk0;
  Hash256 hk{};
  BigInt g;
  BigInt p;
  Address w0{};
};

SyncRecord make_sync_record(const WalletChain& chain, const CurveParams& curve);

/// HMAC-SHA-256(hk, be(g^e mod p)) mod q. A non-zero `attempt` appends be32(attempt) to the
/// message; it is only used to step past the negligible zero-key event.
BigInt derive_offset(const Hash256& hk, const BigInt& g, const BigInt& p, const BigInt& e,
                     const CurveParams& curve, std::uint32_t attempt = 0);

BigInt sk_from_offset(const BigInt& sk0, const BigInt& offset, const BigInt& order);
Point pk_from_offset(const Point& pk0, const BigInt& offset, const CurveParams& curve);

/// SK_e = sk0 + offset(e) mod q.
BigInt derive_sk(const WalletChain& chain, const BigInt& e, const CurveParams& curve);
/// PK_e = pk0 + offset(e) * BP, computed from public data plus hk.
Point derive_pk_ea(const SyncRecord& rec, const CurveParams& curve, const BigInt& e);

/// First 20 bytes of SHA-256 over the compressed point.
Address wallet_address(const Point& pk, const CurveParams& curve);

}  // namespace aov
