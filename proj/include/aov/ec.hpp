#pragma once

#include <string>

#include "aov/bigint.hpp"
#include "aov/bytes.hpp"

namespace aov {

/// Affine point on a short Weierstrass curve; default-constructed value is the identity.
struct Point {
  BigInt x;
  BigInt y;
  bool infinity = true;

  static Point affine(BigInt x, BigInt y) { return Point{std::move(x), std::move(y), false}; }
  friend bool operator==(const Point&, const Point&) = default;
};

/// y^2 = x^3 + a*x + b over F_p, base point of prime order `order`.
struct CurveParams {
  std::string name;
  BigInt p;
  BigInt a;
  BigInt b;
  Point base;
  BigInt order;

  /// Throws Error(kInvalidParams) unless the base point is on the curve, the order is prime and
  /// order * base is the identity.
  void validate() const;
  std::size_t field_bytes() const { return byte_length(p); }
  std::size_t scalar_bytes() const { return byte_length(order); }
};

const CurveParams& secp256k1();
/// y^2 = x^3 + x + 14 over F_1009, base (0, 425) of prime order 1013. Small enough to enumerate.
const CurveParams& toy_curve();

bool on_curve(const Point& pt, const CurveParams& c);
Point negate(const Point& pt, const CurveParams& c);
Point add(const Point& lhs, const Point& rhs, const CurveParams& c);
/// k * pt for any integer k (reduced mod the group order).
Point scalar_mul(const BigInt& k, const Point& pt, const CurveParams& c);
inline Point base_mul(const BigInt& k, const CurveParams& c) { return scalar_mul(k, c.base, c); }

/// SEC1 compressed encoding: 0x02/0x03 || x. Throws Error(kIdentityPoint) for the identity.
Bytes compress(const Point& pt, const CurveParams& c);
/// Throws Error(kInvalidPoint) if the bytes do not decode to a curve point.
Point decompress(ByteView bytes, const CurveParams& c);

/// Square root modulo an odd prime (Tonelli-Shanks). Throws Error(kInvalidPoint) for non-residues.
BigInt sqrt_mod_prime(const BigInt& v, const BigInt& p);

}  // namespace aov
