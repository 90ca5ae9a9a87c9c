#include "aov/ec.hpp"

#include <array>

#include "aov/error.hpp"

namespace aov {
namespace {

namespace mp = boost::multiprecision;

// Field arithmetic on residues in [0, p), p < 2^256, in fixed-width integers so the hot loop never
// allocates. For p = 2^256 - 2^32 - 977 products are folded instead of divided.
using Wide = mp::uint512_t;

Wide narrow(const BigInt& v) { return static_cast<Wide>(v); }
BigInt widen(const Wide& v) { return static_cast<BigInt>(v); }

class Field {
 public:
  explicit Field(const BigInt& p) : p_(narrow(p)), pseudo_mersenne_(p == secp256k1_prime()) {
    if (bit_length(p) > 256) throw Error(ErrorCode::kInvalidParams, "field modulus above 256 bits");
  }

  Wide mul(const Wide& a, const Wide& b) const { return reduce(a * b); }
  Wide sqr(const Wide& a) const { return reduce(a * a); }
  Wide add(const Wide& a, const Wide& b) const {
    Wide r = a + b;
    if (r >= p_) r -= p_;
    return r;
  }
  Wide sub(const Wide& a, const Wide& b) const { return a >= b ? Wide(a - b) : Wide(p_ - b + a); }
  Wide small(unsigned k, const Wide& a) const { return reduce(a * k); }
  Wide pow(const Wide& base, const BigInt& exp) const {
    Wide acc = 1;
    for (std::size_t i = bit_length(exp); i-- > 0;) {
      acc = sqr(acc);
      if (mp::bit_test(exp, static_cast<unsigned>(i))) acc = mul(acc, base);
    }
    return acc;
  }
  // Fermat inverse; p is prime.
  Wide inverse(const Wide& a) const { return pow(a, widen(p_) - 2); }

 private:
  static const BigInt& secp256k1_prime() {
    static const BigInt p = (BigInt(1) << 256) - (BigInt(1) << 32) - 977;
    return p;
  }

  Wide reduce(Wide x) const {
    if (!pseudo_mersenne_) return x % p_;
    static const Wide fold = (Wide(1) << 32) + 977;
    static const Wide mask = (Wide(1) << 256) - 1;
    while (x > mask) x = (x >> 256) * fold + (x & mask);
    while (x >= p_) x -= p_;
    return x;
  }

  Wide p_;
  bool pseudo_mersenne_;
};

// Jacobian coordinates (X, Y, Z) represent (X/Z^2, Y/Z^3); Z == 0 is the identity.
struct Jacobian {
  Wide x;
  Wide y;
  Wide z;
};

Jacobian to_jacobian(const Point& pt) {
  if (pt.infinity) return {1, 1, 0};
  return {narrow(pt.x), narrow(pt.y), 1};
}

Point to_affine(const Jacobian& j, const CurveParams& c) {
  if (j.z == 0) return Point{};
  const Field f(c.p);
  const Wide zinv = f.inverse(j.z);
  const Wide zinv2 = f.sqr(zinv);
  return Point::affine(widen(f.mul(j.x, zinv2)), widen(f.mul(f.mul(j.y, zinv2), zinv)));
}

Jacobian jdouble(const Jacobian& pt, const Field& f, const Wide& a) {
  if (pt.z == 0 || pt.y == 0) return {1, 1, 0};
  const Wide yy = f.sqr(pt.y);
  const Wide s = f.small(4, f.mul(pt.x, yy));
  Wide m = f.small(3, f.sqr(pt.x));
  if (a != 0) m = f.add(m, f.mul(a, f.sqr(f.sqr(pt.z))));
  const Wide x3 = f.sub(f.sqr(m), f.small(2, s));
  const Wide y3 = f.sub(f.mul(m, f.sub(s, x3)), f.small(8, f.sqr(yy)));
  const Wide z3 = f.small(2, f.mul(pt.y, pt.z));
  return {x3, y3, z3};
}

Jacobian jadd(const Jacobian& lhs, const Jacobian& rhs, const Field& f, const Wide& a) {
  if (lhs.z == 0) return rhs;
  if (rhs.z == 0) return lhs;
  const Wide z1z1 = f.sqr(lhs.z);
  const Wide z2z2 = f.sqr(rhs.z);
  const Wide u1 = f.mul(lhs.x, z2z2);
  const Wide u2 = f.mul(rhs.x, z1z1);
  const Wide s1 = f.mul(f.mul(lhs.y, rhs.z), z2z2);
  const Wide s2 = f.mul(f.mul(rhs.y, lhs.z), z1z1);
  if (u1 == u2) {
    if (s1 == s2) return jdouble(lhs, f, a);
    return {1, 1, 0};
  }
  const Wide h = f.sub(u2, u1);
  const Wide r = f.sub(s2, s1);
  const Wide hh = f.sqr(h);
  const Wide hhh = f.mul(hh, h);
  const Wide v = f.mul(u1, hh);
  const Wide x3 = f.sub(f.sub(f.sqr(r), hhh), f.small(2, v));
  const Wide y3 = f.sub(f.mul(r, f.sub(v, x3)), f.mul(s1, hhh));
  const Wide z3 = f.mul(f.mul(lhs.z, rhs.z), h);
  return {x3, y3, z3};
}

CurveParams make_secp256k1() {
  CurveParams c;
  c.name = "secp256k1";
  c.p = parse_bigint("0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F");
  c.a = 0;
  c.b = 7;
  c.base = Point::affine(
      parse_bigint("0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798"),
      parse_bigint("0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8"));
  c.order = parse_bigint("0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141");
  return c;
}

CurveParams make_toy() {
  CurveParams c;
  c.name = "toy1009";
  c.p = 1009;
  c.a = 1;
  c.b = 14;
  c.base = Point::affine(0, 425);
  c.order = 1013;
  return c;
}

}  // namespace

void CurveParams::validate() const {
  if (!is_probable_prime(p)) throw Error(ErrorCode::kInvalidParams, "field modulus is not prime");
  if (!on_curve(base, *this)) throw Error(ErrorCode::kInvalidParams, "base point not on curve");
  if (!is_probable_prime(order)) throw Error(ErrorCode::kInvalidParams, "group order not prime");
  const Field f(p);
  Jacobian acc{1, 1, 0};
  Jacobian addend = to_jacobian(base);
  for (std::size_t i = 0; i < bit_length(order); ++i) {
    if (mp::bit_test(order, static_cast<unsigned>(i))) acc = jadd(acc, addend, f, narrow(a));
    addend = jdouble(addend, f, narrow(a));
  }
  if (acc.z != 0) throw Error(ErrorCode::kInvalidParams, "order * base is not the identity");
}

const CurveParams& secp256k1() {
  static const CurveParams c = make_secp256k1();
  return c;
}

const CurveParams& toy_curve() {
  static const CurveParams c = make_toy();
  return c;
}

bool on_curve(const Point& pt, const CurveParams& c) {
  if (pt.infinity) return true;
  if (pt.x < 0 || pt.x >= c.p || pt.y < 0 || pt.y >= c.p) return false;
  return mod_floor(pt.y * pt.y - (pt.x * pt.x * pt.x + c.a * pt.x + c.b), c.p) == 0;
}

Point negate(const Point& pt, const CurveParams& c) {
  if (pt.infinity) return pt;
  return Point::affine(pt.x, mod_floor(-pt.y, c.p));
}

Point add(const Point& lhs, const Point& rhs, const CurveParams& c) {
  return to_affine(jadd(to_jacobian(lhs), to_jacobian(rhs), Field(c.p), narrow(c.a)), c);
}

Point scalar_mul(const BigInt& k, const Point& pt, const CurveParams& c) {
  const BigInt scalar = mod_floor(k, c.order);
  if (scalar == 0 || pt.infinity) return Point{};
  const Field f(c.p);
  const Wide a = narrow(c.a);
  // fixed 4-bit window: table[i] = i * pt
  std::array<Jacobian, 16> table;
  table[0] = {1, 1, 0};
  table[1] = to_jacobian(pt);
  for (std::size_t i = 2; i < table.size(); ++i) table[i] = jadd(table[i - 1], table[1], f, a);
  Jacobian acc{1, 1, 0};
  const std::size_t windows = (bit_length(scalar) + 3) / 4;
  for (std::size_t w = windows; w-- > 0;) {
    for (int d = 0; d < 4; ++d) acc = jdouble(acc, f, a);
    const auto digit = static_cast<unsigned>(static_cast<std::uint64_t>((scalar >> (4 * w)) & 15));
    if (digit != 0) acc = jadd(acc, table[digit], f, a);
  }
  return to_affine(acc, c);
}

Bytes compress(const Point& pt, const CurveParams& c) {
  if (pt.infinity) throw Error(ErrorCode::kIdentityPoint, "the identity has no encoding");
  Bytes out{static_cast<std::uint8_t>(mp::bit_test(pt.y, 0) ? 0x03 : 0x02)};
  append(out, to_bytes_be(pt.x, c.field_bytes()));
  return out;
}

BigInt sqrt_mod_prime(const BigInt& v, const BigInt& p) {
  const BigInt a = mod_floor(v, p);
  if (a == 0) return 0;
  if (mod_pow(a, (p - 1) / 2, p) != 1) throw Error(ErrorCode::kInvalidPoint, "not a square");
  if (p % 4 == 3) return mod_pow(a, (p + 1) / 4, p);
  BigInt q = p - 1;
  unsigned s = 0;
  while (!mp::bit_test(q, 0)) {
    q >>= 1;
    ++s;
  }
  BigInt z = 2;
  while (mod_pow(z, (p - 1) / 2, p) != p - 1) ++z;
  BigInt m = s;
  BigInt cval = mod_pow(z, q, p);
  BigInt t = mod_pow(a, q, p);
  BigInt r = mod_pow(a, (q + 1) / 2, p);
  while (t != 1) {
    unsigned i = 0;
    BigInt t2 = t;
    while (t2 != 1) {
      t2 = t2 * t2 % p;
      ++i;
    }
    BigInt bval = cval;
    for (BigInt j = 0; j < m - i - 1; ++j) bval = bval * bval % p;
    m = i;
    cval = bval * bval % p;
    t = t * cval % p;
    r = r * bval % p;
  }
  return r;
}

Point decompress(ByteView bytes, const CurveParams& c) {
  if (bytes.size() != 1 + c.field_bytes() || (bytes[0] != 0x02 && bytes[0] != 0x03)) {
    throw Error(ErrorCode::kInvalidPoint, "bad compressed point encoding");
  }
  const BigInt x = from_bytes_be(bytes.subspan(1));
  if (x >= c.p) throw Error(ErrorCode::kInvalidPoint, "x coordinate out of range");
  BigInt y;
  if (c.p % 4 == 3 && bit_length(c.p) <= 256) {
    const Field f(c.p);
    const Wide rhs = narrow(mod_floor(x * x * x + c.a * x + c.b, c.p));
    const Wide root = f.pow(rhs, (c.p + 1) / 4);
    if (f.sqr(root) != rhs) throw Error(ErrorCode::kInvalidPoint, "not a square");
    y = widen(root);
  } else {
    y = sqrt_mod_prime(x * x * x + c.a * x + c.b, c.p);
  }
  if (mp::bit_test(y, 0) != (bytes[0] == 0x03)) y = mod_floor(-y, c.p);
  Point pt = Point::affine(x, y);
  if (!on_curve(pt, c)) throw Error(ErrorCode::kInvalidPoint, "decoded point not on curve");
  return pt;
}

}  // namespace aov
