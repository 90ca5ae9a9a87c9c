#include "aov/bigint.hpp"

#include <boost/multiprecision/miller_rabin.hpp>

#include <algorithm>
#include <iterator>

#include "aov/error.hpp"

namespace aov {

namespace mp = boost::multiprecision;

Bytes to_bytes_be(const BigInt& v, std::size_t width) {
  if (v < 0) throw Error(ErrorCode::kParse, "negative value has no byte encoding");
  Bytes minimal;
  if (v != 0) mp::export_bits(v, std::back_inserter(minimal), 8, true);
  if (minimal.size() > width) throw Error(ErrorCode::kParse, "value does not fit in field width");
  Bytes out(width - minimal.size(), 0);
  append(out, minimal);
  return out;
}

Bytes to_bytes_be_minimal(const BigInt& v) {
  if (v == 0) return Bytes{0};
  return to_bytes_be(v, byte_length(v));
}

BigInt from_bytes_be(ByteView bytes) {
  BigInt v;
  if (!bytes.empty()) mp::import_bits(v, bytes.begin(), bytes.end(), 8, true);
  return v;
}

BigInt from_bytes_le(ByteView bytes) {
  Bytes reversed(bytes.rbegin(), bytes.rend());
  return from_bytes_be(reversed);
}

std::size_t bit_length(const BigInt& v) { return v == 0 ? 0 : mp::msb(v) + 1; }

std::size_t byte_length(const BigInt& v) { return (bit_length(v) + 7) / 8; }

BigInt parse_bigint(std::string_view text) {
  if (text.empty()) throw Error(ErrorCode::kParse, "empty integer");
  try {
    BigInt v(std::string{text});
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kParse, "not an integer: " + std::string(text));
  }
}

std::string to_decimal(const BigInt& v) { return v.str(); }

BigInt mod_pow(const BigInt& base, const BigInt& exp, const BigInt& mod) {
  return mp::powm(mod_floor(base, mod), exp, mod);
}

BigInt mod_inverse_prime(const BigInt& a, const BigInt& p) { return mod_pow(a, p - 2, p); }

BigInt mod_floor(const BigInt& a, const BigInt& m) {
  BigInt r = a % m;
  if (r < 0) r += m;
  return r;
}

bool is_probable_prime(const BigInt& n, unsigned rounds) {
  if (n < 2) return false;
  return mp::miller_rabin_test(n, rounds);
}

}  // namespace aov
