#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <string>
#include <string_view>

#include "aov/bytes.hpp"

namespace aov {

using BigInt = boost::multiprecision::cpp_int;

/// Big-endian, left-padded to `width` bytes. Throws if the value does not fit.
Bytes to_bytes_be(const BigInt& v, std::size_t width);
/// Minimal big-endian encoding; zero encodes as a single 0x00 byte.
Bytes to_bytes_be_minimal(const BigInt& v);
BigInt from_bytes_be(ByteView bytes);
BigInt from_bytes_le(ByteView bytes);

std::size_t bit_length(const BigInt& v);
std::size_t byte_length(const BigInt& v);

/// Decimal, or hex when prefixed with 0x.
BigInt parse_bigint(std::string_view text);
std::string to_decimal(const BigInt& v);

BigInt mod_pow(const BigInt& base, const BigInt& exp, const BigInt& mod);
/// Inverse modulo a prime, via Fermat.
BigInt mod_inverse_prime(const BigInt& a, const BigInt& p);
/// Non-negative residue of a (possibly negative) value.
BigInt mod_floor(const BigInt& a, const BigInt& m);

bool is_probable_prime(const BigInt& n, unsigned rounds = 64);

}  // namespace aov
