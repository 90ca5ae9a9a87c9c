#include "aov/vdf.hpp"

#include <random>

#include "aov/error.hpp"
#include "aov/hash.hpp"

namespace aov {
namespace {

namespace mp = boost::multiprecision;

// Left-to-right square-and-multiply that always performs exactly `width` squarings, so the
// work depends only on the exponent's declared width.
BigInt fixed_width_pow(const BigInt& base, const BigInt& exp, std::size_t width, const BigInt& n,
                       VdfWork* work) {
  BigInt result = 1;
  for (std::size_t i = width; i-- > 0;) {
    result = result * result % n;
    if (work) ++work->squarings;
    if (mp::bit_test(exp, static_cast<unsigned>(i))) {
      result = result * base % n;
      if (work) ++work->multiplications;
    }
  }
  return result;
}

bool in_group(const BigInt& v, const BigInt& n) {
  return v >= 1 && v < n && mp::gcd(v, n) == 1;
}

BigInt random_prime(unsigned bits, std::mt19937_64& rng) {
  const std::size_t nbytes = (bits + 7) / 8;
  for (;;) {
    Bytes raw(nbytes);
    for (auto& b : raw) b = static_cast<std::uint8_t>(rng());
    BigInt v = from_bytes_be(raw);
    v >>= nbytes * 8 - bits;
    mp::bit_set(v, bits - 1);
    mp::bit_set(v, bits - 2);
    mp::bit_set(v, 0);
    while (bit_length(v) == bits) {
      if (is_probable_prime(v, 64)) return v;
      v += 2;
    }
  }
}

}  // namespace

void VdfParams::validate() const {
  if (modulus <= 3 || !mp::bit_test(modulus, 0)) {
    throw Error(ErrorCode::kInvalidParams, "modulus must be odd and greater than 3");
  }
  if (time_param < 1) throw Error(ErrorCode::kInvalidParams, "time parameter must be >= 1");
  if (prime_bits < 32 || prime_bits > 256) {
    throw Error(ErrorCode::kInvalidParams, "prime_bits must be in [32, 256]");
  }
}

BigInt hash_to_group(ByteView data, const VdfParams& params) {
  if (data.empty()) throw Error(ErrorCode::kInvalidParams, "hash_to_group needs non-empty data");
  // 128 extra bits keep the reduction bias negligible.
  const Bytes expanded = sha256_expand(data, byte_length(params.modulus) + 16);
  BigInt v = from_bytes_be(expanded) % params.modulus;
  if (v < 2) v = 2;
  return v;
}

BigInt vdf_eval(const BigInt& x, const VdfParams& params, VdfWork* work) {
  const BigInt& n = params.modulus;
  BigInt y = mod_floor(x, n);
  for (std::uint64_t i = 0; i < params.time_param; ++i) {
    y = y * y % n;
  }
  if (work) work->squarings += params.time_param;
  return y;
}

BigInt hash_to_prime(const BigInt& x, const BigInt& y, std::uint64_t time_param,
                     const VdfParams& params) {
  const std::size_t width = byte_length(params.modulus);
  Bytes msg = to_bytes_be(mod_floor(x, params.modulus), width);
  append(msg, to_bytes_be(mod_floor(y, params.modulus), width));
  append_u64_be(msg, time_param);

  const std::size_t nbytes = (params.prime_bits + 7) / 8;
  BigInt candidate = from_bytes_be(sha256_expand(msg, nbytes));
  candidate >>= nbytes * 8 - params.prime_bits;
  mp::bit_set(candidate, params.prime_bits - 1);
  mp::bit_set(candidate, 0);
  while (!is_probable_prime(candidate, 64)) candidate += 2;
  return candidate;
}

namespace detail {

BigInt prove_with_challenge(const BigInt& x, const VdfParams& params, const BigInt& challenge,
                            VdfWork* work) {
  // Long division of 2^TL by B, one quotient bit per squaring.
  const BigInt& n = params.modulus;
  const BigInt base = mod_floor(x, n);
  BigInt proof = 1;
  BigInt remainder = 1;
  for (std::uint64_t i = 0; i < params.time_param; ++i) {
    remainder <<= 1;
    proof = proof * proof % n;
    if (work) ++work->squarings;
    if (remainder >= challenge) {
      remainder -= challenge;
      proof = proof * base % n;
      if (work) ++work->multiplications;
    }
  }
  return proof;
}

bool verify_with_challenge(const VdfCertificate& cert, const VdfParams& params,
                           const BigInt& challenge, VdfWork* work) {
  const BigInt& n = params.modulus;
  if (!in_group(cert.x, n) || !in_group(cert.y, n) || !in_group(cert.proof, n)) return false;
  if (challenge < 2) return false;
  const BigInt residue = mp::powm(BigInt(2), BigInt(cert.time_param), challenge);
  const std::size_t width = bit_length(challenge);
  const BigInt lhs = fixed_width_pow(cert.proof, challenge, width, n, work) *
                     fixed_width_pow(cert.x, residue, width, n, work) % n;
  if (work) ++work->multiplications;
  return lhs == cert.y;
}

}  // namespace detail

BigInt vdf_prove(const BigInt& x, const BigInt& y, const VdfParams& params, VdfWork* work) {
#ifdef AOV_CHECK_PROVER_INPUT
  if (vdf_eval(x, params) != mod_floor(y, params.modulus)) {
    throw Error(ErrorCode::kInconsistentInput, "claimed output is not eval(x)");
  }
#endif
  const BigInt challenge = hash_to_prime(x, y, params.time_param, params);
  return detail::prove_with_challenge(x, params, challenge, work);
}

VdfCertificate vdf_certify(const BigInt& x, const VdfParams& params) {
  VdfCertificate cert;
  cert.x = mod_floor(x, params.modulus);
  cert.y = vdf_eval(cert.x, params);
  cert.proof = detail::prove_with_challenge(
      cert.x, params, hash_to_prime(cert.x, cert.y, params.time_param, params));
  cert.time_param = params.time_param;
  return cert;
}

bool vdf_verify(const VdfCertificate& cert, const VdfParams& params, VdfWork* work) {
  if (cert.time_param != params.time_param) return false;
  const BigInt& n = params.modulus;
  if (!in_group(cert.x, n) || !in_group(cert.y, n) || !in_group(cert.proof, n)) return false;
  const BigInt challenge = hash_to_prime(cert.x, cert.y, cert.time_param, params);
  return detail::verify_with_challenge(cert, params, challenge, work);
}

BigInt generate_rsa_modulus(unsigned bits, std::uint64_t seed) {
  if (bits < 16) throw Error(ErrorCode::kInvalidParams, "modulus needs at least 16 bits");
  std::mt19937_64 rng(seed);
  for (;;) {
    BigInt p = random_prime(bits / 2, rng);
    BigInt q = random_prime(bits - bits / 2, rng);
    if (p != q) return p * q;
  }
}

}  // namespace aov
