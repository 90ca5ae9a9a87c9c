#pragma once

#include <cstdint>

#include "aov/bigint.hpp"
#include "aov/bytes.hpp"

namespace aov {

/// Group and delay parameters for a Wesolowski VDF over (Z/nZ)^*.
struct VdfParams {
  BigInt modulus;
  std::uint64_t time_param = 1;  // TL: number of sequential squarings
  unsigned prime_bits = 128;     // bit length of the challenge prime

  /// Throws Error(kInvalidParams) unless modulus is odd and > 3, TL >= 1 and
  /// prime_bits is in [32, 256].
  void validate() const;
};

struct VdfCertificate {
  BigInt x;
  BigInt y;
  BigInt proof;
  std::uint64_t time_param = 0;

  friend bool operator==(const VdfCertificate&, const VdfCertificate&) = default;
};

/// Group operation counters. Only operations modulo the group modulus are counted.
struct VdfWork {
  std::uint64_t squarings = 0;
  std::uint64_t multiplications = 0;
};

BigInt hash_to_group(ByteView data, const VdfParams& params);

/// x^(2^TL) mod n by TL sequential squarings.
BigInt vdf_eval(const BigInt& x, const VdfParams& params, VdfWork* work = nullptr);

BigInt hash_to_prime(const BigInt& x, const BigInt& y, std::uint64_t time_param,
                     const VdfParams& params);

/// proof = x^floor(2^TL / B) with B = hash_to_prime(x, y, TL). When built with
/// AOV_CHECK_PROVER_INPUT (the default) the claimed y is re-evaluated and a mismatch throws
/// Error(kInconsistentInput).
BigInt vdf_prove(const BigInt& x, const BigInt& y, const VdfParams& params,
                 VdfWork* work = nullptr);

/// Convenience: eval followed by prove.
VdfCertificate vdf_certify(const BigInt& x, const VdfParams& params);

/// proof^B * x^(2^TL mod B) == y (mod n). Malformed certificates return false.
bool vdf_verify(const VdfCertificate& cert, const VdfParams& params, VdfWork* work = nullptr);

namespace detail {

// Challenge-override hooks used by tests to check the algebra with a chosen B.
BigInt prove_with_challenge(const BigInt& x, const VdfParams& params, const BigInt& challenge,
                            VdfWork* work = nullptr);
bool verify_with_challenge(const VdfCertificate& cert, const VdfParams& params,
                           const BigInt& challenge, VdfWork* work = nullptr);

}  // namespace detail

/// Product of two random primes of bits/2 bits each, drawn from a seeded mt19937_64.
/// The factors are discarded; this is a trusted-setup helper for tests and scenarios.
BigInt generate_rsa_modulus(unsigned bits, std::uint64_t seed);

}  // namespace aov
