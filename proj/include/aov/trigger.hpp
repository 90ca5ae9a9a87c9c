#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <optional>

#include "aov/bigint.hpp"
#include "aov/btc_header.hpp"
#include "aov/vdf.hpp"

namespace aov {

using Rational = boost::rational<std::int64_t>;

/// Epoch cadence. All fields are minutes or counts and must be >= 1.
struct EpochSchedule {
  std::int64_t total_time = 1;  // minutes between two regular elections
  std::int64_t ft = 1;          // expected number of epochs
  std::int64_t block_time = 10; // minutes per block
  std::int64_t stride = 1;      // only every stride-th header is processed

  void validate() const;
  friend bool operator==(const EpochSchedule&, const EpochSchedule&) = default;
};

/// total_time / (ft * block_time * stride), exact.
Rational interval_time(const EpochSchedule& s);
/// Integer modulus used for the trigger: ceil(interval_time), at least 1.
std::uint64_t trigger_modulus(const EpochSchedule& s);

/// SHA-256 of the minimal big-endian encoding of y, read as an unsigned integer.
BigInt extract(const BigInt& y);
BigInt trigger_value(const BigInt& a, std::uint64_t m);
inline bool vc_output(const BigInt& b) { return b == 0; }

struct TriggerVerdict {
  bool pow = false;
  bool vdf = false;
  std::optional<BigInt> b;  // set only when both checks passed
  bool triggered = false;
};

/// Full validator check. Throws Error(kMismatchedInput) if cert.x is not the header's group
/// element. The PoW check runs first; the VDF is only verified when PoW passes.
TriggerVerdict evaluate_trigger(const VdfCertificate& cert, const VdfParams& params,
                                const BlockHeader& header, const Target& target,
                                const EpochSchedule& schedule);

bool verify_trigger(const VdfCertificate& cert, const VdfParams& params, const BlockHeader& header,
                    const Target& target, const EpochSchedule& schedule);

/// The group element a header is fed into the VDF as.
BigInt header_to_group(const BlockHeader& header, const VdfParams& params);

}  // namespace aov
