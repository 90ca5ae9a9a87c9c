#include "aov/trigger.hpp"

#include "aov/error.hpp"
#include "aov/hash.hpp"

namespace aov {

void EpochSchedule::validate() const {
  if (total_time < 1 || ft < 1 || block_time < 1 || stride < 1) {
    throw Error(ErrorCode::kInvalidParams, "schedule fields must all be >= 1");
  }
  if (total_time / ft / block_time / stride < 1) {
    throw Error(ErrorCode::kInvalidParams, "interval time must be at least one processed block");
  }
}

Rational interval_time(const EpochSchedule& s) {
  s.validate();
  return Rational(s.total_time, s.ft * s.block_time * s.stride);
}

std::uint64_t trigger_modulus(const EpochSchedule& s) {
  const Rational t = interval_time(s);
  std::int64_t m = t.numerator() / t.denominator();
  if (t.numerator() % t.denominator() != 0) ++m;
  return static_cast<std::uint64_t>(m < 1 ? 1 : m);
}

BigInt extract(const BigInt& y) { return from_bytes_be(sha256(to_bytes_be_minimal(y))); }

BigInt trigger_value(const BigInt& a, std::uint64_t m) {
  if (m < 1) throw Error(ErrorCode::kInvalidParams, "trigger modulus must be >= 1");
  return a % BigInt(m);
}

BigInt header_to_group(const BlockHeader& header, const VdfParams& params) {
  return hash_to_group(encode(header), params);
}

TriggerVerdict evaluate_trigger(const VdfCertificate& cert, const VdfParams& params,
                                const BlockHeader& header, const Target& target,
                                const EpochSchedule& schedule) {
  if (cert.x != header_to_group(header, params)) {
    throw Error(ErrorCode::kMismatchedInput, "certificate input does not match the header");
  }
  TriggerVerdict v;
  v.pow = check_pow(header, target);
  if (!v.pow) return v;
  v.vdf = vdf_verify(cert, params);
  if (!v.vdf) return v;
  v.b = trigger_value(extract(cert.y), trigger_modulus(schedule));
  v.triggered = vc_output(*v.b);
  return v;
}

bool verify_trigger(const VdfCertificate& cert, const VdfParams& params, const BlockHeader& header,
                    const Target& target, const EpochSchedule& schedule) {
  return evaluate_trigger(cert, params, header, target, schedule).triggered;
}

}  // namespace aov
