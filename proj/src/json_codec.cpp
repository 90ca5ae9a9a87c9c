#include "aov/json_codec.hpp"

#include "aov/error.hpp"

namespace aov::codec {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw Error(ErrorCode::kParse, std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

json bigint_json(const BigInt& v) { return to_decimal(v); }

BigInt bigint_from(const json& j) {
  if (j.is_number_unsigned()) return BigInt(j.get<std::uint64_t>());
  if (j.is_number_integer()) return BigInt(j.get<std::int64_t>());
  if (j.is_string()) return parse_bigint(j.get<std::string>());
  throw Error(ErrorCode::kParse, "expected an integer or integer string");
}

json schedule_json(const EpochSchedule& s) {
  return {{"total_time", s.total_time}, {"ft", s.ft}, {"block_time", s.block_time},
          {"stride", s.stride}};
}

EpochSchedule schedule_from(const json& j) {
  EpochSchedule s;
  s.total_time = field(j, "total_time").get<std::int64_t>();
  s.ft = field(j, "ft").get<std::int64_t>();
  s.block_time = j.value("block_time", std::int64_t{10});
  s.stride = j.value("stride", std::int64_t{1});
  s.validate();
  return s;
}

json vdf_params_json(const VdfParams& p) {
  return {{"modulus", bigint_json(p.modulus)}, {"tl", p.time_param}, {"prime_bits", p.prime_bits}};
}

VdfParams vdf_params_from(const json& j) {
  VdfParams p;
  p.modulus = bigint_from(field(j, "modulus"));
  p.time_param = field(j, "tl").get<std::uint64_t>();
  p.prime_bits = j.value("prime_bits", 128u);
  p.validate();
  return p;
}

json certificate_json(const VdfCertificate& c, const BigInt& modulus) {
  return {{"x", bigint_json(c.x)},
          {"y", bigint_json(c.y)},
          {"pi", bigint_json(c.proof)},
          {"tl", c.time_param},
          {"n", bigint_json(modulus)}};
}

VdfCertificate certificate_from(const json& j) {
  VdfCertificate c;
  c.x = bigint_from(field(j, "x"));
  c.y = bigint_from(field(j, "y"));
  c.proof = bigint_from(field(j, "pi"));
  c.time_param = field(j, "tl").get<std::uint64_t>();
  return c;
}

json point_json(const Point& pt, const CurveParams& c) { return to_hex(compress(pt, c)); }

Point point_from(const json& j, const CurveParams& c) {
  return decompress(from_hex(j.get<std::string>()), c);
}

json params_json(const ElectionParams& p) {
  const CurveParams& c = p.curve_params();
  return {{"curve", p.curve},
          {"candidate_count", p.candidate_count},
          {"supermajority_threshold", p.supermajority_threshold},
          {"min_participation", p.min_participation},
          {"booth_grid", {p.booth_rows, p.booth_cols}},
          {"schedule", schedule_json(p.schedule)},
          {"ea_public_key", point_json(p.ea_public_key, c)},
          {"vdf", vdf_params_json(p.vdf)},
          {"seed", to_hex(p.seed)},
          {"baseline_turnout", p.baseline_turnout},
          {"baseline_tally", p.baseline_tally},
          {"incumbent", p.incumbent},
          {"main_election", p.main_election},
          {"protocol", p.protocol},
          {"booth_seed", p.booth_seed}};
}

ElectionParams params_from(const json& j) {
  ElectionParams p;
  p.curve = j.value("curve", std::string("secp256k1"));
  p.candidate_count = field(j, "candidate_count").get<std::uint32_t>();
  p.supermajority_threshold = j.value("supermajority_threshold", 0.70);
  p.min_participation = j.value("min_participation", 0.70);
  const json& grid = field(j, "booth_grid");
  p.booth_rows = grid.at(0).get<std::uint32_t>();
  p.booth_cols = grid.at(1).get<std::uint32_t>();
  p.schedule = schedule_from(field(j, "schedule"));
  p.ea_public_key = point_from(field(j, "ea_public_key"), p.curve_params());
  p.vdf = vdf_params_from(field(j, "vdf"));
  p.seed = from_hex(j.value("seed", std::string{}));
  p.baseline_turnout = j.value("baseline_turnout", std::uint64_t{0});
  p.baseline_tally = j.value("baseline_tally", std::vector<std::uint64_t>{});
  p.incumbent = j.value("incumbent", 0u);
  p.main_election = j.value("main_election", false);
  p.protocol = j.value("protocol", std::string("plaintext"));
  p.booth_seed = j.value("booth_seed", std::uint64_t{0});
  return p;
}

json openings_json(const std::map<Address, Opening>& openings) {
  json out = json::object();
  for (const auto& [addr, o] : openings) {
    out[to_hex(addr)] = {{"choice", o.choice}, {"key", to_hex(o.blinding_key)}};
  }
  return out;
}

std::map<Address, Opening> openings_from(const json& j) {
  std::map<Address, Opening> out;
  for (const auto& [key, value] : j.items()) {
    out[fixed_from_hex<20>(key)] =
        Opening{field(value, "choice").get<std::uint32_t>(), from_hex(field(value, "key").get<std::string>())};
  }
  return out;
}

json tally_json(const TallyResult& t) {
  return {{"epoch", t.epoch},       {"triggered_at", t.triggered_at},
          {"per_booth", t.per_booth}, {"totals", t.totals},
          {"turnout", t.turnout},   {"rejected", t.rejected},
          {"previous_winner", t.previous_winner}, {"winner", t.winner}};
}

json sync_record_json(const SyncRecord& r, const CurveParams& c) {
  return {{"pk0", point_json(r.pk0, c)},
          {"hk", to_hex(r.hk)},
          {"g", bigint_json(r.g)},
          {"p", bigint_json(r.p)}};
}

SyncRecord sync_record_from(const json& j, const CurveParams& c) {
  SyncRecord r;
  r.pk0 = point_from(field(j, "pk0"), c);
  r.hk = fixed_from_hex<32>(field(j, "hk").get<std::string>());
  r.g = bigint_from(field(j, "g"));
  r.p = bigint_from(field(j, "p"));
  r.w0 = wallet_address(r.pk0, c);
  return r;
}

}  // namespace aov::codec
