#pragma once

#include <nlohmann/json.hpp>

#include <map>

#include "aov/btc_header.hpp"
#include "aov/ec.hpp"
#include "aov/election.hpp"
#include "aov/trigger.hpp"
#include "aov/vdf.hpp"
#include "aov/vote_protocol.hpp"
#include "aov/wallet.hpp"

// JSON encodings shared by the event log, scenario files and CLI. Big integers are decimal
// strings; byte strings, points (compressed) and headers are lowercase hex.
namespace aov::codec {

using nlohmann::json;

json bigint_json(const BigInt& v);
BigInt bigint_from(const json& j);

json schedule_json(const EpochSchedule& s);
EpochSchedule schedule_from(const json& j);

json vdf_params_json(const VdfParams& p);
VdfParams vdf_params_from(const json& j);

/// {x, y, pi, tl, n}
json certificate_json(const VdfCertificate& c, const BigInt& modulus);
VdfCertificate certificate_from(const json& j);

json point_json(const Point& pt, const CurveParams& c);
Point point_from(const json& j, const CurveParams& c);

json params_json(const ElectionParams& p);
ElectionParams params_from(const json& j);

json openings_json(const std::map<Address, Opening>& openings);
std::map<Address, Opening> openings_from(const json& j);

json tally_json(const TallyResult& t);

json sync_record_json(const SyncRecord& r, const CurveParams& c);
SyncRecord sync_record_from(const json& j, const CurveParams& c);

/// Reads a required field, raising Error(kParse) with the key name when absent.
const json& field(const json& j, const char* key);

}  // namespace aov::codec
