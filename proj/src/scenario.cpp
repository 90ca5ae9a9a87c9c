#include "aov/scenario.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include "aov/hash.hpp"
#include "aov/json_codec.hpp"
#include "aov/signature.hpp"

namespace aov {

using nlohmann::json;

// ---------------------------------------------------------------------------------------------
// event log

std::string args_digest(const json& args) { return to_hex(sha256(as_bytes(args.dump()))); }

json Event::to_json() const {
  return {{"seq", seq}, {"op", op}, {"args", args}, {"args_digest", args_digest},
          {"state_hash", state_hash}};
}

Event Event::from_json(const json& j) {
  Event e;
  e.seq = codec::field(j, "seq").get<std::uint64_t>();
  e.op = codec::field(j, "op").get<std::string>();
  e.args = codec::field(j, "args");
  e.args_digest = codec::field(j, "args_digest").get<std::string>();
  e.state_hash = codec::field(j, "state_hash").get<std::string>();
  return e;
}

void write_event_log(const std::filesystem::path& path, const std::vector<Event>& events) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kParse, "cannot write " + path.string());
  for (const Event& e : events) out << e.to_json().dump() << '\n';
}

std::vector<Event> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParse, "cannot read " + path.string());
  std::vector<Event> events;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      events.push_back(Event::from_json(json::parse(line)));
    } catch (const json::exception& ex) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    } catch (const Error& ex) {
      throw Error(ErrorCode::kParse, path.string() + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return events;
}

// ---------------------------------------------------------------------------------------------
// command dispatch

namespace {

json target_json(const Target& t) { return to_hex(to_bytes_be(t.value(), 32)); }
Target target_from(const json& j) { return Target(from_bytes_be(from_hex(j.get<std::string>()))); }

Address address_from(const json& j) { return fixed_from_hex<20>(j.get<std::string>()); }
Bytes bytes_from(const json& j) { return from_hex(j.get<std::string>()); }

}  // namespace

json apply_command(Election& election, const std::string& op, const json& args) {
  using codec::field;
  if (op == "setup") {
    election.setup(codec::params_from(args));
    return json::object();
  }
  const CurveParams& curve = election.params().curve_params();
  if (op == "registration") {
    election.registration(address_from(field(args, "addr")), field(args, "valid").get<bool>(),
                          bytes_from(field(args, "sig")));
    return json::object();
  }
  if (op == "voting") {
    election.voting(address_from(field(args, "addr")), codec::point_from(field(args, "pk"), curve),
                    bytes_from(field(args, "blinded")), bytes_from(field(args, "zkp")),
                    bytes_from(field(args, "sig")));
    return json::object();
  }
  if (op == "revote") {
    election.revote(codec::point_from(field(args, "prev_pk"), curve),
                    address_from(field(args, "next")), bytes_from(field(args, "sig")));
    return json::object();
  }
  if (op == "bpo_add") {
    election.bpo_add(target_from(field(args, "target")),
                     header_from_hex(field(args, "header").get<std::string>()),
                     field(args, "height").get<std::uint64_t>(),
                     field(args, "chain_tip").get<std::uint64_t>());
    return json::object();
  }
  if (op == "vdf_add") {
    election.vdf_add(codec::certificate_from(field(args, "cert")),
                     field(args, "height").get<std::uint64_t>());
    return json::object();
  }
  if (op == "tally") {
    std::map<Address, Opening> openings;
    if (args.contains("openings")) openings = codec::openings_from(args.at("openings"));
    TallyOutcome out = election.tally(field(args, "height").get<std::uint64_t>(), openings);
    json r = {{"pow", out.verdict.pow}, {"vdf", out.verdict.vdf}, {"triggered", out.triggered()}};
    if (out.result) r["result"] = codec::tally_json(*out.result);
    return r;
  }
  throw Error(ErrorCode::kParse, "unknown operation '" + op + "'");
}

Hash256 replay(const std::vector<Event>& events) {
  Election election;
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& ev = events[i];
    auto diverge = [&](const std::string& why) {
      return Error(ErrorCode::kDivergence, "seq " + std::to_string(ev.seq) + ": " + why);
    };
    if (ev.seq != i) throw diverge("expected seq " + std::to_string(i));
    if (args_digest(ev.args) != ev.args_digest) throw diverge("args digest mismatch");
    try {
      json r = apply_command(election, ev.op, ev.args);
      if (ev.op == "tally" && !r.at("triggered").get<bool>()) throw diverge("tally did not trigger");
    } catch (const Error& ex) {
      if (ex.code() == ErrorCode::kDivergence) throw;
      throw diverge(std::string("operation rejected: ") + ex.what());
    } catch (const json::exception& ex) {
      throw diverge(std::string("malformed args: ") + ex.what());
    }
    if (to_hex(election.state_hash()) != ev.state_hash) throw diverge("state hash mismatch");
  }
  return election.state_hash();
}

// ---------------------------------------------------------------------------------------------
// scenario parsing with line numbers

namespace {

// Counts lines as nlohmann's lexer pulls characters, so SAX events can be tagged with the line
// of the last significant character consumed.
struct LineCursor {
  using iterator_category = std::input_iterator_tag;
  using value_type = char;
  using difference_type = std::ptrdiff_t;
  using pointer = const char*;
  using reference = const char&;

  const char* p = nullptr;
  std::size_t* line = nullptr;
  std::size_t* token_line = nullptr;

  reference operator*() const { return *p; }
  LineCursor& operator++() {
    if (*p == '\n') {
      ++*line;
    } else if (*p != ' ' && *p != '\t' && *p != '\r') {
      *token_line = *line;
    }
    ++p;
    return *this;
  }
  LineCursor operator++(int) {
    LineCursor old = *this;
    ++*this;
    return old;
  }
  friend bool operator==(const LineCursor& a, const LineCursor& b) { return a.p == b.p; }
  friend bool operator!=(const LineCursor& a, const LineCursor& b) { return a.p != b.p; }
};

using LineIndex = std::map<std::string, std::size_t>;  // JSON pointer -> line

// Builds the DOM through nlohmann's own SAX DOM builder while recording the line of every value.
class LineSax {
 public:
  LineSax(json& root, LineIndex& index, const std::size_t& token_line)
      : dom_(root, false), index_(index), token_line_(token_line) {}

  bool null() { return scalar() && dom_.null(); }
  bool boolean(bool v) { return scalar() && dom_.boolean(v); }
  bool number_integer(json::number_integer_t v) { return scalar() && dom_.number_integer(v); }
  bool number_unsigned(json::number_unsigned_t v) { return scalar() && dom_.number_unsigned(v); }
  bool number_float(json::number_float_t v, const std::string& s) {
    return scalar() && dom_.number_float(v, s);
  }
  bool string(std::string& v) { return scalar() && dom_.string(v); }
  bool binary(json::binary_t& v) { return scalar() && dom_.binary(v); }
  bool start_object(std::size_t n) { return open(false) && dom_.start_object(n); }
  bool key(std::string& k) {
    stack_.back().key = k;
    return dom_.key(k);
  }
  bool end_object() { return close() && dom_.end_object(); }
  bool start_array(std::size_t n) { return open(true) && dom_.start_array(n); }
  bool end_array() { return close() && dom_.end_array(); }
  bool parse_error(std::size_t pos, const std::string& tok, const nlohmann::detail::exception& ex) {
    throw Error(ErrorCode::kScenarioInvalid, "line " + std::to_string(token_line_) + ": " +
                                                 ex.what() + " (near '" + tok + "', byte " +
                                                 std::to_string(pos) + ")");
  }

 private:
  struct Frame {
    std::string path;
    bool array;
    std::size_t index;
    std::string key;
  };

  static std::string escape(const std::string& k) {
    std::string out;
    for (char c : k) {
      if (c == '~') out += "~0";
      else if (c == '/') out += "~1";
      else out += c;
    }
    return out;
  }

  std::string current_path() const {
    if (stack_.empty()) return "";
    const Frame& f = stack_.back();
    return f.path + "/" + (f.array ? std::to_string(f.index) : escape(f.key));
  }

  bool scalar() {
    index_.emplace(current_path(), token_line_);
    advance();
    return true;
  }
  bool open(bool array) {
    std::string path = current_path();
    index_.emplace(path, token_line_);
    stack_.push_back(Frame{path, array, 0, {}});
    return true;
  }
  bool close() {
    stack_.pop_back();
    advance();
    return true;
  }
  void advance() {
    if (!stack_.empty() && stack_.back().array) ++stack_.back().index;
  }

  nlohmann::detail::json_sax_dom_parser<json> dom_;
  LineIndex& index_;
  const std::size_t& token_line_;
  std::vector<Frame> stack_;
};

struct Checker {
  const LineIndex* lines = nullptr;

  [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
    std::string where = ptr.empty() ? "/" : ptr;
    if (lines) {
      // fall back to the nearest enclosing value that has a recorded line
      std::string probe = ptr;
      while (true) {
        auto it = lines->find(probe);
        if (it != lines->end()) {
          throw Error(ErrorCode::kScenarioInvalid,
                      "line " + std::to_string(it->second) + ": " + where + ": " + msg);
        }
        if (probe.empty()) break;
        probe.erase(probe.rfind('/'));
      }
    }
    throw Error(ErrorCode::kScenarioInvalid, where + ": " + msg);
  }

  const json& object(const json& j, const std::string& ptr) const {
    if (!j.is_object()) fail(ptr, "expected an object");
    return j;
  }
  std::uint64_t uint(const json& j, const std::string& ptr) const {
    // programmatic json stores small literals as signed
    if (!j.is_number_integer() || (!j.is_number_unsigned() && j.get<std::int64_t>() < 0))
      fail(ptr, "expected a non-negative integer");
    return j.get<std::uint64_t>();
  }
  double number(const json& j, const std::string& ptr) const {
    if (!j.is_number()) fail(ptr, "expected a number");
    return j.get<double>();
  }
  const std::string& string(const json& j, const std::string& ptr) const {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get_ref<const std::string&>();
  }
  bool boolean(const json& j, const std::string& ptr) const {
    if (!j.is_boolean()) fail(ptr, "expected true or false");
    return j.get<bool>();
  }
  BigInt integer(const json& j, const std::string& ptr) const {
    try {
      return codec::bigint_from(j);
    } catch (const Error&) {
      fail(ptr, "expected an integer or integer string");
    }
  }
};

const std::set<std::string> kOps = {"vote", "ballots", "register", "revote", "invalidate"};

std::vector<std::string> candidate_names(const json& params) {
  std::vector<std::string> names;
  if (params.contains("candidates")) {
    for (const json& c : params.at("candidates")) names.push_back(c.get<std::string>());
  } else {
    std::uint64_t k = params.at("candidate_count").get<std::uint64_t>();
    for (std::uint64_t i = 0; i < k; ++i) names.push_back(std::string(1, static_cast<char>('A' + i % 26)) + (i >= 26 ? std::to_string(i / 26) : ""));
  }
  return names;
}

std::vector<std::string> participant_names(const json& scenario) {
  std::vector<std::string> names;
  if (!scenario.contains("participants")) return names;
  const json& p = scenario.at("participants");
  if (p.is_array()) {
    for (const json& n : p) names.push_back(n.get<std::string>());
  } else {
    std::uint64_t count = p.at("count").get<std::uint64_t>();
    std::string prefix = p.value("prefix", std::string("voter"));
    int width = static_cast<int>(std::to_string(count).size());
    for (std::uint64_t i = 1; i <= count; ++i) {
      std::string num = std::to_string(i);
      names.push_back(prefix + std::string(static_cast<std::size_t>(width) - num.size(), '0') + num);
    }
  }
  return names;
}

std::optional<std::uint32_t> resolve_choice(const json& j, const std::vector<std::string>& names) {
  if (j.is_number_unsigned()) {
    std::uint64_t v = j.get<std::uint64_t>();
    if (v < names.size()) return static_cast<std::uint32_t>(v);
    return std::nullopt;
  }
  if (j.is_string()) {
    auto it = std::find(names.begin(), names.end(), j.get<std::string>());
    if (it != names.end()) return static_cast<std::uint32_t>(it - names.begin());
  }
  return std::nullopt;
}

void check_scenario(const json& s, const Checker& c) {
  c.object(s, "");
  if (s.contains("rng_seed")) c.uint(s.at("rng_seed"), "/rng_seed");
  if (s.contains("name")) c.string(s.at("name"), "/name");

  if (!s.contains("params")) c.fail("", "missing 'params'");
  const json& params = c.object(s.at("params"), "/params");

  std::vector<std::string> candidates;
  if (params.contains("candidates")) {
    const json& cs = params.at("candidates");
    if (!cs.is_array() || cs.size() < 2) c.fail("/params/candidates", "need at least two names");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const std::string& n = c.string(cs[i], "/params/candidates/" + std::to_string(i));
      if (!seen.insert(n).second) c.fail("/params/candidates/" + std::to_string(i), "duplicate name");
    }
  } else if (params.contains("candidate_count")) {
    if (c.uint(params.at("candidate_count"), "/params/candidate_count") < 2) {
      c.fail("/params/candidate_count", "need at least two candidates");
    }
  } else {
    c.fail("/params", "missing 'candidates'");
  }
  candidates = candidate_names(params);

  for (const char* key : {"supermajority_threshold", "min_participation"}) {
    if (params.contains(key)) {
      double v = c.number(params.at(key), std::string("/params/") + key);
      if (!(v > 0.0 && v <= 1.0)) c.fail(std::string("/params/") + key, "must lie in (0, 1]");
    }
  }
  if (params.contains("booth_grid")) {
    const json& g = params.at("booth_grid");
    if (!g.is_array() || g.size() != 2) c.fail("/params/booth_grid", "expected [rows, cols]");
    for (int i = 0; i < 2; ++i) {
      if (c.uint(g[i], "/params/booth_grid/" + std::to_string(i)) == 0) {
        c.fail("/params/booth_grid/" + std::to_string(i), "must be positive");
      }
    }
  }
  if (!params.contains("schedule")) c.fail("/params", "missing 'schedule'");
  const json& sched = c.object(params.at("schedule"), "/params/schedule");
  for (const char* key : {"total_time", "ft"}) {
    if (!sched.contains(key)) c.fail("/params/schedule", std::string("missing '") + key + "'");
  }
  try {
    codec::schedule_from(sched);
  } catch (const std::exception& ex) {
    c.fail("/params/schedule", ex.what());
  }
  if (params.contains("vdf")) {
    const json& v = c.object(params.at("vdf"), "/params/vdf");
    if (v.contains("modulus")) c.integer(v.at("modulus"), "/params/vdf/modulus");
    if (v.contains("modulus_bits")) {
      std::uint64_t bits = c.uint(v.at("modulus_bits"), "/params/vdf/modulus_bits");
      if (bits < 64 || bits > 4096) c.fail("/params/vdf/modulus_bits", "must be in [64, 4096]");
    }
    if (v.contains("tl")) c.uint(v.at("tl"), "/params/vdf/tl");
    if (v.contains("prime_bits")) c.uint(v.at("prime_bits"), "/params/vdf/prime_bits");
  }
  if (params.contains("protocol")) {
    const std::string& proto = c.string(params.at("protocol"), "/params/protocol");
    if (proto != "plaintext" && proto != "commit-reveal") {
      c.fail("/params/protocol", "unknown protocol '" + proto + "'");
    }
  }
  if (params.contains("curve")) {
    const std::string& curve = c.string(params.at("curve"), "/params/curve");
    if (curve != "secp256k1" && curve != "toy") c.fail("/params/curve", "unknown curve");
  }
  if (params.contains("incumbent") && !resolve_choice(params.at("incumbent"), candidates)) {
    c.fail("/params/incumbent", "not a candidate");
  }
  if (params.contains("baseline_turnout")) c.uint(params.at("baseline_turnout"), "/params/baseline_turnout");
  if (params.contains("baseline_tally")) {
    const json& bt = params.at("baseline_tally");
    if (!bt.is_array() || bt.size() != candidates.size()) {
      c.fail("/params/baseline_tally", "needs one count per candidate");
    }
    for (std::size_t i = 0; i < bt.size(); ++i) c.uint(bt[i], "/params/baseline_tally/" + std::to_string(i));
  }
  if (params.contains("main_election")) c.boolean(params.at("main_election"), "/params/main_election");
  if (params.contains("seed")) {
    try {
      from_hex(c.string(params.at("seed"), "/params/seed"));
    } catch (const Error& ex) {
      c.fail("/params/seed", ex.what());
    }
  }
  if (params.contains("prng")) {
    const json& pr = c.object(params.at("prng"), "/params/prng");
    if (pr.contains("p")) c.integer(pr.at("p"), "/params/prng/p");
    if (pr.contains("g")) c.integer(pr.at("g"), "/params/prng/g");
  }

  if (!s.contains("chain")) c.fail("", "missing 'chain'");
  const json& chain = c.object(s.at("chain"), "/chain");
  int sources = static_cast<int>(chain.contains("blocks")) + static_cast<int>(chain.contains("headers")) +
                static_cast<int>(chain.contains("headers_file"));
  if (sources != 1) c.fail("/chain", "give exactly one of 'blocks', 'headers', 'headers_file'");
  if (chain.contains("blocks")) c.uint(chain.at("blocks"), "/chain/blocks");
  if (chain.contains("nbits")) {
    const json& nb = chain.at("nbits");
    try {
      decode_nbits(static_cast<std::uint32_t>(codec::bigint_from(nb)));
    } catch (const std::exception& ex) {
      c.fail("/chain/nbits", ex.what());
    }
  }
  if (chain.contains("headers")) {
    const json& hs = chain.at("headers");
    if (!hs.is_array()) c.fail("/chain/headers", "expected an array of header hex strings");
    for (std::size_t i = 0; i < hs.size(); ++i) {
      std::string ptr = "/chain/headers/" + std::to_string(i);
      try {
        header_from_hex(c.string(hs[i], ptr));
      } catch (const Error& ex) {
        c.fail(ptr, ex.what());
      }
    }
  }
  if (chain.contains("headers_file")) c.string(chain.at("headers_file"), "/chain/headers_file");

  std::set<std::string> participants;
  if (s.contains("participants")) {
    const json& p = s.at("participants");
    if (p.is_array()) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        const std::string& n = c.string(p[i], "/participants/" + std::to_string(i));
        if (!participants.insert(n).second) c.fail("/participants/" + std::to_string(i), "duplicate name");
      }
    } else if (p.is_object()) {
      if (!p.contains("count")) c.fail("/participants", "missing 'count'");
      c.uint(p.at("count"), "/participants/count");
      if (p.contains("prefix")) c.string(p.at("prefix"), "/participants/prefix");
      for (const std::string& n : participant_names(s)) participants.insert(n);
    } else {
      c.fail("/participants", "expected a list of names or {count, prefix}");
    }
  }

  if (!s.contains("commands")) return;
  const json& cmds = s.at("commands");
  if (!cmds.is_array()) c.fail("/commands", "expected an array");
  for (std::size_t i = 0; i < cmds.size(); ++i) {
    std::string ptr = "/commands/" + std::to_string(i);
    const json& cmd = c.object(cmds[i], ptr);
    if (!cmd.contains("op")) c.fail(ptr, "missing 'op'");
    const std::string& op = c.string(cmd.at("op"), ptr + "/op");
    if (!kOps.count(op)) c.fail(ptr + "/op", "unknown op '" + op + "'");
    if (cmd.contains("epoch") && cmd.contains("block")) c.fail(ptr, "give 'epoch' or 'block', not both");
    if (cmd.contains("epoch")) c.uint(cmd.at("epoch"), ptr + "/epoch");
    if (cmd.contains("block")) c.uint(cmd.at("block"), ptr + "/block");
    if (op == "ballots") {
      if (!cmd.contains("choices")) c.fail(ptr, "missing 'choices'");
      const json& ch = c.object(cmd.at("choices"), ptr + "/choices");
      std::uint64_t total = 0;
      for (const auto& [name, count] : ch.items()) {
        if (!resolve_choice(json(name), candidates)) c.fail(ptr + "/choices/" + name, "not a candidate");
        total += c.uint(count, ptr + "/choices/" + name);
      }
      if (total > participants.size()) c.fail(ptr + "/choices", "more ballots than participants");
      continue;
    }
    if (!cmd.contains("participant")) c.fail(ptr, "missing 'participant'");
    const std::string& who = c.string(cmd.at("participant"), ptr + "/participant");
    if (!participants.count(who)) c.fail(ptr + "/participant", "undeclared participant '" + who + "'");
    if (op == "vote") {
      if (!cmd.contains("choice")) c.fail(ptr, "missing 'choice'");
      if (!resolve_choice(cmd.at("choice"), candidates)) c.fail(ptr + "/choice", "not a candidate");
    }
    if (op == "register" && cmd.contains("forge")) c.boolean(cmd.at("forge"), ptr + "/forge");
  }
}

}  // namespace

json parse_scenario(const std::string& text) {
  json root;
  LineIndex index;
  std::size_t line = 1;
  std::size_t token_line = 1;
  LineSax sax(root, index, token_line);
  LineCursor first{text.data(), &line, &token_line};
  LineCursor last{text.data() + text.size(), &line, &token_line};
  json::sax_parse(first, last, &sax);
  check_scenario(root, Checker{&index});
  return root;
}

json load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kScenarioInvalid, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario(buf.str());
  } catch (const Error& ex) {
    throw Error(ErrorCode::kScenarioInvalid,
                path.string() + ": " + std::string(ex.what()).substr(std::string("ScenarioInvalid: ").size()));
  }
}

void validate_scenario(const json& scenario) { check_scenario(scenario, Checker{}); }

std::optional<std::uint64_t> seed_from_env() {
  const char* raw = std::getenv("AOV_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    std::uint64_t v = std::stoull(raw, &used, 0);
    if (used != std::string(raw).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::kScenarioInvalid, std::string("AOV_SEED is not an integer: ") + raw);
  }
}

// ---------------------------------------------------------------------------------------------
// driver

namespace {

constexpr std::uint64_t kConfirmations = 6;

BigInt keyed_scalar(const Bytes& seed, const std::string& label, const BigInt& order) {
  Hash256 h = hmac_sha256(seed, as_bytes(label));
  BigInt v = from_bytes_be(h) % order;
  return v == 0 ? BigInt(1) : v;
}

struct Voter {
  std::string name;
  WalletChain chain;
  SyncRecord sync;  // EA's copy
  BigInt e = 0;
  BigInt sk;
  Point pk;
  Address addr{};
  bool registered = false;
  std::uint64_t ballots_cast = 0;
  std::optional<Opening> opening;
};

struct TimedCommand {
  std::optional<std::uint64_t> epoch;
  std::optional<std::uint64_t> block;
  json body;
};

class Driver {
 public:
  Driver(const json& scenario, const std::filesystem::path& base_dir)
      : scenario_(scenario), base_dir_(base_dir) {}

  ScenarioResult run() {
    build();
    try {
      record("setup", codec::params_json(params_));
      result_.initial_winner = election_.winner();
      run_epoch_commands();
      for (std::uint64_t tip = 0; tip < chain_.size(); ++tip) {
        ++result_.blocks_processed;
        if (tip + 1 < kConfirmations) continue;
        std::uint64_t h = tip + 1 - kConfirmations;
        if (h % static_cast<std::uint64_t>(params_.schedule.stride) != 0) continue;
        deliver(h, tip);
      }
    } catch (const Error& ex) {
      result_.failure = ScenarioFailure{result_.events.size(), ex.code(), ex.what()};
    }
    finish();
    return std::move(result_);
  }

 private:
  void build() {
    std::uint64_t rng_seed = scenario_.value("rng_seed", std::uint64_t{1});
    seed_.clear();
    append_u64_be(seed_, rng_seed);
    const json& pj = scenario_.at("params");
    candidates_ = candidate_names(pj);
    result_.name = scenario_.value("name", std::string("scenario"));
    result_.candidates = candidates_;

    params_.curve = pj.value("curve", std::string("secp256k1"));
    const CurveParams& curve = params_.curve_params();
    params_.candidate_count = static_cast<std::uint32_t>(candidates_.size());
    params_.supermajority_threshold = pj.value("supermajority_threshold", 0.70);
    params_.min_participation = pj.value("min_participation", 0.70);
    if (pj.contains("booth_grid")) {
      params_.booth_rows = pj.at("booth_grid").at(0).get<std::uint32_t>();
      params_.booth_cols = pj.at("booth_grid").at(1).get<std::uint32_t>();
    }
    params_.schedule = codec::schedule_from(pj.at("schedule"));
    ea_sk_ = keyed_scalar(seed_, "aov/ea", curve.order);
    params_.ea_public_key = base_mul(ea_sk_, curve);

    json vj = pj.value("vdf", json::object());
    params_.vdf.time_param = vj.value("tl", std::uint64_t{1024});
    params_.vdf.prime_bits = vj.value("prime_bits", 128u);
    if (vj.contains("modulus")) {
      params_.vdf.modulus = codec::bigint_from(vj.at("modulus"));
    } else {
      params_.vdf.modulus = generate_rsa_modulus(vj.value("modulus_bits", 256u), rng_seed);
    }
    params_.seed = pj.contains("seed") ? from_hex(pj.at("seed").get<std::string>()) : seed_;

    voters_.clear();
    for (const std::string& n : participant_names(scenario_)) {
      Voter v;
      v.name = n;
      voters_.push_back(std::move(v));
    }
    params_.baseline_turnout = pj.value("baseline_turnout", std::uint64_t{voters_.size()});
    params_.baseline_tally = pj.value("baseline_tally", std::vector<std::uint64_t>(candidates_.size(), 0));
    params_.incumbent = pj.contains("incumbent") ? *resolve_choice(pj.at("incumbent"), candidates_) : 0;
    params_.main_election = pj.value("main_election", false);
    params_.protocol = pj.value("protocol", std::string("plaintext"));
    params_.booth_seed = rng_seed;
    params_.validate();

    BigInt field_p = (BigInt(1) << 61) - 1;
    BigInt field_g = 37;
    if (pj.contains("prng")) {
      const json& pr = pj.at("prng");
      if (pr.contains("p")) field_p = codec::bigint_from(pr.at("p"));
      if (pr.contains("g")) field_g = codec::bigint_from(pr.at("g"));
    }
    for (Voter& v : voters_) {
      v.chain.sk0 = keyed_scalar(seed_, "aov/sk0/" + v.name, curve.order);
      v.chain.hk = hmac_sha256(seed_, as_bytes("aov/hk/" + v.name));
      v.chain.g = field_g;
      v.chain.p = field_p;
      v.chain.validate(curve, params_.curve == "toy");
      v.sync = make_sync_record(v.chain, curve);
      v.sk = v.chain.sk0;
      v.pk = v.sync.pk0;
      v.addr = v.sync.w0;
    }
    for (std::size_t i = 0; i < voters_.size(); ++i) by_name_[voters_[i].name] = i;

    load_chain();
    protocol_ = make_vote_protocol(params_.protocol, params_.candidate_count);

    if (scenario_.contains("commands")) {
      for (const json& cmd : scenario_.at("commands")) {
        TimedCommand tc;
        if (cmd.contains("block")) tc.block = cmd.at("block").get<std::uint64_t>();
        else tc.epoch = cmd.value("epoch", std::uint64_t{0});
        tc.body = cmd;
        commands_.push_back(std::move(tc));
      }
    }
  }

  void load_chain() {
    const json& cj = scenario_.at("chain");
    std::vector<std::string> hexes;
    if (cj.contains("headers")) {
      for (const json& h : cj.at("headers")) hexes.push_back(h.get<std::string>());
    } else if (cj.contains("headers_file")) {
      std::filesystem::path p = cj.at("headers_file").get<std::string>();
      if (p.is_relative()) p = base_dir_ / p;
      std::ifstream in(p);
      if (!in) throw Error(ErrorCode::kScenarioInvalid, "/chain/headers_file: cannot read " + p.string());
      std::string line;
      std::size_t lineno = 0;
      while (std::getline(in, line)) {
        ++lineno;
        line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char ch) { return std::isspace(ch); }),
                   line.end());
        if (line.empty() || line[0] == '#') continue;
        try {
          header_from_hex(line);
        } catch (const Error& ex) {
          throw Error(ErrorCode::kScenarioInvalid, p.string() + ": line " + std::to_string(lineno) + ": " + ex.what());
        }
        hexes.push_back(line);
      }
    }
    if (!hexes.empty() || !cj.contains("blocks")) {
      for (const std::string& h : hexes) chain_.push_back(header_from_hex(h));
      return;
    }
    std::uint64_t blocks = cj.at("blocks").get<std::uint64_t>();
    std::uint32_t nbits = cj.contains("nbits") ? static_cast<std::uint32_t>(codec::bigint_from(cj.at("nbits")))
                                               : 0x2000ffffu;
    std::uint32_t start = cj.value("start_time", std::uint32_t{1700000000});
    Target target = decode_nbits(nbits);
    Hash256 prev{};
    for (std::uint64_t h = 0; h < blocks; ++h) {
      BlockHeader tmpl;
      tmpl.version = 0x20000000;
      tmpl.prev_hash = prev;
      Bytes tag = seed_;
      append_u64_be(tag, h);
      tmpl.merkle_root = sha256(tag);
      tmpl.timestamp = start + static_cast<std::uint32_t>(600 * h);
      tmpl.nbits = nbits;
      BlockHeader mined = mine_test_header(tmpl, target, std::uint64_t{1} << 32);
      prev = pow_hash(mined);
      chain_.push_back(mined);
    }
  }

  json record(const std::string& op, json args) {
    json r = apply_command(election_, op, args);
    Event ev;
    ev.seq = result_.events.size();
    ev.op = op;
    ev.args_digest = args_digest(args);
    ev.args = std::move(args);
    ev.state_hash = to_hex(election_.state_hash());
    result_.events.push_back(std::move(ev));
    return r;
  }

  const CurveParams& curve() const { return params_.curve_params(); }

  Bytes ea_sign(const Bytes& msg, bool forge = false) {
    BigInt sk = forge ? keyed_scalar(seed_, "aov/forger", curve().order) : ea_sk_;
    return encode_signature(sign(sk, msg, curve()), curve());
  }

  void ea_register(const Address& addr, bool valid, bool forge = false) {
    record("registration", {{"addr", to_hex(addr)},
                            {"valid", valid},
                            {"sig", to_hex(ea_sign(Election::registration_message(addr, valid), forge))}});
  }

  void ensure_registered(Voter& v) {
    if (v.registered) return;
    ea_register(v.addr, true);
    v.registered = true;
  }

  // The participant moves to the next wallet and the EA validates it from the sync record.
  void rotate(Voter& v) {
    BigInt next_e = v.e + 1;
    BigInt next_sk = derive_sk(v.chain, next_e, curve());
    Point next_pk = base_mul(next_sk, curve());
    Address next = wallet_address(next_pk, curve());
    Bytes sig = encode_signature(sign(v.sk, Election::revote_message(next), curve()), curve());
    record("revote", {{"prev_pk", codec::point_json(v.pk, curve())}, {"next", to_hex(next)}, {"sig", to_hex(sig)}});
    Point ea_view = derive_pk_ea(v.sync, curve(), next_e);
    if (wallet_address(ea_view, curve()) != next) {
      throw Error(ErrorCode::kNotValidAddress, v.name + ": EA-derived wallet disagrees with participant");
    }
    ea_register(next, true);
    v.e = next_e;
    v.sk = next_sk;
    v.pk = next_pk;
    v.addr = next;
    v.opening.reset();
  }

  void cast(Voter& v, std::uint32_t choice) {
    ensure_registered(v);
    auto st = election_.status(v.addr);
    if (!st || *st != AddressStatus::kValid) rotate(v);
    Bytes label = seed_;
    append(label, as_bytes("aov/blind/" + v.name));
    append_u64_be(label, v.ballots_cast++);
    Hash256 key_h = sha256(label);
    Bytes key(key_h.begin(), key_h.end());
    Bytes blinded = protocol_->blind(choice, key);
    Bytes zkp = protocol_->prove(choice, key, blinded);
    Bytes sig = encode_signature(sign(v.sk, Election::voting_message(v.addr, blinded, zkp), curve()), curve());
    record("voting", {{"addr", to_hex(v.addr)},
                      {"pk", codec::point_json(v.pk, curve())},
                      {"blinded", to_hex(blinded)},
                      {"zkp", to_hex(zkp)},
                      {"sig", to_hex(sig)}});
    v.opening = Opening{choice, key};
  }

  void execute(const json& cmd) {
    const std::string op = cmd.at("op").get<std::string>();
    if (op == "ballots") {
      std::size_t next = 0;
      // candidates in declaration order, so the assignment does not depend on JSON key order
      for (std::uint32_t c = 0; c < candidates_.size(); ++c) {
        auto it = cmd.at("choices").find(candidates_[c]);
        if (it == cmd.at("choices").end()) continue;
        for (std::uint64_t i = 0; i < it->get<std::uint64_t>(); ++i) cast(voters_.at(next++), c);
      }
      return;
    }
    Voter& v = voters_.at(by_name_.at(cmd.at("participant").get<std::string>()));
    if (op == "vote") {
      cast(v, *resolve_choice(cmd.at("choice"), candidates_));
    } else if (op == "register") {
      ea_register(v.addr, true, cmd.value("forge", false));
      v.registered = true;
    } else if (op == "revote") {
      ensure_registered(v);
      rotate(v);
    } else if (op == "invalidate") {
      ea_register(v.addr, false);
      v.opening.reset();
    }
  }

  void run_epoch_commands() {
    for (const TimedCommand& tc : commands_) {
      if (tc.epoch && *tc.epoch == election_.epoch()) execute(tc.body);
    }
  }

  void run_block_commands(std::uint64_t height) {
    for (const TimedCommand& tc : commands_) {
      if (tc.block && *tc.block == height) execute(tc.body);
    }
  }

  void deliver(std::uint64_t h, std::uint64_t tip) {
    run_block_commands(h);
    const BlockHeader& header = chain_[h];
    Target target = decode_nbits(header.nbits);
    record("bpo_add", {{"target", target_json(target)},
                       {"header", header_to_hex(header)},
                       {"height", h},
                       {"chain_tip", tip}});
    VdfCertificate cert = vdf_certify(header_to_group(header, params_.vdf), params_.vdf);
    record("vdf_add", {{"cert", codec::certificate_json(cert, params_.vdf.modulus)}, {"height", h}});

    std::map<Address, Opening> openings;
    if (params_.protocol == "commit-reveal") {
      for (const Voter& v : voters_) {
        if (v.opening) openings[v.addr] = *v.opening;
      }
    }
    ++result_.tally_attempts;
    // Voters only disclose openings once the header is known to trigger; the verdict is public.
    TriggerVerdict verdict = evaluate_trigger(cert, params_.vdf, header, target, params_.schedule);
    if (!verdict.triggered) return;
    json r = record("tally", {{"height", h}, {"openings", codec::openings_json(openings)}});
    if (!r.at("triggered").get<bool>()) {
      throw Error(ErrorCode::kDivergence, "tally at height " + std::to_string(h) + " did not trigger");
    }
    for (Voter& v : voters_) v.opening.reset();
    run_epoch_commands();
  }

  void finish() {
    result_.tallies = election_.tallies();
    result_.notices = election_.notices();
    result_.final_winner = election_.initialized() ? election_.winner() : 0;
    result_.final_state_hash = election_.state_hash();
    result_.final_state = election_.canonical_json();
  }

  const json& scenario_;
  std::filesystem::path base_dir_;
  Bytes seed_;
  std::vector<std::string> candidates_;
  ElectionParams params_;
  BigInt ea_sk_;
  std::vector<Voter> voters_;
  std::map<std::string, std::size_t> by_name_;
  std::vector<BlockHeader> chain_;
  std::vector<TimedCommand> commands_;
  std::unique_ptr<VoteProtocol> protocol_;
  Election election_;
  ScenarioResult result_;
};

}  // namespace

ScenarioResult run_scenario(const json& scenario, const std::filesystem::path& base_dir) {
  validate_scenario(scenario);
  return Driver(scenario, base_dir).run();
}

std::string tallies_csv(const ScenarioResult& result) {
  std::ostringstream out;
  out << "epoch,height,turnout,rejected";
  for (const std::string& c : result.candidates) out << ",votes_" << c;
  out << ",previous_winner,winner\n";
  for (const TallyResult& t : result.tallies) {
    out << t.epoch << ',' << t.triggered_at << ',' << t.turnout << ',' << t.rejected;
    for (std::uint64_t v : t.totals) out << ',' << v;
    out << ',' << result.candidates.at(t.previous_winner) << ',' << result.candidates.at(t.winner) << '\n';
  }
  return out.str();
}

void write_scenario_outputs(const ScenarioResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_event_log(out_dir / "events.jsonl", result.events);
  {
    std::ofstream out(out_dir / "tallies.csv", std::ios::binary | std::ios::trunc);
    out << tallies_csv(result);
  }
  const std::string& final_name = result.candidates.at(result.final_winner);
  {
    json fs = {{"state_hash", to_hex(result.final_state_hash)}, {"winner", final_name}, {"state", result.final_state}};
    std::ofstream out(out_dir / "final_state.json", std::ios::binary | std::ios::trunc);
    out << fs.dump(2) << '\n';
  }
  json summary = {{"name", result.name},
                  {"candidates", result.candidates},
                  {"initial_winner", result.candidates.at(result.initial_winner)},
                  {"final_winner", final_name},
                  {"tallies", result.tallies.size()},
                  {"tally_attempts", result.tally_attempts},
                  {"blocks", result.blocks_processed},
                  {"events", result.events.size()},
                  {"notices", result.notices.size()},
                  {"state_hash", to_hex(result.final_state_hash)}};
  if (result.failure) {
    summary["failure"] = {{"seq", result.failure->seq},
                          {"error", std::string(error_name(result.failure->code))},
                          {"message", result.failure->message}};
  } else {
    summary["failure"] = nullptr;
  }
  std::ofstream out(out_dir / "summary.json", std::ios::binary | std::ios::trunc);
  out << summary.dump(2) << '\n';
}

}  // namespace aov
