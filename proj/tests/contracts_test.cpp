#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "aov/error.hpp"
#include "aov/election.hpp"
#include "aov/hash.hpp"
#include "aov/signature.hpp"

namespace aov {
namespace {

const BigInt kEaSecret = 321;

struct Voter {
  BigInt sk;
  Point pk;
  Address addr{};
};

Voter voter(std::uint64_t tag) {
  const CurveParams& c = toy_curve();
  Voter v;
  Bytes seed;
  append_u64_be(seed, tag);
  v.sk = from_bytes_be(sha256(seed)) % (c.order - 1) + 1;
  v.pk = base_mul(v.sk, c);
  v.addr = wallet_address(v.pk, c);
  return v;
}

const VdfParams& test_vdf() {
  static const VdfParams p = [] {
    VdfParams v;
    v.modulus = generate_rsa_modulus(128, 5);
    v.time_param = 8;
    v.prime_bits = 32;
    return v;
  }();
  return p;
}

ElectionParams base_params(std::uint32_t candidates = 2, std::string protocol = "plaintext") {
  ElectionParams p;
  p.curve = "toy";
  p.candidate_count = candidates;
  p.schedule.total_time = 80;  // m = 1: every delivered header triggers
  p.schedule.ft = 8;
  p.schedule.block_time = 10;
  p.ea_public_key = base_mul(kEaSecret, toy_curve());
  p.vdf = test_vdf();
  p.baseline_turnout = 0;
  p.protocol = std::move(protocol);
  p.booth_seed = 17;
  return p;
}

Bytes sig_bytes(const BigInt& sk, const Bytes& msg) {
  return encode_signature(sign(sk, msg, toy_curve()), toy_curve());
}

Bytes ea_sig(const Address& a, bool valid) {
  return sig_bytes(kEaSecret, Election::registration_message(a, valid));
}

void register_voter(Election& e, const Voter& v, bool valid = true) {
  e.registration(v.addr, valid, ea_sig(v.addr, valid));
}

Bytes blinding_key(std::uint64_t tag) {
  Bytes seed = {'k'};
  append_u64_be(seed, tag);
  Hash256 h = sha256(seed);
  return Bytes(h.begin(), h.end());
}

// Casts through the configured protocol; returns the opening for commit-reveal.
Opening cast(Election& e, const Voter& v, std::uint32_t choice, std::uint64_t key_tag = 0) {
  auto proto = make_vote_protocol(e.params().protocol, e.params().candidate_count);
  Opening o{choice, blinding_key(key_tag)};
  Bytes blinded = proto->blind(choice, o.blinding_key);
  Bytes zkp = proto->prove(choice, o.blinding_key, blinded);
  e.voting(v.addr, v.pk, blinded, zkp, sig_bytes(v.sk, Election::voting_message(v.addr, blinded, zkp)));
  return o;
}

BlockHeader header_at(std::uint64_t height) {
  BlockHeader h;
  h.version = 0x20000000;
  h.timestamp = 1700000000 + static_cast<std::uint32_t>(height) * 600;
  h.nbits = 0x207fffff;
  h.nonce = static_cast<std::uint32_t>(height);
  return h;
}

const VdfCertificate& cert_at(std::uint64_t height) {
  static std::map<std::uint64_t, VdfCertificate> cache;
  auto it = cache.find(height);
  if (it == cache.end()) {
    it = cache.emplace(height, vdf_certify(header_to_group(header_at(height), test_vdf()), test_vdf()))
             .first;
  }
  return it->second;
}

// Delivers a header at `height`, deposits its certificate, tallies.
TallyOutcome deliver_and_tally(Election& e, std::uint64_t height,
                               const std::map<Address, Opening>& openings = {},
                               const Target& target = Target::max()) {
  e.bpo_add(target, header_at(height), height, height + 5);
  e.vdf_add(cert_at(height), height);
  return e.tally(height, openings);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kParse;
}

Election make_election(ElectionParams p = base_params()) {
  Election e;
  e.setup(std::move(p));
  return e;
}

TEST(Setup, CreatesEmptyBooths) {
  ElectionParams p = base_params();
  p.booth_rows = 2;
  p.booth_cols = 3;
  Election e = make_election(p);
  ASSERT_EQ(e.booths().size(), 6u);
  for (std::uint32_t i = 0; i < 6; ++i) {
    EXPECT_EQ(e.booths()[i].booth_no, i + 1);
    EXPECT_TRUE(e.booths()[i].registry.empty());
  }
  EXPECT_EQ(code_of([&] { e.setup(base_params()); }), ErrorCode::kAlreadyInitialized);
}

TEST(Setup, RejectsBadParams) {
  auto rejects = [](auto mutate) {
    ElectionParams p = base_params();
    mutate(p);
    Election e;
    return code_of([&] { e.setup(p); }) == ErrorCode::kInvalidParams && !e.initialized();
  };
  EXPECT_TRUE(rejects([](ElectionParams& p) { p.supermajority_threshold = 0.4; }));
  EXPECT_TRUE(rejects([](ElectionParams& p) { p.supermajority_threshold = 0.5; }));
  EXPECT_TRUE(rejects([](ElectionParams& p) { p.candidate_count = 1; }));
  EXPECT_TRUE(rejects([](ElectionParams& p) { p.booth_cols = 0; }));
  EXPECT_TRUE(rejects([](ElectionParams& p) { p.incumbent = 2; }));
  EXPECT_TRUE(rejects([](ElectionParams& p) { p.protocol = "mixnet"; }));
  EXPECT_TRUE(rejects([](ElectionParams& p) { p.ea_public_key = Point{}; }));
  Election e;
  EXPECT_EQ(code_of([&] { register_voter(e, voter(1)); }), ErrorCode::kNotInitialized);
}

TEST(Setup, FourCandidateSupermajorityParams) {
  ElectionParams p = base_params(4, "commit-reveal");
  p.supermajority_threshold = 0.70;
  p.incumbent = 2;
  p.baseline_tally = {3, 2, 12, 3};
  p.baseline_turnout = 20;
  Election e = make_election(p);
  EXPECT_EQ(e.winner(), 2u);
}

TEST(Registration, ValidAndForged) {
  Election e = make_election();
  Voter v = voter(1);
  register_voter(e, v);
  EXPECT_EQ(e.status(v.addr), AddressStatus::kValid);
  EXPECT_TRUE(e.booth_of(v.addr).has_value());

  Voter w = voter(2);
  Bytes forged = sig_bytes(999, Election::registration_message(w.addr, true));
  Hash256 before = e.state_hash();
  EXPECT_EQ(code_of([&] { e.registration(w.addr, true, forged); }), ErrorCode::kBadSignature);
  EXPECT_EQ(e.state_hash(), before);
  EXPECT_FALSE(e.status(w.addr).has_value());
  // a valid-flag signature does not authorize the invalid flag
  EXPECT_EQ(code_of([&] { e.registration(v.addr, false, ea_sig(v.addr, true)); }),
            ErrorCode::kBadSignature);
}

TEST(Registration, InvalidatingVotedAddressDropsVote) {
  Election e = make_election();
  Voter v = voter(1);
  register_voter(e, v);
  cast(e, v, 1);
  EXPECT_EQ(e.status(v.addr), AddressStatus::kVoted);
  register_voter(e, v, false);
  EXPECT_EQ(e.status(v.addr), AddressStatus::kInvalid);
  TallyOutcome out = deliver_and_tally(e, 10);
  ASSERT_TRUE(out.triggered());
  EXPECT_EQ(out.result->turnout, 0u);
  EXPECT_EQ(code_of([&] { register_voter(e, v); }), ErrorCode::kNotValidAddress);
}

TEST(Voting, FlowAndErrors) {
  Election e = make_election();
  Voter v = voter(1);
  EXPECT_EQ(code_of([&] { cast(e, v, 0); }), ErrorCode::kNotValidAddress);
  register_voter(e, v);
  cast(e, v, 1);
  EXPECT_EQ(e.status(v.addr), AddressStatus::kVoted);
  const auto& booth = e.booths()[e.booth_of(v.addr).value() - 1];
  ASSERT_TRUE(booth.votes.contains(v.addr));
  EXPECT_EQ(code_of([&] { cast(e, v, 0); }), ErrorCode::kNotValidAddress);
}

TEST(Voting, RejectionsLeaveStateUnchanged) {
  Election e = make_election();
  Voter v = voter(1), other = voter(2);
  register_voter(e, v);
  const Hash256 before = e.state_hash();
  Bytes blinded = {0, 0, 0, 1};
  Bytes good_sig = sig_bytes(v.sk, Election::voting_message(v.addr, blinded, {}));

  EXPECT_EQ(code_of([&] { e.voting(v.addr, v.pk, blinded, {}, sig_bytes(other.sk, Election::voting_message(v.addr, blinded, {}))); }),
            ErrorCode::kBadSignature);
  EXPECT_EQ(code_of([&] { e.voting(v.addr, other.pk, blinded, {}, good_sig); }), ErrorCode::kBadSignature);
  Bytes out_of_range = {0, 0, 0, 2};
  EXPECT_EQ(code_of([&] { e.voting(v.addr, v.pk, out_of_range, {}, sig_bytes(v.sk, Election::voting_message(v.addr, out_of_range, {}))); }),
            ErrorCode::kBadProof);
  EXPECT_EQ(code_of([&] { e.voting(v.addr, v.pk, blinded, {}, Bytes{1, 2, 3}); }), ErrorCode::kBadSignature);
  EXPECT_EQ(e.state_hash(), before);
}

TEST(Revote, PendingThenValidated) {
  Election e = make_election();
  Voter v0 = voter(1), v1 = voter(101);
  register_voter(e, v0);
  e.revote(v0.pk, v1.addr, sig_bytes(v0.sk, Election::revote_message(v1.addr)));
  EXPECT_EQ(e.status(v1.addr), AddressStatus::kPending);
  register_voter(e, v1);
  EXPECT_EQ(e.status(v1.addr), AddressStatus::kValid);
}

TEST(Revote, SameIntervalInvalidatesOldAndWarns) {
  Election e = make_election();
  Voter v0 = voter(1), v1 = voter(101);
  register_voter(e, v0);
  cast(e, v0, 0);
  e.revote(v0.pk, v1.addr, sig_bytes(v0.sk, Election::revote_message(v1.addr)));
  EXPECT_EQ(e.status(v0.addr), AddressStatus::kInvalid);
  ASSERT_EQ(e.notices().size(), 1u);
  EXPECT_EQ(e.notices()[0].kind, "linkage");
  register_voter(e, v1);
  cast(e, v1, 1);
  TallyOutcome out = deliver_and_tally(e, 10);
  ASSERT_TRUE(out.triggered());
  EXPECT_EQ(out.result->totals, (std::vector<std::uint64_t>{0, 1}));
}

TEST(Revote, CrossIntervalLeavesPriorRecord) {
  Election e = make_election();
  Voter v0 = voter(1), v1 = voter(101);
  register_voter(e, v0);
  cast(e, v0, 0);
  ASSERT_TRUE(deliver_and_tally(e, 10).triggered());
  const TallyResult first = e.tallies().at(0);
  EXPECT_EQ(e.status(v0.addr), AddressStatus::kInvalid);  // spent at the tally
  e.revote(v0.pk, v1.addr, sig_bytes(v0.sk, Election::revote_message(v1.addr)));
  EXPECT_TRUE(e.notices().empty());
  EXPECT_EQ(e.tallies().at(0).totals, first.totals);
}

TEST(Revote, Errors) {
  Election e = make_election();
  Voter v0 = voter(1), v1 = voter(101), stranger = voter(7);
  Bytes sig = sig_bytes(stranger.sk, Election::revote_message(v1.addr));
  EXPECT_EQ(code_of([&] { e.revote(stranger.pk, v1.addr, sig); }), ErrorCode::kBadSignature);
  register_voter(e, v0);
  EXPECT_EQ(code_of([&] { e.revote(v0.pk, v1.addr, sig); }), ErrorCode::kBadSignature);
  EXPECT_EQ(code_of([&] { e.revote(v0.pk, v0.addr, sig_bytes(v0.sk, Election::revote_message(v0.addr))); }),
            ErrorCode::kNotValidAddress);
}

TEST(Validator, DepositsAndHeaders) {
  Election e = make_election();
  EXPECT_EQ(code_of([&] { e.vdf_add(cert_at(10), 10); }), ErrorCode::kUnknownHeight);
  e.bpo_add(Target::max(), header_at(10), 10, 15);
  e.vdf_add(cert_at(11), 10);
  e.vdf_add(cert_at(10), 10);  // last write wins
  EXPECT_EQ(e.validator().vdf_deposits.at(10).y, cert_at(10).y);
  EXPECT_EQ(e.validator().blockheight_stored, 10u);
  e.bpo_add(Target::max(), header_at(11), 11, 16);
  EXPECT_EQ(code_of([&] { e.bpo_add(Target::max(), header_at(11), 11, 20); }), ErrorCode::kStaleHeight);
  EXPECT_EQ(code_of([&] { e.bpo_add(Target::max(), header_at(9), 9, 20); }), ErrorCode::kStaleHeight);
  EXPECT_EQ(code_of([&] { e.bpo_add(Target::max(), header_at(12), 12, 16); }), ErrorCode::kImmatureHeader);
  EXPECT_NO_THROW(e.bpo_add(Target::max(), header_at(12), 12, 17));
}

TEST(Validator, StrideEnforced) {
  ElectionParams p = base_params();
  p.schedule.total_time = 8000;
  p.schedule.stride = 100;
  Election e = make_election(p);
  EXPECT_EQ(code_of([&] { e.bpo_add(Target::max(), header_at(150), 150, 200); }),
            ErrorCode::kStrideViolation);
  EXPECT_NO_THROW(e.bpo_add(Target::max(), header_at(200), 200, 205));
}

TEST(Tally, Preconditions) {
  Election e = make_election();
  EXPECT_EQ(code_of([&] { e.tally(10); }), ErrorCode::kHeightMismatch);
  e.bpo_add(Target::max(), header_at(10), 10, 15);
  EXPECT_EQ(code_of([&] { e.tally(10); }), ErrorCode::kMissingDeposit);
  EXPECT_EQ(code_of([&] { e.tally(9); }), ErrorCode::kHeightMismatch);
}

TEST(Tally, NotTriggeredKeepsVotes) {
  Election e = make_election();
  Voter v = voter(1);
  register_voter(e, v);
  cast(e, v, 1);
  const Hash256 before_header = e.state_hash();
  e.bpo_add(Target(1), header_at(10), 10, 15);  // PoW cannot pass
  e.vdf_add(cert_at(10), 10);
  const Hash256 before = e.state_hash();
  EXPECT_NE(before, before_header);
  TallyOutcome out = e.tally(10);
  EXPECT_FALSE(out.triggered());
  EXPECT_FALSE(out.verdict.pow);
  EXPECT_EQ(e.state_hash(), before);
  EXPECT_EQ(e.status(v.addr), AddressStatus::kVoted);

  // a certificate for a different header is simply not a trigger
  e.bpo_add(Target::max(), header_at(11), 11, 16);
  e.vdf_add(cert_at(10), 11);
  EXPECT_FALSE(e.tally(11).triggered());
  EXPECT_EQ(e.status(v.addr), AddressStatus::kVoted);
}

TEST(Tally, ResetsForNextInterval) {
  Election e = make_election();
  Voter v = voter(1);
  register_voter(e, v);
  cast(e, v, 1);
  TallyOutcome out = deliver_and_tally(e, 10);
  ASSERT_TRUE(out.triggered());
  EXPECT_EQ(out.result->epoch, 0u);
  EXPECT_EQ(out.result->triggered_at, 10u);
  EXPECT_EQ(e.epoch(), 1u);
  EXPECT_EQ(e.voted_count(), 0u);
  EXPECT_EQ(e.status(v.addr), AddressStatus::kInvalid);
  for (const auto& b : e.booths()) EXPECT_TRUE(b.votes.empty());
}

// Three booths holding [A:2,B:1], [A:1,B:1], [A:0,B:2] sum to A:3, B:4.
TEST(Tally, SumsAcrossBooths) {
  ElectionParams p = base_params();
  p.booth_rows = 1;
  p.booth_cols = 3;
  Election e = make_election(p);
  std::vector<std::vector<Voter>> by_booth(3);
  for (std::uint64_t tag = 1; by_booth[0].size() < 3 || by_booth[1].size() < 3 || by_booth[2].size() < 3; ++tag) {
    Voter v = voter(tag);
    register_voter(e, v);
    by_booth[e.booth_of(v.addr).value() - 1].push_back(v);
  }
  const std::vector<std::vector<std::uint32_t>> plan = {{0, 0, 1}, {0, 1}, {1, 1}};
  for (std::size_t b = 0; b < 3; ++b) {
    for (std::size_t i = 0; i < plan[b].size(); ++i) cast(e, by_booth[b][i], plan[b][i]);
  }
  TallyOutcome out = deliver_and_tally(e, 10);
  ASSERT_TRUE(out.triggered());
  const TallyResult& r = *out.result;
  EXPECT_EQ(r.per_booth, (std::vector<std::vector<std::uint64_t>>{{2, 1}, {1, 1}, {0, 2}}));
  EXPECT_EQ(r.totals, (std::vector<std::uint64_t>{3, 4}));
  EXPECT_EQ(r.turnout, 7u);
}

TEST(WinnerRule, Examples) {
  ElectionParams p = base_params(3);
  p.baseline_turnout = 100;
  EXPECT_EQ(apply_winner_rule({70, 30, 0}, 100, 2, p), 0u);
  EXPECT_EQ(apply_winner_rule({69, 31, 0}, 100, 2, p), 2u);
  p.baseline_turnout = 200;
  EXPECT_EQ(apply_winner_rule({100, 0, 0}, 100, 2, p), 2u);
  EXPECT_EQ(apply_winner_rule({140, 0, 0}, 140, 2, p), 0u);  // exactly 70% of baseline
  EXPECT_EQ(apply_winner_rule({0, 0, 0}, 0, 1, p), 1u);
  // the incumbent's own supermajority changes nothing
  EXPECT_EQ(apply_winner_rule({0, 0, 150}, 150, 2, p), 2u);
}

TEST(WinnerRule, MainElectionIsPlainMajority) {
  ElectionParams p = base_params(3);
  p.main_election = true;
  p.baseline_turnout = 1000;  // quorum does not apply
  EXPECT_EQ(apply_winner_rule({51, 49, 0}, 100, 2, p), 0u);
  EXPECT_EQ(apply_winner_rule({50, 50, 0}, 100, 2, p), 2u);
  EXPECT_EQ(apply_winner_rule({0, 1, 0}, 1, 0, p), 1u);
}

TEST(Protocols, PlaintextAndCommitRevealAgree) {
  const std::vector<std::uint32_t> choices = {0, 2, 1, 2, 2, 0, 1, 2, 2, 1};
  std::vector<std::vector<std::uint64_t>> totals;
  for (const char* proto : {"plaintext", "commit-reveal"}) {
    ElectionParams p = base_params(3, proto);
    p.booth_rows = 2;
    p.booth_cols = 2;
    Election e = make_election(p);
    std::map<Address, Opening> openings;
    for (std::size_t i = 0; i < choices.size(); ++i) {
      Voter v = voter(50 + i);
      register_voter(e, v);
      openings[v.addr] = cast(e, v, choices[i], i);
    }
    TallyOutcome out = deliver_and_tally(e, 10, openings);
    ASSERT_TRUE(out.triggered());
    EXPECT_EQ(out.result->rejected, 0u);
    totals.push_back(out.result->totals);
  }
  EXPECT_EQ(totals[0], totals[1]);
  EXPECT_EQ(totals[0], (std::vector<std::uint64_t>{2, 3, 5}));
}

TEST(Protocols, CommitRevealTamperEvidence) {
  CommitRevealProtocol proto(3);
  std::map<Address, Bytes> votes;
  std::map<Address, Opening> openings;
  for (std::uint8_t i = 0; i < 6; ++i) {
    Address a{};
    a[0] = i;
    Opening o{static_cast<std::uint32_t>(i % 3), blinding_key(i)};
    votes[a] = proto.blind(o.choice, o.blinding_key);
    openings[a] = o;
  }
  ASSERT_EQ(proto.booth_tally(votes, openings).rejected, 0u);
  for (auto& [addr, blinded] : votes) {
    for (std::size_t byte = 0; byte < blinded.size(); ++byte) {
      for (int bit = 0; bit < 8; ++bit) {
        std::map<Address, Bytes> tampered = votes;
        tampered[addr][byte] ^= static_cast<std::uint8_t>(1 << bit);
        BoothCount c = proto.booth_tally(tampered, openings);
        ASSERT_EQ(c.rejected, 1u);
        ASSERT_EQ(c.counts[openings[addr].choice], 1u);
      }
    }
  }
  // a missing or wrong opening is rejected too
  std::map<Address, Opening> partial = openings;
  partial.erase(partial.begin());
  EXPECT_EQ(proto.booth_tally(votes, partial).rejected, 1u);
  partial = openings;
  partial.begin()->second.choice = (partial.begin()->second.choice + 1) % 3;
  EXPECT_EQ(proto.booth_tally(votes, partial).rejected, 1u);
}

TEST(Election, CopyIsIndependent) {
  Election a = make_election();
  Voter v = voter(1);
  register_voter(a, v);
  Election b = a;
  cast(b, v, 1);
  EXPECT_EQ(a.status(v.addr), AddressStatus::kValid);
  EXPECT_EQ(b.status(v.addr), AddressStatus::kVoted);
  a = b;
  EXPECT_EQ(a.state_hash(), b.state_hash());
}

// Exhaustive interleavings of registration, voting, revote, EA invalidation and tallies for three
// participants, checking the contract invariants after every step.
class ModelCheck {
 public:
  static constexpr int kParticipants = 3;
  static constexpr int kKeys = 6;

  ModelCheck() {
    for (int i = 0; i < kParticipants; ++i) {
      for (int k = 0; k < kKeys; ++k) keys_[i][k] = voter(1000 * (i + 1) + k);
    }
  }

  struct Node {
    Election e;
    std::array<int, kParticipants> current{};  // index into the participant's key chain
    std::uint64_t height = 10;
  };

  void run(int depth) {
    Node root;
    ElectionParams p = base_params();
    p.booth_rows = 1;
    p.booth_cols = 2;
    root.e.setup(p);
    for (int i = 0; i < kParticipants; ++i) register_voter(root.e, keys_[i][0]);
    explore(root, depth);
  }

  std::uint64_t steps = 0;
  std::uint64_t rejected = 0;
  std::uint64_t tallies = 0;
  std::uint64_t counted_votes = 0;

 private:
  enum Action { kRegister, kVote0, kVote1, kRevote, kInvalidate };

  void explore(const Node& node, int depth) {
    if (depth == 0) return;
    for (int i = 0; i < kParticipants; ++i) {
      for (int a = kRegister; a <= kInvalidate; ++a) {
        if (a == kRevote && node.current[i] + 1 >= kKeys) continue;
        Node next = node;
        step(next, i, static_cast<Action>(a));
        explore(next, depth - 1);
      }
    }
    Node next = node;
    tally_step(next);
    explore(next, depth - 1);
  }

  void step(Node& n, int who, Action a) {
    ++steps;
    const Voter& v = keys_[who][n.current[who]];
    const Hash256 before = n.e.state_hash();
    const std::uint32_t winner = n.e.winner();
    try {
      switch (a) {
        case kRegister: register_voter(n.e, v); break;
        case kVote0: cast(n.e, v, 0); break;
        case kVote1: cast(n.e, v, 1); break;
        case kInvalidate: register_voter(n.e, v, false); break;
        case kRevote: {
          const Voter& nv = keys_[who][n.current[who] + 1];
          n.e.revote(v.pk, nv.addr, sig_bytes(v.sk, Election::revote_message(nv.addr)));
          ++n.current[who];
          break;
        }
      }
    } catch (const Error&) {
      ++rejected;
      ASSERT_EQ(n.e.state_hash(), before) << "failed operation changed state";
    }
    ASSERT_EQ(n.e.winner(), winner) << "winner moved outside a tally";
    check_invariants(n);
  }

  void tally_step(Node& n) {
    ++steps;
    const std::uint64_t voted = n.e.voted_count();
    n.height += 1;
    TallyOutcome out = deliver_and_tally(n.e, n.height);
    ASSERT_TRUE(out.triggered());
    ++tallies;
    const TallyResult& r = *out.result;
    ASSERT_EQ(r.turnout, voted) << "conservation";
    std::uint64_t sum = 0;
    for (std::size_t c = 0; c < r.totals.size(); ++c) {
      std::uint64_t col = 0;
      for (const auto& b : r.per_booth) col += b[c];
      ASSERT_EQ(col, r.totals[c]);
      sum += r.totals[c];
    }
    ASSERT_EQ(sum, r.turnout);
    counted_votes += r.turnout;
    ASSERT_EQ(n.e.voted_count(), 0u);
    check_invariants(n);
  }

  void check_invariants(const Node& n) {
    for (const auto& booth : n.e.booths()) {
      for (const auto& [addr, blinded] : booth.votes) {
        auto it = booth.registry.find(addr);
        ASSERT_TRUE(it != booth.registry.end());
        ASSERT_EQ(it->second, AddressStatus::kVoted);
      }
      std::uint64_t voted = 0;
      for (const auto& [addr, s] : booth.registry) voted += s == AddressStatus::kVoted ? 1 : 0;
      ASSERT_EQ(voted, booth.votes.size());
    }
    // each participant holds at most one live vote, whichever of its wallets cast it
    for (int i = 0; i < kParticipants; ++i) {
      int live = 0;
      for (int k = 0; k < kKeys; ++k) live += n.e.status(keys_[i][k].addr) == AddressStatus::kVoted ? 1 : 0;
      ASSERT_LE(live, 1) << "participant " << i;
    }
  }

  std::array<std::array<Voter, kKeys>, kParticipants> keys_;
};

TEST(ModelCheck, SmallStateExhaustive) {
  ModelCheck m;
  m.run(4);
  EXPECT_GT(m.tallies, 0u);
  EXPECT_GT(m.rejected, 0u);
  EXPECT_GT(m.counted_votes, 0u);
  RecordProperty("steps", std::to_string(m.steps));
}

}  // namespace
}  // namespace aov
