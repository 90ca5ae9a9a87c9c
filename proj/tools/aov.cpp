// aov: command-line front end. Exit codes: 0 success, 1 verification failure, 2 invalid input.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "aov/booth_privacy.hpp"
#include "aov/btc_header.hpp"
#include "aov/error.hpp"
#include "aov/json_codec.hpp"
#include "aov/scenario.hpp"
#include "aov/sim.hpp"
#include "aov/trigger.hpp"
#include "aov/vdf.hpp"
#include "aov/wallet.hpp"

namespace {

using nlohmann::json;
using namespace aov;

constexpr int kOk = 0;
constexpr int kVerifyFailed = 1;
constexpr int kInvalidInput = 2;

std::string read_text(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kParse, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Inline JSON when it looks like an object, otherwise a file path.
json json_arg(const std::string& arg) {
  std::string text = (!arg.empty() && arg.front() == '{') ? arg : read_text(arg);
  try {
    return json::parse(text);
  } catch (const json::parse_error& ex) {
    throw Error(ErrorCode::kParse, ex.what());
  }
}

void emit(const json& j) { std::cout << j.dump(2) << '\n'; }

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kParse, "cannot write " + path);
  out << text;
}

std::uint32_t parse_u32(const std::string& s) {
  BigInt v = parse_bigint(s);
  if (v < 0 || v > 0xffffffffu) throw Error(ErrorCode::kParse, "not a 32-bit value: " + s);
  return static_cast<std::uint32_t>(v);
}

SimConfig sim_config_from(const json& j) {
  SimConfig c;
  c.rng_seed = j.value("rng_seed", c.rng_seed);
  if (auto env = seed_from_env()) c.rng_seed = *env;
  c.horizon_minutes = j.value("horizon_minutes", c.horizon_minutes);
  c.block_time_mean = j.value("block_time_mean", c.block_time_mean);
  if (j.contains("schedule")) c.schedule = codec::schedule_from(j.at("schedule"));
  c.adversary_share = j.value("adversary_share", c.adversary_share);
  if (j.contains("adversary_mode")) {
    c.adversary_mode = adversary_mode_from_string(j.at("adversary_mode").get<std::string>());
  }
  c.a_max = j.value("a_max", c.a_max);
  c.retries = j.value("retries", c.retries);
  c.block_count = j.value("block_count", c.block_count);
  c.prover_count = j.value("prover_count", c.prover_count);
  c.prover_job_minutes = j.value("prover_job_minutes", c.prover_job_minutes);
  if (j.contains("arrivals")) {
    std::string a = j.at("arrivals").get<std::string>();
    if (a == "deterministic") c.arrivals = ArrivalModel::kDeterministic;
    else if (a == "poisson") c.arrivals = ArrivalModel::kPoisson;
    else throw Error(ErrorCode::kParse, "arrivals must be deterministic or poisson");
  }
  c.maturity_lag = j.value("maturity_lag", c.maturity_lag);
  c.withhold = j.value("withhold", c.withhold);
  c.validate();
  return c;
}

json stats_json(const EpochStats& s) {
  json j = {{"count", s.count}, {"mean", s.mean},       {"variance", s.variance},
            {"min", s.min},     {"max", s.max},         {"chi_square", s.chi_square},
            {"dof", s.dof}};
  j["p_value"] = s.p_value ? json(*s.p_value) : json(nullptr);
  return j;
}

std::string epochs_csv(const std::vector<EpochSample>& epochs) {
  std::ostringstream out;
  out << "epoch,length_blocks,length_minutes,adversary\n";
  for (const EpochSample& e : epochs) {
    out << e.epoch_index << ',' << e.length_blocks << ',' << e.length_minutes << ','
        << (e.triggered_by_adversary ? 1 : 0) << '\n';
  }
  return out.str();
}

const CurveParams& curve_named(const std::string& name) {
  if (name == "secp256k1") return secp256k1();
  if (name == "toy") return toy_curve();
  throw Error(ErrorCode::kParse, "unknown curve " + name);
}

VdfParams vdf_params(const std::string& modulus, std::uint64_t tl, unsigned prime_bits) {
  VdfParams p;
  p.modulus = parse_bigint(modulus);
  p.time_param = tl;
  p.prime_bits = prime_bits;
  p.validate();
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aov: anonymous open vote toolkit"};
  app.require_subcommand(1);
  std::function<int()> action;

  // header check
  auto* header = app.add_subcommand("header", "Bitcoin header utilities")->require_subcommand(1);
  auto* header_check = header->add_subcommand("check", "decode a header and test its proof of work");
  std::string header_hex, nbits_text;
  header_check->add_option("--hex", header_hex, "80-byte header as hex")->required();
  header_check->add_option("--nbits", nbits_text, "compact target; defaults to the header's own");
  header_check->callback([&] {
    action = [&] {
      BlockHeader h = header_from_hex(header_hex);
      Target t = decode_nbits(nbits_text.empty() ? h.nbits : parse_u32(nbits_text));
      bool ok = check_pow(h, t);
      emit({{"block_id", block_id_hex(h)},
            {"version", h.version},
            {"timestamp", h.timestamp},
            {"nbits", h.nbits},
            {"nonce", h.nonce},
            {"target", to_hex(to_bytes_be(t.value(), 32))},
            {"difficulty_bits", t.difficulty_bits()},
            {"pow", ok}});
      return ok ? kOk : kVerifyFailed;
    };
  });

  // vdf eval|prove|verify
  auto* vdf = app.add_subcommand("vdf", "Wesolowski VDF")->require_subcommand(1);
  std::string vdf_modulus, vdf_x, vdf_y, vdf_header, vdf_cert;
  std::uint64_t vdf_tl = 1u << 16;
  unsigned vdf_prime_bits = 128;
  auto add_vdf_params = [&](CLI::App* cmd) {
    cmd->add_option("--modulus", vdf_modulus, "RSA modulus (decimal or 0x hex)")->required();
    cmd->add_option("--tl", vdf_tl, "number of sequential squarings");
    cmd->add_option("--prime-bits", vdf_prime_bits, "challenge prime size");
  };
  auto vdf_input = [&](const VdfParams& p) {
    if (!vdf_header.empty()) return header_to_group(header_from_hex(vdf_header), p);
    if (vdf_x.empty()) throw Error(ErrorCode::kParse, "give --x or --header");
    return parse_bigint(vdf_x);
  };
  auto* vdf_eval_cmd = vdf->add_subcommand("eval", "y = x^(2^TL) mod n");
  add_vdf_params(vdf_eval_cmd);
  vdf_eval_cmd->add_option("--x", vdf_x, "group element");
  vdf_eval_cmd->add_option("--header", vdf_header, "header hex, hashed into the group");
  vdf_eval_cmd->callback([&] {
    action = [&] {
      VdfParams p = vdf_params(vdf_modulus, vdf_tl, vdf_prime_bits);
      BigInt x = vdf_input(p);
      emit({{"x", to_decimal(x)}, {"y", to_decimal(vdf_eval(x, p))}, {"tl", p.time_param}});
      return kOk;
    };
  });
  auto* vdf_prove_cmd = vdf->add_subcommand("prove", "emit a certificate {x, y, pi, tl, n}");
  add_vdf_params(vdf_prove_cmd);
  vdf_prove_cmd->add_option("--x", vdf_x, "group element");
  vdf_prove_cmd->add_option("--header", vdf_header, "header hex, hashed into the group");
  vdf_prove_cmd->add_option("--y", vdf_y, "claimed output; evaluated when omitted");
  vdf_prove_cmd->callback([&] {
    action = [&] {
      VdfParams p = vdf_params(vdf_modulus, vdf_tl, vdf_prime_bits);
      VdfCertificate cert;
      cert.x = mod_floor(vdf_input(p), p.modulus);
      cert.y = vdf_y.empty() ? vdf_eval(cert.x, p) : parse_bigint(vdf_y);
      cert.proof = vdf_prove(cert.x, cert.y, p);
      cert.time_param = p.time_param;
      emit(codec::certificate_json(cert, p.modulus));
      return kOk;
    };
  });
  auto* vdf_verify_cmd = vdf->add_subcommand("verify", "check a certificate");
  vdf_verify_cmd->add_option("--cert", vdf_cert, "certificate JSON file, '-' or inline")->required();
  vdf_verify_cmd->add_option("--prime-bits", vdf_prime_bits, "challenge prime size");
  vdf_verify_cmd->callback([&] {
    action = [&] {
      json cj = json_arg(vdf_cert);
      VdfCertificate cert = codec::certificate_from(cj);
      VdfParams p;
      p.modulus = codec::bigint_from(codec::field(cj, "n"));
      p.time_param = cert.time_param;
      p.prime_bits = cj.value("prime_bits", vdf_prime_bits);
      p.validate();
      bool ok = vdf_verify(cert, p);
      emit({{"valid", ok}});
      return ok ? kOk : kVerifyFailed;
    };
  });

  // trigger verify
  auto* trigger = app.add_subcommand("trigger", "epoch-end trigger")->require_subcommand(1);
  auto* trigger_verify = trigger->add_subcommand("verify", "PoW, VDF and trigger value of a header");
  std::string trig_header, trig_cert, trig_schedule, trig_nbits;
  trigger_verify->add_option("--header", trig_header, "header hex")->required();
  trigger_verify->add_option("--cert", trig_cert, "certificate JSON file, '-' or inline")->required();
  trigger_verify->add_option("--schedule", trig_schedule, "schedule JSON file or inline")->required();
  trigger_verify->add_option("--nbits", trig_nbits, "target; defaults to the header's own");
  trigger_verify->add_option("--prime-bits", vdf_prime_bits, "challenge prime size");
  trigger_verify->callback([&] {
    action = [&] {
      BlockHeader h = header_from_hex(trig_header);
      json cj = json_arg(trig_cert);
      VdfCertificate cert = codec::certificate_from(cj);
      VdfParams p;
      p.modulus = codec::bigint_from(codec::field(cj, "n"));
      p.time_param = cert.time_param;
      p.prime_bits = cj.value("prime_bits", vdf_prime_bits);
      p.validate();
      EpochSchedule s = codec::schedule_from(json_arg(trig_schedule));
      Target t = decode_nbits(trig_nbits.empty() ? h.nbits : parse_u32(trig_nbits));
      TriggerVerdict v = evaluate_trigger(cert, p, h, t, s);
      emit({{"pow", v.pow},
            {"vdf", v.vdf},
            {"b", v.b ? json(to_decimal(*v.b)) : json(nullptr)},
            {"m", trigger_modulus(s)},
            {"triggered", v.triggered}});
      return v.triggered ? kOk : kVerifyFailed;
    };
  });

  // wallet derive
  auto* wallet = app.add_subcommand("wallet", "wallet chains")->require_subcommand(1);
  auto* wallet_derive = wallet->add_subcommand("derive", "derive the e-th wallet");
  std::string wallet_e, wallet_side = "participant", wallet_file, wallet_curve = "secp256k1";
  wallet_derive->add_option("--e", wallet_e, "iteration index, >= 1")->required();
  wallet_derive->add_option("--side", wallet_side, "participant (from sk0) or ea (from sync record)")
      ->check(CLI::IsMember({"participant", "ea"}));
  wallet_derive->add_option("--wallet", wallet_file,
                            "JSON: participant {sk0, hk, g, p}; ea {pk0, hk, g, p}")
      ->required();
  wallet_derive->add_option("--curve", wallet_curve, "secp256k1 or toy");
  wallet_derive->callback([&] {
    action = [&] {
      const CurveParams& c = curve_named(wallet_curve);
      json wj = json_arg(wallet_file);
      BigInt e = parse_bigint(wallet_e);
      json out = {{"e", to_decimal(e)}, {"side", wallet_side}};
      Point pk;
      if (wallet_side == "participant") {
        WalletChain chain;
        chain.sk0 = codec::bigint_from(codec::field(wj, "sk0"));
        chain.hk = fixed_from_hex<32>(codec::field(wj, "hk").get<std::string>());
        chain.g = codec::bigint_from(codec::field(wj, "g"));
        chain.p = codec::bigint_from(codec::field(wj, "p"));
        chain.validate(c, wallet_curve == "toy");
        BigInt sk = derive_sk(chain, e, c);
        pk = base_mul(sk, c);
        out["sk"] = to_decimal(sk);
      } else {
        pk = derive_pk_ea(codec::sync_record_from(wj, c), c, e);
      }
      out["pk"] = codec::point_json(pk, c);
      out["address"] = to_hex(wallet_address(pk, c));
      emit(out);
      return kOk;
    };
  });

  // booth-size, booth-pmf
  auto* booth_size = app.add_subcommand("booth-size", "smallest booth meeting an exposure bound");
  std::uint64_t electorate = 0, pmf_n = 0;
  double win_p = 0.9, bound = 1.0;
  bool generalized = false;
  booth_size->add_option("--electorate", electorate, "number of voters")->required();
  booth_size->add_option("--p", win_p, "probability a voter picks the winner")->required();
  booth_size->add_option("--bound", bound, "max expected exposed booths")->required();
  booth_size->add_flag("--generalized", generalized, "count unanimity for either side");
  booth_size->callback([&] {
    action = [&] {
      UnanimityMode mode = generalized ? UnanimityMode::kGeneralized : UnanimityMode::kWinnerOnly;
      std::uint64_t n = recommend_booth_size(electorate, win_p, bound, mode);
      emit({{"booth_size", n},
            {"expected_exposed", expected_exposed_booths(electorate, n, win_p, mode)},
            {"all_same_prob", all_same_prob(n, win_p, mode)}});
      return kOk;
    };
  });
  auto* booth_pmf = app.add_subcommand("booth-pmf", "binomial pmf of winner votes in one booth");
  std::string pmf_csv;
  booth_pmf->add_option("--n", pmf_n, "booth size")->required();
  booth_pmf->add_option("--p", win_p, "probability a voter picks the winner")->required();
  booth_pmf->add_option("--csv", pmf_csv, "output path, '-' for stdout");
  booth_pmf->callback([&] {
    action = [&] {
      std::ostringstream out;
      out << "x,pmf\n";
      out.precision(17);
      for (const auto& [x, v] : pmf_curve(pmf_n, win_p)) out << x << ',' << v << '\n';
      write_or_print(pmf_csv, out.str());
      return kOk;
    };
  });

  // sim epochs|adversary|provers
  auto* sim = app.add_subcommand("sim", "Monte Carlo models")->require_subcommand(1);
  std::string sim_config, sim_csv;
  auto add_sim = [&](CLI::App* cmd) {
    cmd->add_option("--config", sim_config, "config JSON file or inline")->required();
    cmd->add_option("--csv", sim_csv, "per-sample CSV output path");
  };
  auto* sim_epochs = sim->add_subcommand("epochs", "epoch lengths over a horizon");
  add_sim(sim_epochs);
  sim_epochs->callback([&] {
    action = [&] {
      SimConfig c = sim_config_from(json_arg(sim_config));
      std::vector<EpochSample> epochs = run_epoch_sim(c);
      if (!sim_csv.empty()) write_or_print(sim_csv, epochs_csv(epochs));
      json out = {{"epochs", epochs.size()}, {"m", trigger_modulus(c.schedule)}};
      if (!epochs.empty()) out["stats"] = stats_json(summarize(epochs));
      emit(out);
      return kOk;
    };
  });
  auto* sim_adv = sim->add_subcommand("adversary", "trigger manipulation by a mining adversary");
  add_sim(sim_adv);
  sim_adv->callback([&] {
    action = [&] {
      SimConfig c = sim_config_from(json_arg(sim_config));
      AdversaryReport r = run_adversary_sim(c);
      if (!sim_csv.empty()) write_or_print(sim_csv, epochs_csv(r.epochs));
      emit({{"mode", to_string(r.mode)},
            {"alpha", r.alpha},
            {"m", r.modulus},
            {"retries", r.retries},
            {"blocks", r.blocks},
            {"adversary_blocks", r.adversary_blocks},
            {"adversary_triggers", r.adversary_triggers},
            {"honest_blocks", r.honest_blocks},
            {"honest_triggers", r.honest_triggers},
            {"withheld", r.withheld},
            {"adversary_trigger_rate", r.adversary_trigger_rate()},
            {"honest_trigger_rate", r.honest_trigger_rate()},
            {"baseline_rate", r.baseline_rate()},
            {"adversary_trigger_fraction", r.adversary_trigger_fraction()}});
      return kOk;
    };
  });
  auto* sim_provers = sim->add_subcommand("provers", "VDF prover fleet schedule");
  add_sim(sim_provers);
  sim_provers->callback([&] {
    action = [&] {
      SimConfig c = sim_config_from(json_arg(sim_config));
      FleetStats f = run_prover_schedule(c);
      if (!sim_csv.empty()) {
        std::ostringstream out;
        out << "prover,job,start,end\n";
        for (std::size_t i = 0; i < f.busy.size(); ++i) {
          for (const BusyInterval& b : f.busy[i]) {
            out << i + 1 << ',' << b.job << ',' << b.start << ',' << b.end << '\n';
          }
        }
        write_or_print(sim_csv, out.str());
      }
      emit({{"provers", c.prover_count},
            {"jobs", f.jobs},
            {"max_wait_minutes", f.max_wait_minutes},
            {"mean_wait_minutes", f.mean_wait_minutes},
            {"max_queue_length", f.max_queue_length},
            {"final_queue_length", f.final_queue_length},
            {"utilization", f.utilization}});
      return kOk;
    };
  });

  // election run|replay
  auto* election = app.add_subcommand("election", "scenario runs")->require_subcommand(1);
  auto* election_run = election->add_subcommand("run", "run a scenario and write artifacts");
  std::string scenario_path, out_dir = "aov-out", log_path, expect_hash;
  election_run->add_option("--scenario", scenario_path, "scenario JSON")->required();
  election_run->add_option("--out", out_dir, "artifact directory");
  election_run->callback([&] {
    action = [&] {
      json s = load_scenario(scenario_path);
      if (auto seed = seed_from_env()) s["rng_seed"] = *seed;
      ScenarioResult r = run_scenario(s, std::filesystem::path(scenario_path).parent_path());
      write_scenario_outputs(r, out_dir);
      json out = {{"winner", r.candidates.at(r.final_winner)},
                  {"tallies", r.tallies.size()},
                  {"events", r.events.size()},
                  {"state_hash", to_hex(r.final_state_hash)}};
      if (r.failure) {
        out["failure"] = {{"seq", r.failure->seq}, {"message", r.failure->message}};
        emit(out);
        return kVerifyFailed;
      }
      emit(out);
      return kOk;
    };
  });
  auto* election_replay = election->add_subcommand("replay", "re-apply an event log");
  election_replay->add_option("--log", log_path, "events.jsonl")->required();
  election_replay->add_option("--expect", expect_hash, "state hash the replay must end in");
  election_replay->callback([&] {
    action = [&] {
      std::vector<Event> events = read_event_log(log_path);
      try {
        std::string h = to_hex(replay(events));
        emit({{"events", events.size()}, {"state_hash", h}});
        if (!expect_hash.empty() && expect_hash != h) return kVerifyFailed;
        return kOk;
      } catch (const Error& ex) {
        if (ex.code() != ErrorCode::kDivergence) throw;
        std::cerr << ex.what() << '\n';
        return kVerifyFailed;
      }
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalidInput;
  }
  try {
    return action ? action() : kInvalidInput;
  } catch (const Error& ex) {
    std::cerr << "aov: " << ex.what() << '\n';
    return ex.code() == ErrorCode::kDivergence ? kVerifyFailed : kInvalidInput;
  } catch (const json::exception& ex) {
    std::cerr << "aov: malformed JSON: " << ex.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& ex) {
    std::cerr << "aov: " << ex.what() << '\n';
    return kInvalidInput;
  }
}
