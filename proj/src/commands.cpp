// Copyright 2026 The shieldsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shieldsim/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <thread>

#include "shieldsim/attention.hpp"
#include "shieldsim/error.hpp"
#include "shieldsim/out_attn_mult.hpp"
#include "shieldsim/out_softmax.hpp"
#include "shieldsim/report.hpp"
#include "shieldsim/security_analysis.hpp"
#include "shieldsim/u_verify.hpp"

namespace shieldsim {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

[[noreturn]] void usage(const std::string& msg) {
  throw Error(ErrorCode::kInvalidArgument, msg);
}

const std::map<std::string, json, std::less<>>& defaults_table() {
  static const std::map<std::string, json, std::less<>> table = {
      {"demo",
       {{"tokens", 16}, {"dim", 32}, {"heads", 2}, {"head_dim", 0}, {"l_frac", 8},
        {"prime", kDefaultPrime}, {"seed", 1}, {"verify", true}, {"stabilize", true},
        {"ffn", false}, {"layernorm", false}, {"adversary", "honest"},
        {"weight_scale", 1.0}, {"input_amplitude", 1.0}, {"timings", true},
        {"golden", false}}},
      {"bench",
       {{"sizes", json::array({64, 128, 256})}, {"trials", 1}, {"seed", 1},
        {"timings", true}}},
      {"attack",
       {{"protocol", "matmul"}, {"attack", "single"}, {"trials", 1000}, {"seed", 1},
        {"size", 0}, {"delta", nullptr}, {"magnitude", 1}, {"check", "anchored"},
        {"distinct", true}, {"coeff_bound", kDefaultCoeffBound}, {"threads", 1}}},
      {"seclevel",
       {{"n", 1}, {"m", 128}, {"d", 256}, {"d_bits", nullptr}, {"L", 2}, {"k", 1}}},
      {"verify-compare", {{"size", 256}, {"seed", 1}, {"timings", true}}},
      {"matmul",
       {{"input", nullptr}, {"q", nullptr}, {"kt", nullptr}, {"mode", "oam"},
        {"verify", true}, {"seed", 1}, {"adversary", "honest"}}},
  };
  return table;
}

json merge_options(std::string_view command, const json& options) {
  json merged = command_defaults(command);
  if (options.is_null()) return merged;
  if (!options.is_object()) usage("options must be a JSON object");
  for (const auto& [key, value] : options.items()) {
    if (!merged.contains(key)) usage("unknown option '" + key + "' for " + std::string(command));
    merged[key] = value;
  }
  return merged;
}

template <typename T>
T opt(const json& o, const char* key) {
  try {
    return o.at(key).get<T>();
  } catch (const json::exception&) {
    usage(std::string("option '") + key + "' has the wrong type");
  }
}

std::uint64_t positive(const json& o, const char* key) {
  const json& v = o.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 1) {
    usage(std::string("option '") + key + "' must be a positive integer");
  }
  return v.get<std::uint64_t>();
}

json base_report(std::string_view command, const json& config) {
  return {{"schema_version", kReportSchemaVersion},
          {"command", std::string(command)},
          {"config", config}};
}

// Runs trial(i) for i in [0, count) on `threads` workers. trial must only
// touch its own slot of the output.
template <typename R>
std::vector<R> parallel_trials(std::uint64_t count, unsigned threads,
                               const std::function<R(std::uint64_t)>& trial) {
  std::vector<R> out(count);
  threads = std::max(1u, std::min<unsigned>(threads, 64));
  if (threads == 1) {
    for (std::uint64_t i = 0; i < count; ++i) out[i] = trial(i);
    return out;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      for (std::uint64_t i = w; i < count; i += threads) out[i] = trial(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

// ---------------------------------------------------------------------------

CommandResult cmd_demo(const json& o) {
  AttentionConfig cfg;
  cfg.tokens = positive(o, "tokens");
  cfg.dim = positive(o, "dim");
  cfg.heads = positive(o, "heads");
  const auto hd = opt<std::int64_t>(o, "head_dim");
  if (hd < 0) usage("head_dim must be >= 0");
  if (hd == 0) {
    if (cfg.dim % cfg.heads != 0) usage("dim must be divisible by heads when head_dim is 0");
    cfg.head_dim = cfg.dim / cfg.heads;
  } else {
    cfg.head_dim = static_cast<std::size_t>(hd);
  }
  cfg.frac_bits = static_cast<unsigned>(positive(o, "l_frac"));
  cfg.prime = static_cast<Residue>(positive(o, "prime"));
  cfg.verify = opt<bool>(o, "verify");
  cfg.stabilize = opt<bool>(o, "stabilize");
  cfg.ffn = opt<bool>(o, "ffn");
  cfg.layernorm = opt<bool>(o, "layernorm");
  const auto seed = opt<std::uint64_t>(o, "seed");
  const bool timings = opt<bool>(o, "timings");

  SessionOptions so;
  so.seed = seed;
  so.prime = cfg.prime;
  so.frac_bits = cfg.frac_bits;
  so.adversary = AdversaryStrategy::parse(opt<std::string>(o, "adversary"));
  so.keep_payloads = false;

  const ModelWeights w = generate_weights(cfg, seed, opt<double>(o, "weight_scale"));
  const RealMatrix x = generate_input(cfg.tokens, cfg.dim, seed, opt<double>(o, "input_amplitude"));

  json report = base_report("demo", o);
  report["config"]["head_dim"] = cfg.head_dim;
  report["config"]["adversary"] = so.adversary.name();

  Session s(so);
  const auto t0 = Clock::now();
  const RealMatrix plain = attention_plain(x, w, cfg);
  const RealMatrix plain_q = attention_plain_quantized(x, w, cfg);
  json result;
  int code = kExitOk;
  try {
    const RealMatrix secure = attention_secure(s, x, w, cfg);
    result["status"] = "ok";
    result["max_abs_err"] = max_abs_diff(secure, plain_q);
    result["failing_stage"] = nullptr;
  } catch (const IntegrityViolation& e) {
    result["status"] = "integrity-violation";
    result["max_abs_err"] = nullptr;
    result["failing_stage"] = e.stage();
    result["message"] = e.what();
    code = kExitIntegrity;
  }
  result["quantization_err"] = max_abs_diff(plain_q, plain);
  result["wall_ms"] = timings ? ms_since(t0) : 0.0;

  const OpCounts total = s.snapshot_counts();
  json share;
  share["trusted_online_mults"] = total.online.trusted_mults;
  share["worker_mults"] = total.total().worker_mults;
  share["share"] = total.total().worker_mults
                       ? static_cast<double>(total.online.trusted_mults) /
                             static_cast<double>(total.total().worker_mults)
                       : 0.0;
  report["result"] = result;
  report["totals"] = to_json(total);
  report["trusted_share"] = share;
  report["stages"] = stages_json(s, timings);
  report["verification"] = verifications_json(s);

  if (opt<bool>(o, "golden")) {
    json cfg_j = {{"tokens", cfg.tokens}, {"dim", cfg.dim}, {"heads", cfg.heads},
                  {"head_dim", cfg.head_dim}, {"l_frac", cfg.frac_bits},
                  {"ffn", cfg.ffn}, {"layernorm", cfg.layernorm}};
    report["golden"] = {{"config", cfg_j},
                        {"seed", seed},
                        {"input_digest", hex64(payload_digest(x.data()))},
                        {"input", to_json(x)},
                        {"weights", to_json(w)},
                        {"output", to_json(plain)},
                        {"op_counts", nullptr}};
  }
  return {report, code};
}

// ---------------------------------------------------------------------------

CommandResult cmd_bench(const json& o) {
  std::vector<std::uint64_t> sizes;
  if (!o.at("sizes").is_array() || o.at("sizes").empty()) usage("sizes must be a non-empty list");
  for (const json& v : o.at("sizes")) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1) usage("sizes must be positive integers");
    sizes.push_back(v.get<std::uint64_t>());
  }
  const std::uint64_t trials = positive(o, "trials");
  const auto seed = opt<std::uint64_t>(o, "seed");
  const bool timings = opt<bool>(o, "timings");

  json rows = json::array();
  std::vector<double> xs, oam_trusted, oam_worker, osm_trusted;
  bool exps_zero = true;
  for (std::uint64_t size : sizes) {
    json row;
    row["size"] = size;
    double oam_ms = 0.0, osm_ms = 0.0;
    OpCounts oam_counts, osm_counts;
    for (std::uint64_t t = 0; t < trials; ++t) {
      SessionOptions so;
      so.seed = SeededRng::derive(seed, size * 1000003ULL + t);
      so.keep_payloads = false;
      {
        Session s(so);
        const FieldMatrix q = sample_matrix(size, size, s.rng(), s.field());
        const FieldMatrix kt = sample_matrix(size, size, s.rng(), s.field());
        const auto t0 = Clock::now();
        Session::StageScope scope(s, "attn-matmul");
        (void)oam_run(s, q, kt);
        oam_ms += ms_since(t0);
        oam_counts = s.snapshot_counts();
      }
      {
        Session s(so);
        std::vector<double> x(size);
        for (double& v : x) v = s.rng().uniform_real(-10.0, 10.0);
        const auto t0 = Clock::now();
        Session::StageScope scope(s, "softmax");
        (void)osm_run(s, x);
        osm_ms += ms_since(t0);
        osm_counts = s.snapshot_counts();
      }
    }
    const PhaseCounts& on = osm_counts.online;
    const std::uint64_t osm_ops = on.trusted_mults + on.trusted_adds + on.trusted_divs +
                                  on.trusted_cmps + on.trusted_exps;
    row["oam"] = {{"trusted_online_mults", oam_counts.online.trusted_mults},
                  {"trusted_offline_mults", oam_counts.offline.trusted_mults},
                  {"worker_mults", oam_counts.total().worker_mults},
                  {"mult_ratio", static_cast<double>(oam_counts.online.trusted_mults) /
                                     static_cast<double>(oam_counts.total().worker_mults)},
                  {"wall_ms", timings ? oam_ms / static_cast<double>(trials) : 0.0}};
    row["osm"] = {{"trusted_online_ops", osm_ops},
                  {"trusted_online_mults", on.trusted_mults},
                  {"trusted_online_exps", on.trusted_exps},
                  {"trusted_offline_exps", osm_counts.offline.trusted_exps},
                  {"worker_exps", osm_counts.total().worker_exps},
                  {"wall_ms", timings ? osm_ms / static_cast<double>(trials) : 0.0}};
    rows.push_back(row);
    exps_zero = exps_zero && on.trusted_exps == 0;
    xs.push_back(static_cast<double>(size));
    oam_trusted.push_back(static_cast<double>(oam_counts.online.trusted_mults));
    oam_worker.push_back(static_cast<double>(oam_counts.total().worker_mults));
    osm_trusted.push_back(static_cast<double>(osm_ops));
  }

  json report = base_report("bench", o);
  report["sizes"] = rows;
  json fits = {{"oam_trusted_online_mults", nullptr},
               {"oam_worker_mults", nullptr},
               {"osm_trusted_online_ops", nullptr}};
  json checks = {{"osm_trusted_online_exps_zero", exps_zero}};
  bool ok = exps_zero;
  std::vector<double> distinct = xs;
  std::sort(distinct.begin(), distinct.end());
  if (std::unique(distinct.begin(), distinct.end()) - distinct.begin() >= 2) {
    const double e_t = fit_power_exponent(xs, oam_trusted);
    const double e_w = fit_power_exponent(xs, oam_worker);
    const double e_s = fit_power_exponent(xs, osm_trusted);
    fits = {{"oam_trusted_online_mults", e_t},
            {"oam_worker_mults", e_w},
            {"osm_trusted_online_ops", e_s}};
    checks["oam_trusted_exponent_2"] = std::abs(e_t - 2.0) <= 0.2;
    checks["oam_worker_exponent_3"] = std::abs(e_w - 3.0) <= 0.2;
    checks["osm_trusted_exponent_1"] = std::abs(e_s - 1.0) <= 0.1;
    ok = ok && checks["oam_trusted_exponent_2"].get<bool>() &&
         checks["oam_worker_exponent_3"].get<bool>() &&
         checks["osm_trusted_exponent_1"].get<bool>();
  }
  report["fits"] = fits;
  report["checks"] = checks;
  return {report, ok ? kExitOk : kExitFailure};
}

// ---------------------------------------------------------------------------

struct TrialOutcome {
  bool qualified = true;  // attack c: swapped coefficients differ
  bool effective = true;  // the tamper changed some reply by >= 1e-6 relative
  bool detected = false;
};

constexpr double kMinRelativePerturbation = 1e-6;

CommandResult cmd_attack(const json& o) {
  const auto protocol = opt<std::string>(o, "protocol");
  const auto attack = opt<std::string>(o, "attack");
  const std::uint64_t trials = positive(o, "trials");
  const auto seed = opt<std::uint64_t>(o, "seed");
  const auto threads = static_cast<unsigned>(positive(o, "threads"));
  const auto size_opt = opt<std::int64_t>(o, "size");
  if (size_opt < 0) usage("size must be >= 0");

  json report = base_report("attack", o);
  json info = json::object();

  if (protocol == "matmul") {
    const std::size_t size = size_opt ? static_cast<std::size_t>(size_opt) : 16;
    const auto check = opt<std::string>(o, "check");
    if (check != "anchored" && check != "plain") usage("check must be anchored or plain");
    std::string spec;
    const auto mag = positive(o, "magnitude");
    if (attack == "single") spec = "matmul-single:" + std::to_string(mag);
    else if (attack == "rowswap") spec = "matmul-rowswap";
    else if (attack == "scale") spec = "matmul-scale:" + std::to_string(std::max<std::uint64_t>(mag, 2));
    else if (attack == "honest") spec = "honest";
    else usage("matmul attacks: single | rowswap | scale | honest");
    const AdversaryStrategy strategy = AdversaryStrategy::parse(spec);

    const auto results = parallel_trials<TrialOutcome>(trials, threads, [&](std::uint64_t i) {
      SessionOptions so;
      so.seed = SeededRng::derive(seed, i);
      so.adversary = strategy;
      so.keep_payloads = false;
      Session s(so);
      const FieldMatrix q = sample_matrix(size, size, s.rng(), s.field());
      const FieldMatrix kt = sample_matrix(size, size, s.rng(), s.field());
      AttnVerifyOptions vo;
      vo.anchored = check == "anchored";
      Session::StageScope scope(s, "attn-matmul");
      const VerifiedMatrix r = verified_attn_matmul(s, q, kt, vo);
      return TrialOutcome{true, true, !r.outcome.pass};
    });
    std::uint64_t det = 0;
    for (const auto& r : results) det += r.detected;
    const json bound = attack == "honest"
                           ? json(nullptr)
                           : json(1.0 - 1.0 / static_cast<double>(kDefaultPrime));
    report["detection"] = detection_json(trials, det, bound);
    info["size"] = size;
    info["adversary"] = strategy.name();
  } else if (protocol == "softmax") {
    const std::size_t n = size_opt ? static_cast<std::size_t>(size_opt) : 64;
    const int coeff_bound = opt<int>(o, "coeff_bound");
    const bool distinct = opt<bool>(o, "distinct");
    const json& delta = o.at("delta");
    if (!delta.is_null() && !delta.is_number()) usage("delta must be a number");
    std::string base;
    if (attack == "a") base = "softmax-a" + (delta.is_null() ? "" : ":" + delta.dump());
    else if (attack == "b") base = "softmax-b" + (delta.is_null() ? "" : ":" + delta.dump());
    else if (attack == "c") base = "softmax-swap";
    else if (attack == "honest") base = "honest";
    else usage("softmax attacks: a | b | c | honest");

    auto trial = [&](std::uint64_t i) {
      SeededRng trial_rng(SeededRng::derive(seed, i));
      SessionOptions so;
      so.seed = trial_rng.next_u64();
      so.keep_payloads = false;
      std::size_t si = 0, sj = 0;
      if (attack == "c") {
        si = trial_rng.uniform_below(n + 1);
        sj = trial_rng.uniform_below(n);
        if (sj >= si) ++sj;
        so.adversary = AdversaryStrategy::parse(base + ":" + std::to_string(si) + "," +
                                                std::to_string(sj));
      } else {
        so.adversary = AdversaryStrategy::parse(base);
      }
      Session s(so);
      std::vector<double> x(n);
      for (double& v : x) v = s.rng().uniform_real(-10.0, 10.0);
      VerifiedSoftmaxOptions vo;
      vo.tag.coeff_bound = coeff_bound;
      Session::StageScope scope(s, "softmax");
      const VerifiedSoftmax r = verified_softmax(s, x, vo);
      TrialOutcome out{true, true, !r.outcome.pass};
      // Tampers that rounding swallowed (e.g. +delta on a huge hash-slot
      // value) are outside the tested model.
      if (attack != "honest") {
        const auto& rel = s.exp_tampers();
        const double biggest = rel.empty() ? 0.0 : *std::max_element(rel.begin(), rel.end());
        out.effective = biggest >= kMinRelativePerturbation;
      }
      if (attack == "c") {
        auto coeff = [&](std::size_t k) -> int {
          if (k == r.tag.pos) return 0;  // hash slot
          return r.tag.a[k < r.tag.pos ? k : k - 1];
        };
        const int ci = coeff(si), cj = coeff(sj);
        out.qualified = !(ci != 0 && cj != 0 && ci == cj);
      }
      return out;
    };

    // Count only draws inside the tested model: the tamper must be effective,
    // and for attack c (when `distinct` is set) the swapped coefficients must
    // differ. Take the first `trials` such draws in index order so the result
    // is thread-count independent.
    std::uint64_t det = 0, used = 0, ran = 0, attempts = 0, det_all = 0;
    std::uint64_t skipped_equal = 0, skipped_small = 0;
    const bool restrict_c = attack == "c" && distinct;
    const std::uint64_t cap = attack == "honest" ? trials : 50 * trials;
    while (used < trials && ran < cap) {
      const std::uint64_t batch = std::min(cap - ran, (trials - used) * 5 / 4 + 16);
      const std::uint64_t first = ran;
      ran += batch;
      const auto results = parallel_trials<TrialOutcome>(
          batch, threads, [&](std::uint64_t k) { return trial(first + k); });
      for (const auto& r : results) {
        if (used == trials) break;
        ++attempts;
        det_all += r.detected;
        if (!r.effective) {
          ++skipped_small;
          continue;
        }
        if (restrict_c && !r.qualified) {
          ++skipped_equal;
          continue;
        }
        ++used;
        det += r.detected;
      }
    }
    json bound = nullptr;
    if (attack == "a") bound = 1.0 - std::exp2(prob_softmax_attack(n, coeff_bound, 1, SoftmaxAttack::kA));
    if (attack == "b") bound = 1.0 - std::exp2(prob_softmax_attack(n, coeff_bound, 1, SoftmaxAttack::kB));
    report["detection"] = detection_json(used, det, bound);
    info["size"] = n;
    info["adversary"] = AdversaryStrategy::parse(base).name();
    info["attempts"] = attempts;
    info["skipped_ineffective"] = skipped_small;
    if (attack == "c") info["skipped_equal_coefficients"] = skipped_equal;
    info["unconditional_rate"] =
        attempts ? static_cast<double>(det_all) / static_cast<double>(attempts) : 0.0;
  } else {
    usage("protocol must be matmul or softmax");
  }
  report["info"] = info;
  return {report, kExitOk};
}

// ---------------------------------------------------------------------------

CommandResult cmd_seclevel(const json& o) {
  const std::uint64_t n = positive(o, "n");
  const std::uint64_t m = positive(o, "m");
  const std::uint64_t L = positive(o, "L");
  const std::uint64_t k = positive(o, "k");
  const auto d = opt<double>(o, "d");
  if (d < 0) usage("d must be >= 0");
  double d_bits = 0.0;
  if (!o.at("d_bits").is_null()) {
    d_bits = opt<double>(o, "d_bits");
  } else if (d >= 1.0) {
    d_bits = std::log2(d);
  }
  auto prob = [](double log2p) { return json{{"log2", log2p}, {"value", std::exp2(log2p)}}; };
  json calc;
  calc["prob_theorem2"] = prob(prob_theorem2(n, L));
  calc["prob_softmax_attack_a"] = prob(prob_softmax_attack(n, L, k, SoftmaxAttack::kA));
  calc["prob_softmax_attack_b"] = prob(prob_softmax_attack(n, L, k, SoftmaxAttack::kB));
  calc["security_level_oam_bits"] = d >= 1.0 ? json(security_level_oam(d, m)) : json(nullptr);
  calc["security_level_oam_printed_bits"] =
      d >= 1.0 ? json(security_level_oam_printed(d, m)) : json(nullptr);
  calc["security_level_softmax_bits"] = security_level_softmax(n, d_bits);
  json report = base_report("seclevel", o);
  report["calculators"] = calc;
  return {report, kExitOk};
}

// ---------------------------------------------------------------------------

CommandResult cmd_verify_compare(const json& o) {
  const std::size_t size = positive(o, "size");
  const auto seed = opt<std::uint64_t>(o, "seed");
  const bool timings = opt<bool>(o, "timings");

  SessionOptions so;
  so.seed = seed;
  so.keep_payloads = false;
  Session su(so);
  const FieldMatrix q = sample_matrix(size, size, su.rng(), su.field());
  const FieldMatrix kt = sample_matrix(size, size, su.rng(), su.field());

  const auto t0 = Clock::now();
  MatmulPrepared prep = uv_matmul_prepare(su, q);
  const FieldMatrix z_full = oam_run(su, prep.q_aug, kt);
  const VerifyOutcome uv = uv_matmul_check(su, z_full, prep.tag);
  const double uv_ms = ms_since(t0);
  const std::uint64_t uv_mults = q.rows() * q.cols() + uv.trusted_mults;
  const std::uint64_t uv_vecmats = 1 + uv.vecmats;

  SessionOptions fo = so;
  fo.seed = SeededRng::derive(seed, 0xF4E1ULL);
  Session sf(fo);
  const FieldMatrix z = z_full.row_block(0, size);
  const auto t1 = Clock::now();
  const VerifyOutcome fv = freivalds_check(sf, q, kt, z);
  const double fv_ms = ms_since(t1);

  json report = base_report("verify-compare", o);
  report["uverify"] = {{"pass", uv.pass}, {"vecmats", uv_vecmats}, {"trusted_mults", uv_mults},
                       {"wall_ms", timings ? uv_ms : 0.0}};
  report["freivalds"] = {{"pass", fv.pass}, {"vecmats", fv.vecmats},
                         {"trusted_mults", fv.trusted_mults},
                         {"wall_ms", timings ? fv_ms : 0.0}};
  report["ratio"] = {{"vecmats", static_cast<double>(uv_vecmats) / static_cast<double>(fv.vecmats)},
                     {"trusted_mults", static_cast<double>(uv_mults) /
                                           static_cast<double>(fv.trusted_mults)}};
  report["verification"] = json::array(
      {{{"check", "matmul"}, {"stage", ""}, {"pass", uv.pass}, {"trusted_mults", uv_mults}},
       {{"check", "freivalds"}, {"stage", ""}, {"pass", fv.pass},
        {"trusted_mults", fv.trusted_mults}}});
  return {report, uv.pass && fv.pass ? kExitOk : kExitIntegrity};
}

// ---------------------------------------------------------------------------

CommandResult cmd_matmul(const json& o) {
  json input;
  if (!o.at("input").is_null()) {
    const auto path = opt<std::string>(o, "input");
    std::ifstream in(path);
    if (!in) usage("cannot open input file '" + path + "'");
    try {
      input = json::parse(in);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParse, std::string("input file: ") + e.what());
    }
  } else {
    input = {{"q", o.at("q")}, {"kt", o.at("kt")}};
  }
  if (!input.contains("q") || !input.contains("kt") || input["q"].is_null() ||
      input["kt"].is_null()) {
    usage("matmul needs matrices 'q' and 'kt' (inline or via input)");
  }
  const FieldMatrix q = field_matrix_from_json(input["q"]);
  const FieldMatrix kt = field_matrix_from_json(input["kt"]);
  if (!(q.field() == kt.field())) usage("q and kt use different primes");
  const auto mode = opt<std::string>(o, "mode");
  const bool verify = opt<bool>(o, "verify");

  SessionOptions so;
  so.seed = opt<std::uint64_t>(o, "seed");
  so.prime = q.field().p();
  so.adversary = AdversaryStrategy::parse(opt<std::string>(o, "adversary"));
  so.keep_payloads = false;
  Session s(so);

  FieldMatrix product(1, 1, q.field());
  int code = kExitOk;
  json result;
  {
    Session::StageScope scope(s, mode == "additive" ? "additive" : "attn-matmul");
    if (mode == "plain") {
      product = mat_mul_mod(q, kt);
    } else if (mode == "oam" || mode == "additive") {
      VerifiedMatrix r{FieldMatrix(1, 1, q.field()), {}};
      if (verify) {
        r = mode == "oam" ? verified_attn_matmul(s, q, kt) : verified_additive(s, q, kt);
      } else if (mode == "oam") {
        r.value = oam_run(s, q, kt);
      } else {
        AdditiveMask mask = ao_offline(s, kt, {q.rows(), q.cols()});
        r.value = ao_run(s, q, kt, mask);
      }
      product = std::move(r.value);
      if (!r.outcome.pass) code = kExitIntegrity;
    } else {
      usage("mode must be oam, additive or plain");
    }
  }
  result["status"] = code == kExitOk ? "ok" : "integrity-violation";
  result["product"] = code == kExitOk ? to_json(product) : json(nullptr);
  json report = base_report("matmul", o);
  report["config"].erase("q");
  report["config"].erase("kt");
  report["result"] = result;
  report["totals"] = to_json(s.snapshot_counts());
  report["stages"] = stages_json(s, false);
  report["verification"] = verifications_json(s);
  return {report, code};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : defaults_table()) v.push_back(k);
    return v;
  }();
  return names;
}

nlohmann::json command_defaults(std::string_view command) {
  const auto& t = defaults_table();
  const auto it = t.find(command);
  if (it == t.end()) usage("unknown command '" + std::string(command) + "'");
  return it->second;
}

CommandResult run_command(std::string_view command, const nlohmann::json& options) {
  json config;
  try {
    config = merge_options(command, options);
    if (command == "demo") return cmd_demo(config);
    if (command == "bench") return cmd_bench(config);
    if (command == "attack") return cmd_attack(config);
    if (command == "seclevel") return cmd_seclevel(config);
    if (command == "verify-compare") return cmd_verify_compare(config);
    return cmd_matmul(config);
  } catch (const Error& e) {
    json report = base_report(command, config.is_null() ? options : config);
    report["error"] = {{"code", static_cast<int>(e.code())},
                       {"name", error_code_name(e.code())},
                       {"message", e.what()}};
    if (const auto* iv = dynamic_cast<const IntegrityViolation*>(&e)) {
      report["error"]["stage"] = iv->stage();
    }
    return {report, exit_code_for(e.code())};
  } catch (const json::exception& e) {
    json report = base_report(command, options);
    report["error"] = {{"code", static_cast<int>(ErrorCode::kParse)},
                       {"name", error_code_name(ErrorCode::kParse)},
                       {"message", e.what()}};
    return {report, kExitUsage};
  } catch (const std::exception& e) {
    json report = base_report(command, options);
    report["error"] = {{"code", static_cast<int>(ErrorCode::kInternal)},
                       {"name", error_code_name(ErrorCode::kInternal)},
                       {"message", e.what()}};
    return {report, kExitFailure};
  }
}

std::string bench_csv(const nlohmann::json& r) {
  std::ostringstream os;
  os << "size,oam_trusted_online_mults,oam_trusted_offline_mults,oam_worker_mults,"
        "osm_trusted_online_ops,osm_trusted_online_exps,osm_worker_exps,oam_wall_ms,"
        "osm_wall_ms\n";
  os.precision(6);
  for (const json& row : r.at("sizes")) {
    const json& a = row.at("oam");
    const json& b = row.at("osm");
    os << row.at("size").get<std::uint64_t>() << ','
       << a.at("trusted_online_mults").get<std::uint64_t>() << ','
       << a.at("trusted_offline_mults").get<std::uint64_t>() << ','
       << a.at("worker_mults").get<std::uint64_t>() << ','
       << b.at("trusted_online_ops").get<std::uint64_t>() << ','
       << b.at("trusted_online_exps").get<std::uint64_t>() << ','
       << b.at("worker_exps").get<std::uint64_t>() << ','
       << a.at("wall_ms").get<double>() << ',' << b.at("wall_ms").get<double>() << '\n';
  }
  return os.str();
}

}  // namespace shieldsim
