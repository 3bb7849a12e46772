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

// shieldsim: command-line front end over the C API.
//
// Option precedence, highest first: flags, --config file, SHIELDSIM_SEED
// (seed only), built-in defaults.

#include <cstdio>
#include <functional>
#include <memory>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shieldsim/shieldsim.h"

namespace {

using nlohmann::json;

constexpr int kExitUsage = 64;

struct OwnedString {
  char* p = nullptr;
  ~OwnedString() { shieldsim_string_free(p); }
};

json defaults_for(const std::string& command) {
  OwnedString s;
  if (shieldsim_cmd_defaults(command.c_str(), &s.p) != SHIELDSIM_OK) {
    throw std::runtime_error(shieldsim_last_error());
  }
  return json::parse(s.p);
}

// A config file may hold one section per command ({"demo": {...}}) or a
// flat object; flat keys that the command does not know are ignored so one
// file can serve several commands.
json config_for(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  const json cfg = json::parse(in);
  if (!cfg.is_object()) throw std::runtime_error("config file must hold a JSON object");
  if (cfg.contains(command) && cfg[command].is_object()) return cfg[command];
  const json known = defaults_for(command);
  json out = json::object();
  for (const auto& [k, v] : cfg.items()) {
    if (known.contains(k)) out[k] = v;
  }
  return out;
}

bool parse_on_off(const std::string& v) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw CLI::ValidationError("expected on|off, got '" + v + "'");
}

// Flags that were actually given, keyed by option name.
class FlagSet {
 public:
  explicit FlagSet(CLI::App* app) : app_(app) {}

  template <typename T>
  void add(const std::string& flag, const std::string& key, const std::string& help) {
    auto holder = std::make_shared<T>();
    CLI::Option* o = app_->add_option(flag, *holder, help);
    setters_.push_back([o, holder, key](json& j) {
      if (o->count()) j[key] = *holder;
    });
  }
  void add_switch(const std::string& flag, const std::string& key, const std::string& help) {
    auto holder = std::make_shared<std::string>();
    CLI::Option* o = app_->add_option(flag, *holder, help)->check(
        CLI::IsMember({"on", "off", "true", "false", "1", "0"}));
    setters_.push_back([o, holder, key](json& j) {
      if (o->count()) j[key] = parse_on_off(*holder);
    });
  }
  void add_bool_flag(const std::string& flag, const std::string& key, bool value,
                     const std::string& help) {
    CLI::Option* o = app_->add_flag(flag, help);
    setters_.push_back([o, key, value](json& j) {
      if (o->count()) j[key] = value;
    });
  }
  void apply(json& j) const {
    for (const auto& s : setters_) s(j);
  }

 private:
  CLI::App* app_;
  std::vector<std::function<void(json&)>> setters_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-party simulator for outsourced transformer inference"};
  app.require_subcommand(1);
  // Global options may also follow the subcommand.
  app.fallthrough();
  app.set_version_flag("--version", shieldsim_version());

  std::string config_path, out_path, csv_path;
  app.add_option("--config", config_path, "JSON file with option defaults");
  app.add_option("--out", out_path, "Write the JSON report here instead of stdout");

  std::map<std::string, FlagSet> flags;
  auto sub = [&](const std::string& name, const std::string& help) {
    CLI::App* s = app.add_subcommand(name, help);
    flags.emplace(name, FlagSet(s));
    return s;
  };

  sub("demo", "Run one attention layer securely and compare with the plaintext path");
  {
    FlagSet& f = flags.at("demo");
    f.add<std::int64_t>("--tokens", "tokens", "Token count N");
    f.add<std::int64_t>("--dim", "dim", "Embedding dimension D");
    f.add<std::int64_t>("--heads", "heads", "Head count H");
    f.add<std::int64_t>("--head-dim", "head_dim", "Head dimension (default D/H)");
    f.add<std::int64_t>("--l-frac", "l_frac", "Fractional bits");
    f.add<std::int64_t>("--prime", "prime", "Field prime");
    f.add<std::uint64_t>("--seed", "seed", "Master seed");
    f.add_switch("--verify", "verify", "Integrity checks on|off");
    f.add<std::string>("--adversary", "adversary", "Worker strategy, e.g. matmul-single@attn-matmul");
    f.add_bool_flag("--ffn", "ffn", true, "Append the feed-forward block");
    f.add_bool_flag("--layernorm", "layernorm", true, "Normalize the input first");
    f.add_bool_flag("--no-stabilize", "stabilize", false, "Skip max subtraction in softmax");
    f.add<double>("--weight-scale", "weight_scale", "Weight magnitude multiplier");
    f.add<double>("--input-amplitude", "input_amplitude", "Input entries in [-a, a]");
    f.add_bool_flag("--golden", "golden", true, "Embed input, weights and plaintext output");
    f.add_bool_flag("--no-timing", "timings", false, "Zero all wall times");
  }
  CLI::App* bench = sub("bench", "Operation-count sweep over square sizes");
  bench->add_option("--csv", csv_path, "Also write the sweep table as CSV");
  {
    FlagSet& f = flags.at("bench");
    f.add<std::vector<std::int64_t>>("--sizes", "sizes", "Comma-separated sizes");
    f.add<std::int64_t>("--trials", "trials", "Repetitions per size");
    f.add<std::uint64_t>("--seed", "seed", "Master seed");
    f.add_bool_flag("--no-timing", "timings", false, "Zero all wall times");
  }
  sub("attack", "Monte Carlo tamper-detection campaign");
  {
    FlagSet& f = flags.at("attack");
    f.add<std::string>("--protocol", "protocol", "matmul | softmax");
    f.add<std::string>("--attack", "attack", "single|rowswap|scale|honest or a|b|c|honest");
    f.add<std::int64_t>("--trials", "trials", "Trial count");
    f.add<std::uint64_t>("--seed", "seed", "Master seed");
    f.add<std::int64_t>("--size", "size", "Matrix size or vector length");
    f.add<double>("--delta", "delta", "Softmax tamper amount");
    f.add<std::int64_t>("--magnitude", "magnitude", "Matmul tamper amount or scale");
    f.add<std::string>("--check", "check", "anchored | plain");
    f.add_switch("--distinct", "distinct", "Attack c: count only swaps of unequal coefficients");
    f.add<std::int64_t>("--coeff-bound", "coeff_bound", "Softmax hash coefficient bound");
    f.add<std::int64_t>("--threads", "threads", "Worker threads");
  }
  sub("seclevel", "Security-level and probability calculators");
  {
    FlagSet& f = flags.at("seclevel");
    f.add<std::int64_t>("--n", "n", "Vector length");
    f.add<std::int64_t>("--m", "m", "Rows");
    f.add<double>("--d", "d", "Scalar domain size");
    f.add<double>("--d-bits", "d_bits", "Mask bits for the softmax level (default log2 d)");
    f.add<std::int64_t>("--L", "L", "Coefficient bound");
    f.add<std::int64_t>("--k", "k", "Tampered elements");
  }
  sub("verify-compare", "Hash-row check versus Freivalds on one instance");
  {
    FlagSet& f = flags.at("verify-compare");
    f.add<std::int64_t>("--size", "size", "Square size");
    f.add<std::uint64_t>("--seed", "seed", "Master seed");
    f.add_bool_flag("--no-timing", "timings", false, "Zero all wall times");
  }
  sub("matmul", "Outsource one field product read from JSON");
  {
    FlagSet& f = flags.at("matmul");
    f.add<std::string>("--input", "input", "JSON file with matrices q and kt");
    f.add<std::string>("--mode", "mode", "oam | additive | plain");
    f.add_switch("--verify", "verify", "Integrity check on|off");
    f.add<std::uint64_t>("--seed", "seed", "Master seed");
    f.add<std::string>("--adversary", "adversary", "Worker strategy");
  }
  // --sizes 64,128,256
  for (CLI::App* s : app.get_subcommands({})) {
    if (CLI::Option* o = s->get_option_no_throw("--sizes")) o->delimiter(',');
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  json options = json::object();
  try {
    if (const char* env = std::getenv("SHIELDSIM_SEED");
        env != nullptr && *env != '\0' && defaults_for(command).contains("seed")) {
      options["seed"] = std::stoull(env);
    }
    if (!config_path.empty()) options.update(config_for(config_path, command));
  } catch (const std::exception& e) {
    std::cerr << "shieldsim: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    flags.at(command).apply(options);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "shieldsim: " << e.what() << "\n";
    return kExitUsage;
  }

  OwnedString report;
  int exit_code = 0;
  if (shieldsim_cmd_run(command.c_str(), options.dump().c_str(), &report.p, &exit_code) !=
      SHIELDSIM_OK) {
    std::cerr << "shieldsim: " << shieldsim_last_error() << "\n";
    return kExitUsage;
  }

  if (out_path.empty()) {
    std::fputs(report.p, stdout);
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "shieldsim: cannot write '" << out_path << "'\n";
      return 1;
    }
    out << report.p;
  }
  if (!csv_path.empty() && command == "bench") {
    OwnedString csv;
    if (shieldsim_bench_csv(report.p, &csv.p) == SHIELDSIM_OK) {
      std::ofstream(csv_path) << csv.p;
    } else {
      std::cerr << "shieldsim: " << shieldsim_last_error() << "\n";
    }
  }
  const json parsed = json::parse(report.p);
  if (parsed.contains("error")) {
    std::cerr << "shieldsim: " << parsed["error"]["message"].get<std::string>() << "\n";
  }
  return exit_code;
}
