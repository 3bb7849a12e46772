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

#ifndef SHIELDSIM_COMMANDS_HPP_
#define SHIELDSIM_COMMANDS_HPP_

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace shieldsim {

// The CLI subcommands, driven by a JSON object of options whose keys match
// the long flag names with dashes replaced by underscores. Missing keys take
// the defaults listed by command_defaults().

struct CommandResult {
  nlohmann::json report;
  int exit_code = 0;
};

const std::vector<std::string>& command_names();
nlohmann::json command_defaults(std::string_view command);

// Never throws for protocol or usage errors: they are folded into the report
// ("error": {code, name, message[, stage]}) and the exit code.
CommandResult run_command(std::string_view command, const nlohmann::json& options);

// Bench table as CSV, one row per size.
std::string bench_csv(const nlohmann::json& bench_report);

}  // namespace shieldsim

#endif  // SHIELDSIM_COMMANDS_HPP_
