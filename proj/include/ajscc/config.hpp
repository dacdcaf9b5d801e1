// SPDX-License-Identifier: Apache-2.0
//
// ajscc: single-transistor analog joint source-channel coding simulator
// Copyright (C) 2026 The ajscc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "ajscc/experiments.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ajscc {

/// Invalid or unparsable configuration; key() names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key))
    {
    }
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Raw key -> value text, before typing and validation.
using ConfigValues = std::map<std::string, std::string>;

/// Every recognised key with its default value.
const ConfigValues& default_config_values();

/// Prefix of environment overrides: AJSCC_SNR_DB=-30 sets snr_db.
inline constexpr const char* kEnvPrefix = "AJSCC_";

/// Reads `key = value` lines; '#' starts a comment. Unknown keys and
/// malformed lines raise ConfigError.
void merge_config_file(ConfigValues& values, const std::filesystem::path& path);

/// Applies AJSCC_<KEY> overrides for every known key, using `lookup` in place
/// of std::getenv.
void merge_environment(ConfigValues& values,
                       const std::function<const char*(const char*)>& lookup);

/// Applies a single `key=value` assignment.
void merge_assignment(ConfigValues& values, const std::string& assignment);

/// Typed, validated view of every module's parameters.
struct RunConfig {
    MosfetParams device;

    // device-only experiments
    std::vector<double> levels;
    Interval vds_range;
    double vds_step = 0.1;
    bool correction = true;
    std::vector<double> lambda_grid;

    // channel experiments
    ChannelExperiment experiment;
    std::optional<double> delta;
    std::vector<double> delta_grid;
    double snr_delta = 0.41;
    std::vector<double> snr_grid;
    std::vector<double> bandwidth_grid;
    bool literal_sum = false;

    std::filesystem::path out_dir = ".";
    ConfigValues resolved;

    /// V_ds points of the device experiments: vds_lo + k * vds_step below vds_hi.
    std::vector<double> vds_grid() const;

    /// Codec for the device experiments and the encode/decode subcommands.
    CodecConfig device_codec() const;

    /// Δ points of sweep-delta: the single `delta` when set, else delta_grid.
    std::vector<double> delta_points() const;

    /// `# key=value ...` echo of every resolved key, sorted by key.
    std::string metadata_line() const;
};

/// Types and validates `values`; throws ConfigError naming the first bad key.
RunConfig resolve_config(const ConfigValues& values);

/// Parses `a:b:step` (inclusive of b) or a comma-separated list.
std::vector<double> parse_grid(const std::string& key, const std::string& text);

} // namespace ajscc
