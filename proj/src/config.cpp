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

#include "ajscc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

namespace ajscc {

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

void require_known(const ConfigValues& values, const std::string& key)
{
    if (!values.contains(key))
        throw ConfigError(key, "unknown configuration key");
}

double to_double(const std::string& key, const std::string& text)
{
    const auto t = trim(text);
    if (t == "inf" || t == "+inf")
        return kInf;
    if (t == "-inf")
        return -kInf;
    double v = 0.0;
    const auto* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc() || ptr != end || std::isnan(v))
        throw ConfigError(key, "expected a number, got '" + text + "'");
    return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text)
{
    const auto t = trim(text);
    std::uint64_t v = 0;
    const auto* end = t.data() + t.size();
    const auto [ptr, ec] = std::from_chars(t.data(), end, v);
    if (t.empty() || ec != std::errc() || ptr != end)
        throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
    return v;
}

bool to_bool(const std::string& key, const std::string& text)
{
    auto t = trim(text);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "1" || t == "yes" || t == "on")
        return true;
    if (t == "false" || t == "0" || t == "no" || t == "off")
        return false;
    throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::optional<double> to_optional(const std::string& key, const std::string& text)
{
    const auto t = trim(text);
    if (t.empty() || t == "auto" || t == "none")
        return std::nullopt;
    return to_double(key, t);
}

} // namespace

std::vector<double> parse_grid(const std::string& key, const std::string& text)
{
    const auto t = trim(text);
    if (t.empty())
        throw ConfigError(key, "empty grid");
    std::vector<double> out;
    if (t.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(t);
        for (std::string part; std::getline(ss, part, ':');)
            parts.push_back(part);
        if (parts.size() != 3)
            throw ConfigError(key, "expected start:stop:step, got '" + text + "'");
        const double lo = to_double(key, parts[0]);
        const double hi = to_double(key, parts[1]);
        const double step = to_double(key, parts[2]);
        if (!(step > 0.0) || hi < lo)
            throw ConfigError(key, "need stop >= start and step > 0 in '" + text + "'");
        out = make_grid(lo, hi, step, true);
    } else {
        std::stringstream ss(t);
        for (std::string item; std::getline(ss, item, ',');)
            out.push_back(to_double(key, item));
    }
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1]))
            throw ConfigError(key, "grid values must be strictly ascending");
    return out;
}

const ConfigValues& default_config_values()
{
    static const ConfigValues defaults = [] {
        const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        return ConfigValues{
            // device
            {"k_gain", "155e-6"},
            {"v_th", "0.74"},
            {"lambda", "0.037"},
            // device-only experiments
            {"levels", "1,2,3,4,5"},
            {"vds_lo", "5"},
            {"vds_hi", "10"},
            {"vds_step", "0.1"},
            {"correction", "true"},
            {"lambda_grid", "0.001:0.2:0.001"},
            // field
            {"nx", "20"},
            {"ny", "20"},
            {"nt", "20"},
            {"s_p", "10"},
            {"t_p", "10"},
            {"jitter", "0"},
            {"vgs_lo", "5"},
            {"vgs_hi", "10"},
            // channel
            {"bandwidth_hz", "410000"},
            {"snr_db", "-20"},
            {"doppler_fraction", "0.02"},
            {"doppler_mode", "uniform"},
            {"rician_k_db", "6"},
            {"fm_scale", "auto"},
            {"fm_fill", "0.8"},
            {"oversampling", "2"},
            {"samples_per_symbol", "2048"},
            {"symbol_timing", "fixed_length"},
            {"s_c", "none"},
            {"t_c", "none"},
            {"ideal_channel", "false"},
            {"failed_policy", "keep"},
            // sweeps
            {"delta", "none"},
            {"delta_grid", "0.05:1.25:0.05"},
            {"snr_delta", "0.41"},
            {"snr_grid", "-100:0:10"},
            {"bandwidth_grid", "50000,200000,410000,500000"},
            {"replicates", "10"},
            {"sum_mode", "mean"},
            // run
            {"seed", "1"},
            {"workers", std::to_string(hw)},
            {"out_dir", "."},
        };
    }();
    return defaults;
}

void merge_config_file(ConfigValues& values, const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config", "cannot open '" + path.string() + "'");
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const auto body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config", fmt::format("{}:{}: expected key = value", path.string(), lineno));
        const auto key = trim(body.substr(0, eq));
        require_known(values, key);
        values[key] = trim(body.substr(eq + 1));
    }
}

void merge_environment(ConfigValues& values, const std::function<const char*(const char*)>& lookup)
{
    for (auto& [key, value] : values) {
        std::string name = kEnvPrefix;
        for (const char c : key)
            name.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        if (const char* v = lookup(name.c_str()))
            value = v;
    }
}

void merge_assignment(ConfigValues& values, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError(trim(assignment), "expected key=value");
    const auto key = trim(assignment.substr(0, eq));
    require_known(values, key);
    values[key] = trim(assignment.substr(eq + 1));
}

RunConfig resolve_config(const ConfigValues& values)
{
    for (const auto& [key, _] : values)
        require_known(default_config_values(), key);
    auto get = [&](const std::string& key) -> const std::string& {
        const auto it = values.find(key);
        return it != values.end() ? it->second : default_config_values().at(key);
    };
    auto num = [&](const std::string& key) { return to_double(key, get(key)); };
    auto count = [&](const std::string& key) { return static_cast<std::size_t>(to_uint(key, get(key))); };
    // Rethrows module validation errors under the key they concern.
    auto checked = [](const std::string& key, auto&& fn) {
        try {
            fn();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(key, e.what());
        }
    };

    RunConfig rc;
    rc.resolved = default_config_values();
    for (const auto& [k, v] : values)
        rc.resolved[k] = v;

    rc.device = {num("k_gain"), num("v_th"), num("lambda")};
    checked("k_gain", [&] {
        if (!(rc.device.k_gain > 0.0) || !std::isfinite(rc.device.k_gain))
            throw std::invalid_argument("must be positive");
    });
    checked("v_th", [&] {
        if (!(rc.device.v_th >= 0.0) || !std::isfinite(rc.device.v_th))
            throw std::invalid_argument("must be non-negative");
    });
    checked("lambda", [&] {
        if (!(rc.device.lambda > 0.0) || !std::isfinite(rc.device.lambda))
            throw std::invalid_argument("must be positive (decoding inverts the curves)");
    });

    rc.levels = parse_grid("levels", get("levels"));
    rc.vds_range = {num("vds_lo"), num("vds_hi")};
    if (!(rc.vds_range.lo >= 0.0))
        throw ConfigError("vds_lo", "must be non-negative");
    if (!(rc.vds_range.hi > rc.vds_range.lo))
        throw ConfigError("vds_hi", "must exceed vds_lo");
    rc.vds_step = num("vds_step");
    if (!(rc.vds_step > 0.0) || rc.vds_step > rc.vds_range.width())
        throw ConfigError("vds_step", "must lie in (0, vds_hi - vds_lo]");
    rc.correction = to_bool("correction", get("correction"));
    checked("levels", [&] { rc.device_codec().validate(rc.device); });
    rc.lambda_grid = parse_grid("lambda_grid", get("lambda_grid"));
    if (!(rc.lambda_grid.front() > 0.0))
        throw ConfigError("lambda_grid", "values must be positive");

    auto& ex = rc.experiment;
    ex.device = rc.device;
    ex.field.nx = count("nx");
    ex.field.ny = count("ny");
    ex.field.nt = count("nt");
    ex.field.s_p = count("s_p");
    ex.field.t_p = count("t_p");
    ex.field.jitter = num("jitter");
    ex.vgs_range = {num("vgs_lo"), num("vgs_hi")};
    ex.vds_range = rc.vds_range;
    for (const char* key : {"nx", "ny", "nt", "s_p", "t_p"}) {
        if (count(key) == 0)
            throw ConfigError(key, "must be at least 1");
    }
    if (ex.field.s_p > std::min(ex.field.nx, ex.field.ny))
        throw ConfigError("s_p", "must not exceed nx or ny");
    if (ex.field.t_p > ex.field.nt)
        throw ConfigError("t_p", "must not exceed nt");
    if (!(ex.field.jitter >= 0.0))
        throw ConfigError("jitter", "must be non-negative");
    if (!(ex.vgs_range.lo > rc.device.v_th))
        throw ConfigError("vgs_lo", "must be above v_th");
    if (!(ex.vgs_range.hi > ex.vgs_range.lo))
        throw ConfigError("vgs_hi", "must exceed vgs_lo");

    auto& ch = ex.channel;
    ch.bandwidth_hz = num("bandwidth_hz");
    ch.snr_db = num("snr_db");
    ch.doppler_fraction = num("doppler_fraction");
    const auto& mode = get("doppler_mode");
    if (mode == "uniform")
        ch.doppler_mode = DopplerMode::Uniform;
    else if (mode == "fixed")
        ch.doppler_mode = DopplerMode::Fixed;
    else
        throw ConfigError("doppler_mode", "expected uniform or fixed, got '" + mode + "'");
    ch.rician_k_db = num("rician_k_db");
    ch.samples_per_symbol = count("samples_per_symbol");
    ch.s_c = to_optional("s_c", get("s_c"));
    ch.t_c = to_optional("t_c", get("t_c"));
    ex.fm_scale = to_optional("fm_scale", get("fm_scale"));
    ex.fm_fill = num("fm_fill");
    ex.oversampling = num("oversampling");
    ex.ideal_channel = to_bool("ideal_channel", get("ideal_channel"));
    const auto& timing = get("symbol_timing");
    if (timing != "fixed_length" && timing != "fixed_duration")
        throw ConfigError("symbol_timing", "expected fixed_length or fixed_duration, got '" + timing + "'");
    ex.fixed_symbol_duration = timing == "fixed_duration";
    checked("failed_policy", [&] { ex.policy = parse_failed_policy(trim(get("failed_policy"))); });
    ex.replicates = count("replicates");
    ex.seed = to_uint("seed", get("seed"));
    ex.workers = static_cast<unsigned>(std::max<std::uint64_t>(1, to_uint("workers", get("workers"))));

    if (!(ch.bandwidth_hz > 0.0) || !std::isfinite(ch.bandwidth_hz))
        throw ConfigError("bandwidth_hz", "must be positive");
    if (ch.snr_db == -kInf)
        throw ConfigError("snr_db", "must be a number or +inf");
    if (ex.fm_scale && !(*ex.fm_scale > 0.0))
        throw ConfigError("fm_scale", "must be positive or auto");
    if (!(ex.fm_fill > 0.0 && ex.fm_fill <= 1.0))
        throw ConfigError("fm_fill", "must lie in (0, 1]");
    if (!(ex.oversampling >= 1.0) || !std::isfinite(ex.oversampling))
        throw ConfigError("oversampling", "must be at least 1");
    if (ex.replicates == 0)
        throw ConfigError("replicates", "must be at least 1");
    checked("channel", [&] { ex.validate(); });

    rc.delta = to_optional("delta", get("delta"));
    if (rc.delta && !(*rc.delta > 0.0))
        throw ConfigError("delta", "must be positive");
    rc.delta_grid = parse_grid("delta_grid", get("delta_grid"));
    if (!(rc.delta_grid.front() > 0.0))
        throw ConfigError("delta_grid", "values must be positive");
    rc.snr_delta = num("snr_delta");
    if (!(rc.snr_delta > 0.0))
        throw ConfigError("snr_delta", "must be positive");
    rc.snr_grid = parse_grid("snr_grid", get("snr_grid"));
    rc.bandwidth_grid = parse_grid("bandwidth_grid", get("bandwidth_grid"));
    for (const double bw : rc.bandwidth_grid) {
        auto probe = ex;
        probe.channel.bandwidth_hz = bw;
        if (!(bw > 0.0))
            throw ConfigError("bandwidth_grid", "values must be positive");
        checked("bandwidth_grid", [&] { probe.validate(); });
    }
    const auto& sum_mode = get("sum_mode");
    if (sum_mode != "mean" && sum_mode != "sum")
        throw ConfigError("sum_mode", "expected mean or sum, got '" + sum_mode + "'");
    rc.literal_sum = sum_mode == "sum";

    rc.out_dir = get("out_dir");
    return rc;
}

std::vector<double> RunConfig::vds_grid() const
{
    return make_grid(vds_range.lo, vds_range.hi, vds_step, false);
}

CodecConfig RunConfig::device_codec() const
{
    return CodecConfig::from_levels(levels, vds_range);
}

std::vector<double> RunConfig::delta_points() const
{
    if (delta)
        return {*delta};
    return delta_grid;
}

std::string RunConfig::metadata_line() const
{
    std::string line = "#";
    for (const auto& [k, v] : resolved) {
        if (k == "workers" || k == "out_dir")
            continue;  // do not affect results
        line += fmt::format(" {}={}", k, v);
    }
    return line;
}

} // namespace ajscc
