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

#include "ajscc/field.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace ajscc {

void FieldSpec::validate() const
{
    auto positive = [](std::size_t v, const char* key) {
        if (v == 0)
            throw std::invalid_argument(std::string(key) + " must be at least 1");
    };
    positive(nx, "nx");
    positive(ny, "ny");
    positive(nt, "nt");
    positive(s_p, "s_p");
    positive(t_p, "t_p");
    if (s_p > nx || s_p > ny)
        throw std::invalid_argument("s_p must not exceed nx or ny");
    if (t_p > nt)
        throw std::invalid_argument("t_p must not exceed nt");
    if (!(lo < hi))
        throw std::invalid_argument("field range: lo must be below hi");
    if (!(jitter >= 0.0))
        throw std::invalid_argument("jitter must be non-negative");
}

Field::Field(FieldSpec spec, std::uint64_t seed, std::vector<double> values)
    : spec_(spec), seed_(seed), values_(std::move(values))
{
    if (values_.size() != spec_.size())
        throw std::invalid_argument("Field: value count does not match geometry");
}

std::size_t Field::block_of(std::size_t x, std::size_t y, std::size_t t) const
{
    const std::size_t bx = x / spec_.s_p;
    const std::size_t by = y / spec_.s_p;
    const std::size_t bt = t / spec_.t_p;
    return (bx * spec_.blocks_y() + by) * spec_.blocks_t() + bt;
}

std::span<const double> Field::stream(std::size_t x, std::size_t y) const
{
    return std::span<const double>(values_).subspan(index(x, y, 0), spec_.nt);
}

Field generate_field(const FieldSpec& spec, std::uint64_t seed)
{
    spec.validate();

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> block(spec.block_count());
    for (auto& b : block)
        b = spec.lo + (spec.hi - spec.lo) * unit(rng);

    Field f(spec, seed, std::vector<double>(spec.size()));
    auto& v = f.mutable_values();
    for (std::size_t x = 0; x < spec.nx; ++x)
        for (std::size_t y = 0; y < spec.ny; ++y)
            for (std::size_t t = 0; t < spec.nt; ++t)
                v[f.index(x, y, t)] = block[f.block_of(x, y, t)];

    if (spec.jitter > 0.0) {
        std::uniform_real_distribution<double> jit(-spec.jitter, spec.jitter);
        for (auto& x : v)
            x = std::clamp(x + jit(rng), spec.lo, spec.hi);
    }
    return f;
}

std::vector<double> block_means(const Field& field, std::span<const double> values)
{
    const auto& s = field.spec();
    if (values.size() != s.size())
        throw std::invalid_argument("block_means: shape mismatch");

    std::vector<double> sum(s.block_count(), 0.0);
    std::vector<std::size_t> count(s.block_count(), 0);
    for (std::size_t x = 0; x < s.nx; ++x)
        for (std::size_t y = 0; y < s.ny; ++y)
            for (std::size_t t = 0; t < s.nt; ++t) {
                const auto b = field.block_of(x, y, t);
                sum[b] += values[field.index(x, y, t)];
                ++count[b];
            }
    for (std::size_t b = 0; b < sum.size(); ++b)
        sum[b] /= static_cast<double>(count[b]);
    return sum;
}

void write_field_csv(const Field& field, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    const auto& s = field.spec();
    out << fmt::format("# nx={} ny={} nt={} s_p={} t_p={} lo={} hi={} jitter={} seed={}\n", s.nx, s.ny, s.nt,
                       s.s_p, s.t_p, s.lo, s.hi, s.jitter, field.seed());
    out << "x,y,t,value\n";
    for (std::size_t x = 0; x < s.nx; ++x)
        for (std::size_t y = 0; y < s.ny; ++y)
            for (std::size_t t = 0; t < s.nt; ++t)
                out << fmt::format("{},{},{},{:.17g}\n", x, y, t, field.at(x, y, t));
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

Field read_field_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open " + path.string());

    std::string line;
    std::map<std::string, std::string> meta;
    struct Row {
        std::size_t x, y, t;
        double v;
    };
    std::vector<Row> rows;
    bool header_seen = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        if (line.front() == '#') {
            std::istringstream ss(line.substr(1));
            std::string kv;
            while (ss >> kv) {
                const auto eq = kv.find('=');
                if (eq != std::string::npos)
                    meta[kv.substr(0, eq)] = kv.substr(eq + 1);
            }
            continue;
        }
        if (!header_seen) {
            if (line != "x,y,t,value")
                throw std::runtime_error(path.string() + ": expected header x,y,t,value");
            header_seen = true;
            continue;
        }
        Row r{};
        char c1 = 0, c2 = 0, c3 = 0;
        std::istringstream ss(line);
        if (!(ss >> r.x >> c1 >> r.y >> c2 >> r.t >> c3 >> r.v) || c1 != ',' || c2 != ',' || c3 != ',')
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": malformed row");
        rows.push_back(r);
    }
    if (rows.empty())
        throw std::runtime_error(path.string() + ": no data rows");

    FieldSpec s;
    s.nx = s.ny = s.nt = 0;
    for (const auto& r : rows) {
        s.nx = std::max(s.nx, r.x + 1);
        s.ny = std::max(s.ny, r.y + 1);
        s.nt = std::max(s.nt, r.t + 1);
    }
    auto get = [&](const char* key, auto fallback) {
        const auto it = meta.find(key);
        if (it == meta.end())
            return fallback;
        std::istringstream ss(it->second);
        decltype(fallback) v{};
        if (!(ss >> v))
            throw std::runtime_error(path.string() + ": bad metadata value for " + key);
        return v;
    };
    s.s_p = get("s_p", std::min(s.nx, s.ny));
    s.t_p = get("t_p", s.nt);
    s.jitter = get("jitter", 0.0);
    const auto seed = get("seed", std::uint64_t{0});

    if (rows.size() != s.size())
        throw std::runtime_error(path.string() + ": expected " + std::to_string(s.size()) + " rows, got " +
                                 std::to_string(rows.size()));

    std::vector<double> values(s.size());
    std::vector<bool> seen(s.size(), false);
    auto lo = rows.front().v, hi = rows.front().v;
    Field shape(s, seed, std::vector<double>(s.size()));
    for (const auto& r : rows) {
        const auto i = shape.index(r.x, r.y, r.t);
        if (seen[i])
            throw std::runtime_error(path.string() + ": duplicate cell");
        seen[i] = true;
        values[i] = r.v;
        lo = std::min(lo, r.v);
        hi = std::max(hi, r.v);
    }
    s.lo = get("lo", lo);
    s.hi = get("hi", hi);
    return Field(s, seed, std::move(values));
}

} // namespace ajscc
