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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ajscc {

/// Geometry and value range of a block-correlated sensor field.
struct FieldSpec {
    std::size_t nx = 20;
    std::size_t ny = 20;
    std::size_t nt = 20;
    std::size_t s_p = 10;  ///< side of a spatially correlated block [cells]
    std::size_t t_p = 10;  ///< length of a temporally correlated window [instants]
    double lo = 5.0;
    double hi = 10.0;
    double jitter = 0.0;   ///< per-sample uniform perturbation amplitude [V]; 0 keeps blocks constant

    /// Throws std::invalid_argument naming the offending parameter.
    void validate() const;

    std::size_t blocks_x() const { return (nx + s_p - 1) / s_p; }
    std::size_t blocks_y() const { return (ny + s_p - 1) / s_p; }
    std::size_t blocks_t() const { return (nt + t_p - 1) / t_p; }
    std::size_t block_count() const { return blocks_x() * blocks_y() * blocks_t(); }
    std::size_t size() const { return nx * ny * nt; }
};

/// nx * ny * nt grid of sensor values. Values are stored sensor-major with
/// time innermost, so the samples of sensor (x, y) form one contiguous
/// time-ordered stream. Blocks are aligned to the grid origin.
class Field {
public:
    Field() = default;
    Field(FieldSpec spec, std::uint64_t seed, std::vector<double> values);

    const FieldSpec& spec() const { return spec_; }
    std::uint64_t seed() const { return seed_; }

    std::size_t index(std::size_t x, std::size_t y, std::size_t t) const { return (x * spec_.ny + y) * spec_.nt + t; }
    double at(std::size_t x, std::size_t y, std::size_t t) const { return values_[index(x, y, t)]; }

    /// Flat block id of cell (x, y, t).
    std::size_t block_of(std::size_t x, std::size_t y, std::size_t t) const;

    /// Time series of sensor (x, y).
    std::span<const double> stream(std::size_t x, std::size_t y) const;

    std::span<const double> values() const { return values_; }
    std::vector<double>& mutable_values() { return values_; }

private:
    FieldSpec spec_;
    std::uint64_t seed_ = 0;
    std::vector<double> values_;
};

/// Draws one Uniform(lo, hi) value per (s_p x s_p x t_p) block and fills the
/// block with it. Deterministic for a given seed.
Field generate_field(const FieldSpec& spec, std::uint64_t seed);

/// Block-level values (one per block, in block-id order) of a block-constant
/// field: the mean over the cells of each block.
std::vector<double> block_means(const Field& field, std::span<const double> values);

/// Writes "# ..." metadata, a header row `x,y,t,value` and one row per cell.
void write_field_csv(const Field& field, const std::filesystem::path& path);

/// Reads a file produced by write_field_csv. Throws std::runtime_error on
/// malformed input.
Field read_field_csv(const std::filesystem::path& path);

} // namespace ajscc
