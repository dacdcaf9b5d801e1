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

#include "ajscc/mosfet.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ajscc {

/// Closed voltage interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
};

/// Boundary tolerance used by the range check, so that noiseless decodes that
/// land exactly on a vds_range endpoint stay in range under round-off.
inline constexpr double kRangeTolerance = 1e-6;

/// {lo, lo + delta, lo + 2 delta, ...} up to the largest value <= hi.
/// Throws std::invalid_argument if delta <= 0, the interval is empty, or
/// fewer than `min_levels` levels fit.
std::vector<double> build_levels(Interval vgs_range, double delta, std::size_t min_levels = 1);

/// Nearest level; an exact midpoint goes to the lower level. `levels` must be
/// sorted ascending and non-empty.
double quantize(double value, std::span<const double> levels);

/// Index of quantize(value, levels) in `levels`.
std::size_t quantize_index(double value, std::span<const double> levels);

/// Shannon rectangular mapping parameters: the V_gs level set (one MOSFET
/// curve per level) and the V_ds interval the transmitter promises to stay in.
struct CodecConfig {
    std::vector<double> levels;
    double delta = 0.0;  ///< uniform spacing; 0 for an explicit level list
    Interval vgs_range;
    Interval vds_range{5.0, 10.0};

    /// Uniformly spaced levels starting at vgs_range.lo.
    static CodecConfig uniform(Interval vgs_range, double delta, Interval vds_range);

    /// Explicit, strictly ascending level list.
    static CodecConfig from_levels(std::vector<double> levels, Interval vds_range);

    /// Throws std::invalid_argument if levels are empty, unsorted or not above
    /// the device threshold, or if the vds interval is empty.
    void validate(const MosfetParams& p) const;
};

/// Quantizes vgs_raw to the level set and evaluates the drain current.
/// Throws std::domain_error if vds is outside cfg.vds_range.
double encode(const MosfetParams& p, const CodecConfig& cfg, double vgs_raw, double vds);

struct DecodeOptions {
    bool range_check = true;  ///< iterate past candidates whose vds falls outside vds_range
};

struct DecodedPair {
    double vgs_hat = 0.0;
    double vds_hat_1 = 0.0;
    double vds_hat_2 = 0.0;
    std::size_t level_index = 0;
    bool corrected = false;  ///< the range check moved the decision off the best slope match
    bool in_range = false;   ///< both vds estimates lie inside vds_range
};

/// Slope-matching decoder for two consecutive currents assumed to lie on the
/// same curve.
///
/// The reference slope is lambda * (ids1 + ids2) / 2. Every level yields a
/// two-point slope (ids2 - ids1) / (vds2 - vds1) from the inverted curve, and
/// candidates are ranked by the absolute difference to the reference (ties go
/// to the lower level). With the range check enabled the first candidate whose
/// two vds values both lie in vds_range wins; if none does, the best slope
/// match is returned with in_range == false.
///
/// When ids1 == ids2 the two-point slope is undefined; every score is treated
/// as +inf so the decision falls to the range check and the lowest in-range
/// level.
DecodedPair decode_pair(const MosfetParams& p, const CodecConfig& cfg, double ids1, double ids2,
                        DecodeOptions opts = {});

/// Per-sample decode result of a stream.
struct DecodedSample {
    double vgs_hat = 0.0;
    double vds_hat = 0.0;
    bool corrected = false;
    bool in_range = false;
};

/// Decodes non-overlapping consecutive pairs (0,1), (2,3), ... A trailing odd
/// sample is decoded together with its predecessor; the predecessor keeps the
/// result of its own pair. Throws std::invalid_argument for fewer than two
/// samples.
std::vector<DecodedSample> decode_stream(const MosfetParams& p, const CodecConfig& cfg,
                                         std::span<const double> ids, DecodeOptions opts = {});

} // namespace ajscc
