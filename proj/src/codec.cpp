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

#include "ajscc/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ajscc {

std::vector<double> build_levels(Interval vgs_range, double delta, std::size_t min_levels)
{
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw std::invalid_argument("delta must be positive");
    if (!(vgs_range.hi >= vgs_range.lo))
        throw std::invalid_argument("vgs_range is empty");

    // The epsilon keeps e.g. (10 - 5) / 0.05 from flooring to 99.
    const auto count = static_cast<std::size_t>(std::floor(vgs_range.width() / delta + 1e-9)) + 1;
    if (count < min_levels)
        throw std::invalid_argument("delta " + std::to_string(delta) + " yields " + std::to_string(count) +
                                    " level(s), need at least " + std::to_string(min_levels));

    std::vector<double> levels(count);
    for (std::size_t i = 0; i < count; ++i)
        levels[i] = vgs_range.lo + static_cast<double>(i) * delta;
    return levels;
}

std::size_t quantize_index(double value, std::span<const double> levels)
{
    if (levels.empty())
        throw std::invalid_argument("quantize: empty level set");
    const auto it = std::lower_bound(levels.begin(), levels.end(), value);
    if (it == levels.begin())
        return 0;
    if (it == levels.end())
        return levels.size() - 1;
    const auto hi = static_cast<std::size_t>(it - levels.begin());
    const auto lo = hi - 1;
    return (levels[hi] - value < value - levels[lo]) ? hi : lo;
}

double quantize(double value, std::span<const double> levels)
{
    return levels[quantize_index(value, levels)];
}

CodecConfig CodecConfig::uniform(Interval vgs_range, double delta, Interval vds_range)
{
    CodecConfig cfg;
    cfg.levels = build_levels(vgs_range, delta);
    cfg.delta = delta;
    cfg.vgs_range = vgs_range;
    cfg.vds_range = vds_range;
    return cfg;
}

CodecConfig CodecConfig::from_levels(std::vector<double> levels, Interval vds_range)
{
    CodecConfig cfg;
    cfg.levels = std::move(levels);
    if (!cfg.levels.empty())
        cfg.vgs_range = {cfg.levels.front(), cfg.levels.back()};
    cfg.vds_range = vds_range;
    return cfg;
}

void CodecConfig::validate(const MosfetParams& p) const
{
    if (levels.empty())
        throw std::invalid_argument("levels: empty level set");
    for (std::size_t i = 0; i < levels.size(); ++i) {
        if (!(levels[i] > p.v_th))
            throw std::invalid_argument("levels: level " + std::to_string(levels[i]) + " V is not above v_th");
        if (i > 0 && !(levels[i] > levels[i - 1]))
            throw std::invalid_argument("levels: not strictly ascending");
    }
    if (!(vds_range.lo < vds_range.hi))
        throw std::invalid_argument("vds_range: lo must be below hi");
}

double encode(const MosfetParams& p, const CodecConfig& cfg, double vgs_raw, double vds)
{
    if (!cfg.vds_range.contains(vds, kRangeTolerance))
        throw std::domain_error("encode: vds " + std::to_string(vds) + " V outside vds_range");
    return drain_current(p, quantize(vgs_raw, cfg.levels), vds);
}

DecodedPair decode_pair(const MosfetParams& p, const CodecConfig& cfg, double ids1, double ids2,
                        DecodeOptions opts)
{
    if (!(ids1 > 0.0) || !(ids2 > 0.0))
        throw std::domain_error("decode_pair: currents must be positive");

    const std::size_t n = cfg.levels.size();
    const double ref_slope = p.lambda * 0.5 * (ids1 + ids2);
    const bool degenerate = (ids1 == ids2);

    std::vector<double> vds1(n), vds2(n), score(n);
    for (std::size_t i = 0; i < n; ++i) {
        vds1[i] = invert_vds(p, cfg.levels[i], ids1);
        vds2[i] = invert_vds(p, cfg.levels[i], ids2);
        if (degenerate) {
            score[i] = std::numeric_limits<double>::infinity();
        } else {
            const double two_point = (ids2 - ids1) / (vds2[i] - vds1[i]);
            score[i] = std::abs(two_point - ref_slope);
        }
    }

    // Stable sort on score keeps ascending level order among ties.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });

    auto in_range = [&](std::size_t i) {
        return cfg.vds_range.contains(vds1[i], kRangeTolerance) && cfg.vds_range.contains(vds2[i], kRangeTolerance);
    };

    std::size_t chosen = order.front();
    if (opts.range_check) {
        const auto it = std::find_if(order.begin(), order.end(), in_range);
        if (it != order.end())
            chosen = *it;
    }

    DecodedPair out;
    out.level_index = chosen;
    out.vgs_hat = cfg.levels[chosen];
    out.vds_hat_1 = vds1[chosen];
    out.vds_hat_2 = vds2[chosen];
    out.corrected = chosen != order.front();
    out.in_range = in_range(chosen);
    return out;
}

std::vector<DecodedSample> decode_stream(const MosfetParams& p, const CodecConfig& cfg,
                                         std::span<const double> ids, DecodeOptions opts)
{
    if (ids.size() < 2)
        throw std::invalid_argument("decode_stream: need at least two samples");

    std::vector<DecodedSample> out(ids.size());
    auto assign = [&](std::size_t i, const DecodedPair& d, double vds) {
        out[i] = {d.vgs_hat, vds, d.corrected, d.in_range};
    };

    const std::size_t paired = ids.size() - ids.size() % 2;
    for (std::size_t i = 0; i < paired; i += 2) {
        const auto d = decode_pair(p, cfg, ids[i], ids[i + 1], opts);
        assign(i, d, d.vds_hat_1);
        assign(i + 1, d, d.vds_hat_2);
    }
    if (paired != ids.size()) {
        const std::size_t last = ids.size() - 1;
        const auto d = decode_pair(p, cfg, ids[last - 1], ids[last], opts);
        assign(last, d, d.vds_hat_2);
    }
    return out;
}

} // namespace ajscc
