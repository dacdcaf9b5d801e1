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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace ajscc;

namespace {

const MosfetParams dev{};
const Interval vds_box{5.0, 10.0};

CodecConfig paper_levels() { return CodecConfig::from_levels({1, 2, 3, 4, 5}, vds_box); }

// 5.0, 5.1, ..., 9.9 and 10.0 (51 points, both ends of the interval).
std::vector<double> vds_points()
{
    std::vector<double> v;
    for (int i = 0; i <= 50; ++i)
        v.push_back(5.0 + 0.1 * i);
    return v;
}

// Score of `level` for a pair, computed from scratch in long double.
long double oracle_score(double level, double i1, double i2)
{
    const long double base = 0.5L * 155e-6L * (level - 0.74L) * (level - 0.74L);
    const long double v1 = (i1 / base - 1.0L) / 0.037L;
    const long double v2 = (i2 / base - 1.0L) / 0.037L;
    const long double ref = 0.037L * (static_cast<long double>(i1) + i2) / 2.0L;
    return std::fabs((static_cast<long double>(i2) - i1) / (v2 - v1) - ref);
}

bool oracle_in_range(double level, double i)
{
    const double v = invert_vds(dev, level, i);
    return vds_box.contains(v, kRangeTolerance);
}

} // namespace

TEST_SUITE("codec") {

TEST_CASE("build_levels")
{
    CHECK(build_levels({1, 5}, 1.0) == std::vector<double>{1, 2, 3, 4, 5});
    CHECK(build_levels({5, 10}, 5.0) == std::vector<double>{5, 10});

    const auto l = build_levels({5, 10}, 0.41);
    REQUIRE(l.size() == 13);
    CHECK(l.size() == static_cast<std::size_t>(std::floor((10.0 - 5.0) / 0.41)) + 1);
    CHECK(l.front() == 5.0);
    CHECK(l.back() == doctest::Approx(9.92));
    for (std::size_t i = 1; i < l.size(); ++i)
        CHECK(std::abs(l[i] - l[i - 1] - 0.41) <= 1e-12);

    // Exact divisions keep the top endpoint.
    CHECK(build_levels({5, 10}, 0.05).size() == 101);
    CHECK(build_levels({5, 10}, 0.05).back() == doctest::Approx(10.0));
    CHECK(build_levels({5, 10}, 6.0) == std::vector<double>{5});

    CHECK_THROWS_AS(build_levels({5, 10}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_levels({5, 10}, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_levels({10, 5}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(build_levels({5, 10}, 6.0, 2), std::invalid_argument);
}

TEST_CASE("quantize")
{
    const std::vector<double> l{1, 2, 3, 4, 5};
    CHECK(quantize(2.4, l) == 2);
    CHECK(quantize(2.5, l) == 2);
    CHECK(quantize(2.5000001, l) == 3);
    CHECK(quantize(0.2, l) == 1);
    CHECK(quantize(7.0, l) == 5);
    CHECK(quantize_index(3.9, l) == 3);
    CHECK_THROWS_AS(quantize(1.0, std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("quantizer idempotence and error bound")
{
    const auto l = build_levels({5, 10}, 0.41);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(4.0, 11.0);
    for (int i = 0; i < 5000; ++i) {
        const double x = u(rng);
        const double q = quantize(x, l);
        CHECK(quantize(q, l) == q);
        CHECK(std::find(l.begin(), l.end(), q) != l.end());
        if (x >= l.front() && x <= l.back())
            CHECK(std::abs(x - q) <= 0.41 / 2 + 1e-12);
        // Brute force nearest, ties low.
        double best = l[0];
        for (double v : l)
            if (std::abs(v - x) < std::abs(best - x))
                best = v;
        CHECK(q == best);
    }
}

TEST_CASE("codec config validation")
{
    CHECK_NOTHROW(paper_levels().validate(dev));
    CHECK_THROWS_AS(CodecConfig::from_levels({}, vds_box).validate(dev), std::invalid_argument);
    CHECK_THROWS_AS(CodecConfig::from_levels({0.5, 1, 2}, vds_box).validate(dev), std::invalid_argument);
    CHECK_THROWS_AS(CodecConfig::from_levels({1, 3, 2}, vds_box).validate(dev), std::invalid_argument);
    CHECK_THROWS_AS(CodecConfig::from_levels({1, 2}, {10, 5}).validate(dev), std::invalid_argument);

    const auto u = CodecConfig::uniform({5, 10}, 0.41, vds_box);
    CHECK(u.levels.size() == 13);
    CHECK(u.delta == 0.41);
}

TEST_CASE("encode")
{
    const auto cfg = paper_levels();
    CHECK(encode(dev, cfg, 1.2, 5.0) == doctest::Approx(6.2082e-6).epsilon(1e-4));
    CHECK(encode(dev, cfg, 3.0, 5.0) == doctest::Approx(4.6907e-4).epsilon(1e-4));
    CHECK(encode(dev, cfg, 3.0, 5.1) == doctest::Approx(4.7053e-4).epsilon(1e-4));
    CHECK(encode(dev, cfg, 3.4, 7.0) == drain_current(dev, 3.0, 7.0));
    CHECK_THROWS_AS(encode(dev, cfg, 3.0, 4.0), std::domain_error);
    CHECK_THROWS_AS(encode(dev, cfg, 3.0, 10.5), std::domain_error);
}

TEST_CASE("decode_pair examples")
{
    const auto cfg = paper_levels();
    const auto a = decode_pair(dev, cfg, 4.6907e-4, 4.7053e-4);
    CHECK(a.vgs_hat == 3.0);
    CHECK(a.vds_hat_1 == doctest::Approx(5.0).epsilon(1e-3));
    CHECK(a.vds_hat_2 == doctest::Approx(5.1).epsilon(1e-3));
    CHECK(a.in_range);

    const auto b = decode_pair(dev, cfg, drain_current(dev, 1, 5.0), drain_current(dev, 1, 5.1));
    CHECK(b.vgs_hat == 1.0);
    CHECK_FALSE(b.corrected);
    CHECK(b.vds_hat_1 == doctest::Approx(5.0).epsilon(1e-9));
    CHECK(b.vds_hat_2 == doctest::Approx(5.1).epsilon(1e-9));

    CHECK_THROWS_AS(decode_pair(dev, cfg, 0.0, 1e-3), std::domain_error);
    CHECK_THROWS_AS(decode_pair(dev, cfg, 1e-3, -1e-3), std::domain_error);
}

TEST_CASE("every consecutive noiseless pair on the grid decodes after correction")
{
    const auto cfg = paper_levels();
    const auto v = vds_points();
    int pairs = 0;
    for (double g : cfg.levels)
        for (std::size_t k = 0; k + 2 < v.size(); ++k) {
            const auto d = decode_pair(dev, cfg, drain_current(dev, g, v[k]), drain_current(dev, g, v[k + 1]));
            CHECK(d.vgs_hat == g);
            CHECK(d.in_range);
            CHECK(std::abs(d.vds_hat_1 - v[k]) <= 1e-6);
            CHECK(std::abs(d.vds_hat_2 - v[k + 1]) <= 1e-6);
            ++pairs;
        }
    CHECK(pairs == 5 * 49);
}

TEST_CASE("true level wins the slope match or every better imposter is out of range")
{
    const auto cfg = paper_levels();
    const auto v = vds_points();
    int won_outright = 0, rescued = 0;
    for (double g : cfg.levels)
        for (std::size_t k = 0; k + 1 < v.size(); ++k) {
            const double i1 = drain_current(dev, g, v[k]), i2 = drain_current(dev, g, v[k + 1]);
            const long double own = oracle_score(g, i1, i2);
            bool beaten = false;
            for (double other : cfg.levels) {
                if (other == g || oracle_score(other, i1, i2) > own)
                    continue;
                beaten = true;
                CHECK_FALSE((oracle_in_range(other, i1) && oracle_in_range(other, i2)));
            }
            const auto pre = decode_pair(dev, cfg, i1, i2, {.range_check = false});
            const auto post = decode_pair(dev, cfg, i1, i2);
            CHECK(post.vgs_hat == g);
            if (beaten) {
                ++rescued;
                CHECK(pre.vgs_hat != g);
                CHECK(post.corrected);
            } else {
                ++won_outright;
                CHECK(pre.vgs_hat == g);
                CHECK_FALSE(post.corrected);
            }
        }
    // Both branches occur on this grid.
    CHECK(won_outright > 0);
    CHECK(rescued > 0);
}

TEST_CASE("uncorrected misdecodes sit at the high end of the curves")
{
    const auto cfg = paper_levels();
    const auto v = vds_points();
    for (double g : cfg.levels)
        for (std::size_t k = 0; k + 1 < v.size(); ++k) {
            const auto d = decode_pair(dev, cfg, drain_current(dev, g, v[k]), drain_current(dev, g, v[k + 1]),
                                       {.range_check = false});
            if (d.vgs_hat != g)
                CHECK(v[k] >= 7.5);
        }
}

TEST_CASE("decode_pair is permutation covariant")
{
    const auto cfg = CodecConfig::uniform({5, 10}, 0.41, vds_box);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(1e-3, 9e-3);
    for (int i = 0; i < 2000; ++i) {
        const double a = u(rng), b = u(rng);
        for (bool rc : {false, true}) {
            const auto ab = decode_pair(dev, cfg, a, b, {rc});
            const auto ba = decode_pair(dev, cfg, b, a, {rc});
            CHECK(ab.vgs_hat == ba.vgs_hat);
            CHECK(ab.vds_hat_1 == ba.vds_hat_2);
            CHECK(ab.vds_hat_2 == ba.vds_hat_1);
            CHECK(ab.in_range == ba.in_range);
        }
    }
}

TEST_CASE("equal currents fall through to the lowest in-range level")
{
    const auto cfg = paper_levels();
    for (double g : cfg.levels) {
        const double i = drain_current(dev, g, 7.0);
        const auto d = decode_pair(dev, cfg, i, i);
        // Enumerate levels whose inverse lands in range.
        double lowest = -1;
        int in_range = 0;
        for (double other : cfg.levels)
            if (oracle_in_range(other, i)) {
                if (lowest < 0)
                    lowest = other;
                ++in_range;
            }
        CHECK(in_range == 1);
        CHECK(d.vgs_hat == lowest);
        CHECK(d.vgs_hat == g);
        CHECK(d.vds_hat_1 == doctest::Approx(7.0));
    }

    // With overlapping curves the lowest candidate is taken.
    const auto dense = CodecConfig::uniform({5, 10}, 0.05, vds_box);
    const double i = drain_current(dev, 7.5, 7.5);
    const auto d = decode_pair(dev, dense, i, i);
    CHECK(d.in_range);
    for (std::size_t k = 0; k < d.level_index; ++k)
        CHECK_FALSE(oracle_in_range(dense.levels[k], i));
}

TEST_CASE("no in-range candidate returns the best slope match flagged out of range")
{
    const auto cfg = paper_levels();
    const auto d = decode_pair(dev, cfg, 1e-9, 2e-9);
    CHECK_FALSE(d.in_range);
    CHECK_FALSE(d.corrected);
    const auto pre = decode_pair(dev, cfg, 1e-9, 2e-9, {.range_check = false});
    CHECK(d.vgs_hat == pre.vgs_hat);
}

TEST_CASE("decode_stream")
{
    const auto cfg = paper_levels();
    std::vector<double> ids;
    for (int k = 0; k < 50; ++k)
        ids.push_back(drain_current(dev, 3.0, 5.0 + 0.1 * k));
    const auto out = decode_stream(dev, cfg, ids);
    REQUIRE(out.size() == 50);
    for (int k = 0; k < 50; ++k) {
        CHECK(out[k].vgs_hat == 3.0);
        CHECK(out[k].vds_hat == doctest::Approx(5.0 + 0.1 * k).epsilon(1e-9));
    }

    // Odd length: the last sample is decoded with its predecessor; the
    // predecessor keeps its own pair.
    std::vector<double> odd(ids.begin(), ids.begin() + 5);
    const auto o = decode_stream(dev, cfg, odd);
    REQUIRE(o.size() == 5);
    CHECK(o[4].vds_hat == doctest::Approx(5.4).epsilon(1e-9));
    const auto pair23 = decode_pair(dev, cfg, odd[2], odd[3]);
    CHECK(o[3].vds_hat == pair23.vds_hat_2);

    CHECK_THROWS_AS(decode_stream(dev, cfg, std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(decode_stream(dev, cfg, std::vector<double>{1e-3}), std::invalid_argument);
}

TEST_CASE("noiseless identity when the curves do not overlap in current")
{
    // Premise: no other level reaches any current of a curve with an
    // in-range drain voltage.
    auto separated = [](const CodecConfig& cfg) {
        for (double g : cfg.levels)
            for (double other : cfg.levels) {
                if (other == g)
                    continue;
                for (double v : {cfg.vds_range.lo, cfg.vds_range.hi})
                    if (cfg.vds_range.contains(invert_vds(dev, other, drain_current(dev, g, v)), kRangeTolerance))
                        return false;
            }
        return true;
    };

    std::mt19937_64 rng(5);
    for (const auto& cfg : {paper_levels(), CodecConfig::uniform({1, 9}, 2.0, vds_box),
                            CodecConfig::uniform({1, 3}, 0.5, {0.0, 4.0})}) {
        REQUIRE(separated(cfg));
        std::uniform_real_distribution<double> graw(cfg.levels.front(), cfg.levels.back());
        const double step = cfg.vds_range.width() / 20;
        for (int t = 0; t < 50; ++t) {
            const double raw = graw(rng);
            const double q = quantize(raw, cfg.levels);
            std::vector<double> ids;
            for (int k = 0; k <= 20; ++k)
                ids.push_back(encode(dev, cfg, raw, cfg.vds_range.lo + step * k));
            const auto out = decode_stream(dev, cfg, ids);
            for (std::size_t k = 0; k < out.size(); ++k) {
                CHECK(out[k].vgs_hat == q);
                CHECK(std::abs(out[k].vds_hat - (cfg.vds_range.lo + step * static_cast<double>(k))) <= 1e-6);
            }
        }
    }
}

TEST_CASE("overlapping curves resolve to a higher level with a lower drain voltage")
{
    // At 0.41 V spacing the next curve up reaches the top of the current
    // range of its neighbour inside the drain window, and its two-point slope
    // is closer to the reference.
    const auto cfg = CodecConfig::uniform({5, 10}, 0.41, vds_box);
    const double g = cfg.levels[6];
    const auto d = decode_pair(dev, cfg, drain_current(dev, g, 9.8), drain_current(dev, g, 9.9));
    CHECK(d.in_range);
    CHECK(d.vgs_hat > g);
    CHECK(d.vds_hat_1 < 9.8);
    const long double own = oracle_score(g, drain_current(dev, g, 9.8), drain_current(dev, g, 9.9));
    CHECK(oracle_score(d.vgs_hat, drain_current(dev, g, 9.8), drain_current(dev, g, 9.9)) < own);
}

}
