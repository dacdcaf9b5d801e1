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

#include "ajscc/experiments.hpp"

#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using namespace ajscc;

namespace {

const MosfetParams dev{};

std::vector<double> half_open_vds_grid() { return make_grid(5.0, 10.0, 0.1, false); }

// Small field (8 blocks of 5x5x4) so that pipeline tests stay fast. An even
// t_p keeps every decoded pair inside one temporal block.
ChannelExperiment small_experiment()
{
    ChannelExperiment e;
    e.field = FieldSpec{.nx = 10, .ny = 10, .nt = 8, .s_p = 5, .t_p = 4};
    e.replicates = 2;
    e.seed = 3;
    e.workers = 2;
    return e;
}

ChannelExperiment ideal_experiment()
{
    auto e = small_experiment();
    e.ideal_channel = true;
    // Keeps every sample clear of the window edges by more than the FFT-bin
    // rounding of the drain voltage.
    e.vds_field_range = Interval{5.5, 9.5};
    return e;
}

} // namespace

TEST_SUITE("experiments") {

TEST_CASE("grids")
{
    const auto g = half_open_vds_grid();
    REQUIRE(g.size() == 50);
    CHECK(g.front() == 5.0);
    CHECK(g.back() == doctest::Approx(9.9));
    CHECK(make_grid(5.0, 10.0, 0.1, true).size() == 51);
    CHECK(make_grid(0.001, 0.2, 0.001).size() == 200);
    CHECK(make_grid(0.05, 1.25, 0.05).size() == 25);
    CHECK(make_grid(0.0, 1.0, 0.3, false).size() == 4);
    CHECK_THROWS_AS(make_grid(0, 1, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_grid(1, 0, 0.1), std::invalid_argument);
}

TEST_CASE("parallel_for visits every index once and propagates errors")
{
    for (unsigned w : {1u, 2u, 5u}) {
        std::vector<std::atomic<int>> hits(97);
        parallel_for(hits.size(), w, [&](std::size_t i) { ++hits[i]; });
        for (auto& h : hits)
            CHECK(h.load() == 1);
        CHECK_THROWS_AS(parallel_for(10, w,
                                     [](std::size_t i) {
                                         if (i == 7)
                                             throw std::runtime_error("boom");
                                     }),
                        std::runtime_error);
    }
}

TEST_CASE("block MSE of exact and biased estimates")
{
    const auto truth = generate_field(FieldSpec{}, 5);
    const auto v = truth.values();
    CHECK(block_mse(truth, v) == 0.0);

    std::vector<double> shifted(v.begin(), v.end());
    for (auto& x : shifted)
        x += 0.3;
    CHECK(block_mse(truth, shifted) == doctest::Approx(0.09).epsilon(1e-12));

    const auto r = mse_averaged(truth, v, truth, shifted);
    CHECK(r.mse_gs == 0.0);
    CHECK(r.mse_ds == doctest::Approx(0.09));
    CHECK(r.mse_sum == doctest::Approx(0.045));
    CHECK(r.n_blocks == 8);

    CHECK_THROWS_AS(block_mse(truth, std::vector<double>(7)), std::invalid_argument);
    const auto other = generate_field(FieldSpec{.nx = 10, .ny = 10, .nt = 8, .s_p = 5, .t_p = 4}, 1);
    CHECK_THROWS_AS(mse_averaged(truth, v, other, other.values()), std::invalid_argument);
}

TEST_CASE("block averaging divides i.i.d. error variance by the block size")
{
    // 10x10x10 blocks; direct simulation of the block-mean error.
    const double sigma = 0.8;
    std::mt19937_64 rng(21);
    std::normal_distribution<double> e(0.0, sigma);
    double acc = 0.0;
    const int reps = 400;
    for (int r = 0; r < reps; ++r) {
        const auto truth = generate_field(FieldSpec{}, static_cast<std::uint64_t>(r));
        std::vector<double> est(truth.values().begin(), truth.values().end());
        for (auto& x : est)
            x += e(rng);
        acc += block_mse(truth, est);
    }
    // 3200 squared block means: relative standard error about 2.5%.
    CHECK(acc / reps == doctest::Approx(sigma * sigma / 1000).epsilon(0.1));
}

TEST_CASE("erased samples are left out of the block averages")
{
    const auto truth = generate_field(FieldSpec{}, 5);
    std::vector<double> est(truth.values().begin(), truth.values().end());
    std::vector<std::uint8_t> valid(est.size(), 1);
    // Corrupt and erase half of block 0.
    std::size_t n = 0;
    for (std::size_t i = 0; i < est.size() && n < 500; ++i)
        if (truth.block_of(i / 400, (i / 20) % 20, i % 20) == 0) {
            est[i] = 100.0;
            valid[i] = 0;
            ++n;
        }
    CHECK(block_mse(truth, est, valid) < 1e-20);
    CHECK(block_mse(truth, est) > 1.0);

    // A block with no valid sample is estimated by the fallback.
    std::vector<std::uint8_t> none(est.size(), 0);
    const auto means = block_means(truth, truth.values());
    double want = 0.0;
    for (double m : means)
        want += (7.5 - m) * (7.5 - m);
    CHECK(block_mse(truth, est, none, 7.5) == doctest::Approx(want / 8));
}

TEST_CASE("noiseless decoding at the default device")
{
    const auto grid = half_open_vds_grid();
    const std::vector<double> levels{1, 2, 3, 4, 5};
    const auto r = run_noiseless(dev, levels, grid, {5, 10});
    CHECK(r.points.size() == 250);
    CHECK(r.accuracy_post == 1.0);
    CHECK(r.mse_ds_post < 1e-10);
    CHECK(r.mse_gs_post == 0.0);
    CHECK(r.accuracy_pre < 1.0);
    CHECK(r.mse_pre() > r.mse_post());

    // Without correction, misdecodes appear only at the top of the drain range.
    const auto raw = run_noiseless(dev, levels, grid, {5, 10}, false);
    int wrong = 0;
    for (const auto& p : raw.points)
        if (p.vgs_hat != p.vgs_true) {
            ++wrong;
            CHECK(p.vds_true >= 7.5);
        }
    CHECK(wrong > 0);
    CHECK(static_cast<double>(wrong) / 250.0 == doctest::Approx(1.0 - raw.accuracy_pre));

    MosfetParams weak = dev;
    weak.lambda = 0.001;
    CHECK(run_noiseless(weak, levels, grid, {5, 10}).accuracy_pre == 1.0);
}

TEST_CASE("lambda sweep")
{
    const auto grid = half_open_vds_grid();
    const std::vector<double> levels{1, 2, 3, 4, 5};
    const auto lambdas = make_grid(0.001, 0.2, 0.001);
    const auto pts = sweep_lambda(dev, lambdas, levels, grid, {5, 10});
    REQUIRE(pts.size() == 200);
    double small = 0.0, large = 0.0;
    for (const auto& p : pts) {
        CHECK(p.mse_post < 1e-6);
        CHECK(p.accuracy_post == 1.0);
        if (p.lambda <= 0.02 + 1e-12)
            small = std::max(small, p.mse_pre);
        if (p.lambda >= 0.03 - 1e-12)
            large = std::max(large, p.mse_pre);
    }
    CHECK(small < 1e-6);
    CHECK(large >= 100.0 * std::max(small, 1e-6));
    const std::vector<double> bad{0.0, 0.01};
    CHECK_THROWS_AS(sweep_lambda(dev, bad, levels, grid, {5, 10}), std::invalid_argument);
}

TEST_CASE("failed decode policy names")
{
    for (auto p : {FailedDecodePolicy::Keep, FailedDecodePolicy::Clamp, FailedDecodePolicy::Midpoint,
                   FailedDecodePolicy::Erase})
        CHECK(parse_failed_policy(to_string(p)) == p);
    CHECK_THROWS_AS(parse_failed_policy("drop"), std::invalid_argument);
}

TEST_CASE("ideal channel recovers the quantized gate voltage exactly")
{
    const auto e = ideal_experiment();
    for (double delta : {1.0, 1.25, 2.5}) {
        const auto levels = build_levels(e.vgs_range, delta);
        const auto ch = e.channel_for(410e3, -20.0);
        for (std::size_t rep = 0; rep < 4; ++rep) {
            const auto run = run_pipeline(e, delta, ch, rep);
            CHECK(run.report.failed_fraction == 0.0);

            // Direct quantization error of the block values.
            const auto truth = block_means(run.vgs, run.vgs.values());
            double q = 0.0;
            for (double t : truth) {
                const double d = quantize(t, levels) - t;
                q += d * d;
                CHECK(d * d <= delta * delta / 4);
            }
            q /= static_cast<double>(truth.size());
            CHECK(run.report.mse_gs == doctest::Approx(q).epsilon(1e-12));
            for (std::size_t i = 0; i < run.vgs_hat.size(); ++i)
                CHECK(run.vgs_hat[i] == quantize(run.vgs.values()[i], levels));

            // Drain voltages are off by at most half an FFT bin of current.
            const double half_bin = 0.5 * ch.bin_width() / ch.fm_scale;
            const double bound = half_bin / curve_slope(dev, levels.front());
            CHECK(run.report.mse_ds <= bound * bound);
        }
    }
}

TEST_CASE("ideal channel quantization error grows with the level spacing")
{
    auto e = ideal_experiment();
    e.replicates = 30;
    double prev = -1.0;
    for (double delta : {1.0, 1.25, 2.5, 5.0}) {
        const auto r = run_channel_point(e, delta, 410e3, 0.0);
        CHECK(r.mse_gs >= prev);
        CHECK(r.mse_gs <= delta * delta / 4);
        prev = r.mse_gs;
    }
}

TEST_CASE("pipeline is deterministic in the seed and independent of the worker count")
{
    auto e = small_experiment();
    const auto ch = e.channel_for(410e3, -20.0);
    const auto a = run_pipeline(e, 0.41, ch, 0);
    const auto b = run_pipeline(e, 0.41, ch, 0);
    CHECK(a.report.mse_gs == b.report.mse_gs);
    CHECK(a.report.mse_ds == b.report.mse_ds);
    CHECK(a.ids_hat == b.ids_hat);

    e.workers = 1;
    const auto c = run_pipeline(e, 0.41, ch, 0);
    CHECK(c.ids_hat == a.ids_hat);
    CHECK(c.vds_hat == a.vds_hat);

    e.seed = 4;
    const auto d = run_pipeline(e, 0.41, ch, 0);
    CHECK(d.ids_hat != a.ids_hat);
}

TEST_CASE("failed decode policies")
{
    auto e = small_experiment();
    const auto ch = e.channel_for(410e3, -25.0);
    e.policy = FailedDecodePolicy::Keep;
    const auto keep = run_pipeline(e, 0.41, ch, 0);
    REQUIRE(keep.report.failed_fraction > 0.0);

    e.policy = FailedDecodePolicy::Clamp;
    const auto clamp = run_pipeline(e, 0.41, ch, 0);
    e.policy = FailedDecodePolicy::Midpoint;
    const auto mid = run_pipeline(e, 0.41, ch, 0);
    e.policy = FailedDecodePolicy::Erase;
    const auto erase = run_pipeline(e, 0.41, ch, 0);

    CHECK(clamp.vgs_hat == keep.vgs_hat);
    for (std::size_t i = 0; i < keep.vds_hat.size(); ++i) {
        CHECK(clamp.vds_hat[i] >= 5.0);
        CHECK(clamp.vds_hat[i] <= 10.0);
        if (erase.valid[i])
            CHECK(mid.vds_hat[i] == keep.vds_hat[i]);
        else
            CHECK(mid.vds_hat[i] == 7.5);
    }
    CHECK(std::count(erase.valid.begin(), erase.valid.end(), 0) > 0);
}

TEST_CASE("sweeps")
{
    auto e = small_experiment();
    e.replicates = 1;
    const std::vector<double> deltas{0.5, 1.0, 2.0};
    const auto sd = sweep_delta(e, deltas);
    CHECK(sd.axis == "delta");
    REQUIRE(sd.reports.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(sd.reports[i].delta == deltas[i]);
        CHECK(sd.reports[i].mse_sum == doctest::Approx(0.5 * (sd.reports[i].mse_gs + sd.reports[i].mse_ds)));
        CHECK(sd.reports[sd.argmin].mse_sum <= sd.reports[i].mse_sum);
    }
    const std::vector<double> unsorted{1.0, 0.5};
    CHECK_THROWS_AS(sweep_delta(e, unsorted), std::invalid_argument);
    const std::vector<double> negative{-1.0, 0.5};
    CHECK_THROWS_AS(sweep_delta(e, negative), std::invalid_argument);

    const std::vector<double> snrs{-40, 0};
    const std::vector<double> bws{50e3, 410e3};
    const auto ss = sweep_snr(e, snrs, bws, 0.41);
    REQUIRE(ss.size() == 2);
    for (std::size_t b = 0; b < 2; ++b) {
        REQUIRE(ss[b].reports.size() == 2);
        CHECK(ss[b].reports[0].bandwidth_hz == bws[b]);
        CHECK(ss[b].reports[1].snr_db == 0.0);
    }
}

TEST_CASE("symbol timing across bandwidths")
{
    auto e = small_experiment();
    CHECK(e.channel_for(50e3, 0).samples_per_symbol == 2048);
    CHECK(e.channel_for(50e3, 0).bin_width() == doctest::Approx(2 * 50e3 / 2048));
    e.fixed_symbol_duration = true;
    const auto c = e.channel_for(50e3, 0);
    CHECK(c.samples_per_symbol == 250);
    CHECK(c.symbol_duration() == doctest::Approx(e.symbol_duration()).epsilon(1e-3));
    CHECK(e.channel_for(410e3, 0).samples_per_symbol == 2048);
}

TEST_CASE("experiment validation")
{
    auto e = small_experiment();
    e.vds_field_range = Interval{4.0, 9.0};
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
    e = small_experiment();
    e.replicates = 0;
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
    e = small_experiment();
    e.fm_fill = 1.5;
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
    e = small_experiment();
    e.device.lambda = 0.0;
    CHECK_THROWS_AS(e.validate(), std::invalid_argument);
}

}
