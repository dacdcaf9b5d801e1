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

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <mutex>
#include <thread>

namespace ajscc {

std::vector<double> make_grid(double lo, double hi, double step, bool include_hi)
{
    if (!(step > 0.0))
        throw std::invalid_argument("grid step must be positive");
    if (hi < lo)
        throw std::invalid_argument("grid: hi below lo");
    const double span = (hi - lo) / step;
    auto count = static_cast<std::size_t>(std::floor(span + 1e-9));
    // The last point is lo + count * step; keep it only if inclusive or short of hi.
    const bool hits_hi = std::abs(span - std::round(span)) < 1e-9;
    if (include_hi || !hits_hi)
        ++count;
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i)
        g[i] = lo + static_cast<double>(i) * step;
    return g;
}

namespace {

double mean_sq(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a[i] - b[i]) * (a[i] - b[i]);
    return a.empty() ? 0.0 : s / static_cast<double>(a.size());
}

} // namespace

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn)
{
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next = n;
            }
        }
    };
    std::vector<std::jthread> pool;
    const auto count = std::min<std::size_t>(workers, n);
    for (std::size_t w = 0; w + 1 < count; ++w)
        pool.emplace_back(body);
    body();
    pool.clear();
    if (error)
        std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------

NoiselessResult run_noiseless(const MosfetParams& p, std::span<const double> levels, std::span<const double> vds_grid,
                              Interval vds_range, bool scatter_with_correction)
{
    const auto cfg = CodecConfig::from_levels({levels.begin(), levels.end()}, vds_range);
    cfg.validate(p);

    NoiselessResult res;
    std::vector<double> gs_true, ds_true, gs_pre, ds_pre, gs_post, ds_post;
    std::size_t hits_pre = 0, hits_post = 0;

    for (const double g : levels) {
        std::vector<double> ids(vds_grid.size());
        for (std::size_t k = 0; k < vds_grid.size(); ++k)
            ids[k] = encode(p, cfg, g, vds_grid[k]);

        const auto pre = decode_stream(p, cfg, ids, {.range_check = false});
        const auto post = decode_stream(p, cfg, ids, {.range_check = true});
        const auto& shown = scatter_with_correction ? post : pre;

        for (std::size_t k = 0; k < vds_grid.size(); ++k) {
            gs_true.push_back(g);
            ds_true.push_back(vds_grid[k]);
            gs_pre.push_back(pre[k].vgs_hat);
            ds_pre.push_back(pre[k].vds_hat);
            gs_post.push_back(post[k].vgs_hat);
            ds_post.push_back(post[k].vds_hat);
            hits_pre += pre[k].vgs_hat == g;
            hits_post += post[k].vgs_hat == g;
            res.points.push_back({g, vds_grid[k], shown[k].vgs_hat, shown[k].vds_hat, shown[k].corrected});
        }
    }

    const auto n = static_cast<double>(gs_true.size());
    res.accuracy_pre = static_cast<double>(hits_pre) / n;
    res.accuracy_post = static_cast<double>(hits_post) / n;
    res.mse_gs_pre = mean_sq(gs_pre, gs_true);
    res.mse_ds_pre = mean_sq(ds_pre, ds_true);
    res.mse_gs_post = mean_sq(gs_post, gs_true);
    res.mse_ds_post = mean_sq(ds_post, ds_true);
    return res;
}

std::vector<LambdaPoint> sweep_lambda(const MosfetParams& base, std::span<const double> lambdas,
                                      std::span<const double> levels, std::span<const double> vds_grid,
                                      Interval vds_range)
{
    std::vector<LambdaPoint> out;
    out.reserve(lambdas.size());
    for (const double lambda : lambdas) {
        if (!(lambda > 0.0))
            throw std::invalid_argument("lambda: sweep values must be positive");
        auto p = base;
        p.lambda = lambda;
        const auto r = run_noiseless(p, levels, vds_grid, vds_range);
        out.push_back({lambda, r.mse_pre(), r.mse_post(), r.accuracy_pre, r.accuracy_post});
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string to_string(FailedDecodePolicy p)
{
    switch (p) {
    case FailedDecodePolicy::Keep: return "keep";
    case FailedDecodePolicy::Clamp: return "clamp";
    case FailedDecodePolicy::Midpoint: return "midpoint";
    case FailedDecodePolicy::Erase: return "erase";
    }
    return "?";
}

FailedDecodePolicy parse_failed_policy(const std::string& s)
{
    for (auto p : {FailedDecodePolicy::Keep, FailedDecodePolicy::Clamp, FailedDecodePolicy::Midpoint,
                   FailedDecodePolicy::Erase})
        if (s == to_string(p))
            return p;
    throw std::invalid_argument("failed_policy: expected keep, clamp, midpoint or erase, got '" + s + "'");
}

double block_mse(const Field& truth, std::span<const double> decoded, std::span<const std::uint8_t> valid,
                 double fallback)
{
    const auto& s = truth.spec();
    if (decoded.size() != s.size() || (!valid.empty() && valid.size() != s.size()))
        throw std::invalid_argument("block_mse: shape mismatch");

    const auto reference = block_means(truth, truth.values());
    std::vector<double> sum(s.block_count(), 0.0);
    std::vector<std::size_t> count(s.block_count(), 0);
    for (std::size_t x = 0; x < s.nx; ++x)
        for (std::size_t y = 0; y < s.ny; ++y)
            for (std::size_t t = 0; t < s.nt; ++t) {
                const auto i = truth.index(x, y, t);
                if (!valid.empty() && !valid[i])
                    continue;
                const auto b = truth.block_of(x, y, t);
                sum[b] += decoded[i];
                ++count[b];
            }

    double acc = 0.0;
    for (std::size_t b = 0; b < sum.size(); ++b) {
        const double est = count[b] ? sum[b] / static_cast<double>(count[b]) : fallback;
        acc += (est - reference[b]) * (est - reference[b]);
    }
    return acc / static_cast<double>(sum.size());
}

MseReport mse_averaged(const Field& truth_gs, std::span<const double> decoded_gs, const Field& truth_ds,
                       std::span<const double> decoded_ds, std::span<const std::uint8_t> valid)
{
    const auto& a = truth_gs.spec();
    const auto& b = truth_ds.spec();
    if (a.nx != b.nx || a.ny != b.ny || a.nt != b.nt || a.s_p != b.s_p || a.t_p != b.t_p)
        throw std::invalid_argument("mse_averaged: V_gs and V_ds fields differ in geometry");

    MseReport r;
    r.mse_gs = block_mse(truth_gs, decoded_gs, valid, 0.5 * (a.lo + a.hi));
    r.mse_ds = block_mse(truth_ds, decoded_ds, valid, 0.5 * (b.lo + b.hi));
    r.mse_sum = 0.5 * (r.mse_gs + r.mse_ds);
    r.n_blocks = a.block_count();
    return r;
}

// ---------------------------------------------------------------------------

double ChannelExperiment::max_current() const
{
    return drain_current(device, vgs_range.hi, vds_range.hi);
}

double ChannelExperiment::symbol_duration() const
{
    return static_cast<double>(channel.samples_per_symbol) / (oversampling * channel.bandwidth_hz);
}

ChannelConfig ChannelExperiment::channel_for(double bandwidth_hz, double snr_db) const
{
    ChannelConfig c = channel;
    c.bandwidth_hz = bandwidth_hz;
    c.snr_db = snr_db;
    c.sample_rate_hz = oversampling * bandwidth_hz;
    if (fixed_symbol_duration)
        c.samples_per_symbol = static_cast<std::size_t>(std::llround(symbol_duration() * c.sample_rate_hz));
    c.fm_scale = fm_scale ? *fm_scale : auto_fm_scale(bandwidth_hz, max_current(), fm_fill);
    if (ideal_channel) {
        c.snr_db = kInf;
        c.rician_k_db = kInf;
        c.doppler_fraction = 0.0;
    }
    return c;
}

void ChannelExperiment::validate() const
{
    device.validate();
    auto f = field;
    f.lo = vgs_range.lo;
    f.hi = vgs_range.hi;
    f.validate();
    if (!(vgs_range.lo > device.v_th))
        throw std::invalid_argument("vgs_lo: must be above v_th");
    if (!(vds_range.lo < vds_range.hi) || vds_range.lo < 0.0)
        throw std::invalid_argument("vds_lo/vds_hi: need 0 <= vds_lo < vds_hi");
    if (vds_field_range && !(vds_field_range->lo >= vds_range.lo && vds_field_range->hi <= vds_range.hi &&
                             vds_field_range->lo < vds_field_range->hi))
        throw std::invalid_argument("vds_field_range: must be a non-empty part of vds_range");
    if (!(device.lambda > 0.0))
        throw std::invalid_argument("lambda: must be positive for decoding");
    if (!(oversampling >= 1.0))
        throw std::invalid_argument("oversampling: must be at least 1");
    if (!(fm_fill > 0.0 && fm_fill <= 1.0))
        throw std::invalid_argument("fm_fill: must lie in (0, 1]");
    if (replicates == 0)
        throw std::invalid_argument("replicates: must be at least 1");
    channel_for(channel.bandwidth_hz, channel.snr_db).validate(max_current());
}

PipelineRun run_pipeline(const ChannelExperiment& exp, double delta, const ChannelConfig& channel,
                         std::size_t replicate)
{
    auto gs_spec = exp.field;
    gs_spec.lo = exp.vgs_range.lo;
    gs_spec.hi = exp.vgs_range.hi;
    auto ds_spec = exp.field;
    const auto ds_source = exp.vds_field_range.value_or(exp.vds_range);
    ds_spec.lo = ds_source.lo;
    ds_spec.hi = ds_source.hi;

    PipelineRun run;
    run.vgs = generate_field(gs_spec, derive_seed(exp.seed, replicate, 1));
    run.vds = generate_field(ds_spec, derive_seed(exp.seed, replicate, 2));
    auto ch = channel;
    ch.seed = derive_seed(exp.seed, replicate, 3);

    const auto codec = CodecConfig::uniform(exp.vgs_range, delta, exp.vds_range);
    codec.validate(exp.device);

    const std::size_t n = gs_spec.size();
    const std::size_t nt = gs_spec.nt;
    run.ids.resize(n);
    run.ids_hat.resize(n);
    run.vgs_hat.resize(n);
    run.vds_hat.resize(n);
    run.valid.assign(n, 1);

    const std::size_t sensors = gs_spec.nx * gs_spec.ny;
    std::vector<std::uint8_t> failed(n, 0);
    parallel_for(sensors, exp.workers, [&](std::size_t s) {
        const std::size_t base = s * nt;
        for (std::size_t t = 0; t < nt; ++t) {
            const auto i = base + t;
            run.ids[i] = encode(exp.device, codec, run.vgs.values()[i], run.vds.values()[i]);
            run.ids_hat[i] = pass_through(run.ids[i], ch, i);
        }
        if (nt < 2) {
            // A single instant cannot be pair-decoded; count it as failed.
            for (std::size_t t = 0; t < nt; ++t) {
                failed[base + t] = 1;
                run.vgs_hat[base + t] = exp.vgs_range.mid();
                run.vds_hat[base + t] = exp.vds_range.mid();
            }
            return;
        }
        const auto dec = decode_stream(exp.device, codec, std::span<const double>(run.ids_hat).subspan(base, nt));
        for (std::size_t t = 0; t < nt; ++t) {
            const auto i = base + t;
            run.vgs_hat[i] = dec[t].vgs_hat;
            run.vds_hat[i] = dec[t].vds_hat;
            failed[i] = !dec[t].in_range;
        }
    });

    std::size_t n_failed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!failed[i])
            continue;
        ++n_failed;
        switch (exp.policy) {
        case FailedDecodePolicy::Keep: break;
        case FailedDecodePolicy::Clamp:
            run.vds_hat[i] = std::clamp(run.vds_hat[i], exp.vds_range.lo, exp.vds_range.hi);
            break;
        case FailedDecodePolicy::Midpoint: run.vds_hat[i] = exp.vds_range.mid(); break;
        case FailedDecodePolicy::Erase: run.valid[i] = 0; break;
        }
    }

    run.report = mse_averaged(run.vgs, run.vgs_hat, run.vds, run.vds_hat,
                              exp.policy == FailedDecodePolicy::Erase ? std::span<const std::uint8_t>(run.valid)
                                                                      : std::span<const std::uint8_t>{});
    run.report.delta = delta;
    run.report.snr_db = channel.snr_db;
    run.report.bandwidth_hz = channel.bandwidth_hz;
    run.report.lambda = exp.device.lambda;
    run.report.failed_fraction = static_cast<double>(n_failed) / static_cast<double>(n);
    return run;
}

MseReport run_channel_point(const ChannelExperiment& exp, double delta, double bandwidth_hz, double snr_db)
{
    const auto ch = exp.channel_for(bandwidth_hz, snr_db);
    MseReport mean;
    mean.delta = delta;
    mean.snr_db = snr_db;
    mean.bandwidth_hz = bandwidth_hz;
    mean.lambda = exp.device.lambda;
    for (std::size_t r = 0; r < exp.replicates; ++r) {
        const auto rep = run_pipeline(exp, delta, ch, r).report;
        mean.mse_gs += rep.mse_gs;
        mean.mse_ds += rep.mse_ds;
        mean.failed_fraction += rep.failed_fraction;
        mean.n_blocks += rep.n_blocks;
    }
    const auto k = static_cast<double>(exp.replicates);
    mean.mse_gs /= k;
    mean.mse_ds /= k;
    mean.failed_fraction /= k;
    mean.mse_sum = 0.5 * (mean.mse_gs + mean.mse_ds);
    return mean;
}

namespace {

std::size_t argmin_sum(const std::vector<MseReport>& reports)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < reports.size(); ++i)
        if (reports[i].mse_sum < reports[best].mse_sum)
            best = i;
    return best;
}

void require_ascending(std::span<const double> v, const char* key)
{
    if (v.empty())
        throw std::invalid_argument(std::string(key) + ": empty sweep");
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] > v[i - 1]))
            throw std::invalid_argument(std::string(key) + ": sweep values must be strictly ascending");
}

} // namespace

SweepResult sweep_delta(const ChannelExperiment& exp, std::span<const double> deltas)
{
    require_ascending(deltas, "delta");
    exp.validate();
    SweepResult res;
    res.axis = "delta";
    res.values.assign(deltas.begin(), deltas.end());
    for (const double d : deltas) {
        if (!(d > 0.0))
            throw std::invalid_argument("delta: sweep values must be positive");
        res.reports.push_back(run_channel_point(exp, d, exp.channel.bandwidth_hz, exp.channel.snr_db));
    }
    res.argmin = argmin_sum(res.reports);
    return res;
}

std::vector<SweepResult> sweep_snr(const ChannelExperiment& exp, std::span<const double> snrs,
                                   std::span<const double> bandwidths, double delta)
{
    require_ascending(snrs, "snr_db");
    exp.validate();
    std::vector<SweepResult> out;
    for (const double bw : bandwidths) {
        if (!(bw > 0.0))
            throw std::invalid_argument("bandwidths: values must be positive");
        SweepResult res;
        res.axis = "snr_db";
        res.values.assign(snrs.begin(), snrs.end());
        for (const double snr : snrs)
            res.reports.push_back(run_channel_point(exp, delta, bw, snr));
        res.argmin = argmin_sum(res.reports);
        out.push_back(std::move(res));
    }
    return out;
}

} // namespace ajscc
