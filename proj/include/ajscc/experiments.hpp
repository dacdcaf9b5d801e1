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

#include "ajscc/channel.hpp"
#include "ajscc/codec.hpp"
#include "ajscc/field.hpp"
#include "ajscc/mosfet.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ajscc {

/// {lo, lo + step, ...} for every value < hi (or <= hi when include_hi).
std::vector<double> make_grid(double lo, double hi, double step, bool include_hi = true);

/// Runs fn(i) for i in [0, n) on up to `workers` threads. fn must only write
/// to per-index state.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Device-only experiments

struct ScatterPoint {
    double vgs_true = 0.0;
    double vds_true = 0.0;
    double vgs_hat = 0.0;
    double vds_hat = 0.0;
    bool corrected = false;
};

struct NoiselessResult {
    std::vector<ScatterPoint> points;  ///< decoded with or without range check, per request
    double accuracy_pre = 0.0;         ///< fraction of exact V_gs decodes without range check
    double accuracy_post = 0.0;        ///< ... with range check
    double mse_gs_pre = 0.0, mse_ds_pre = 0.0;
    double mse_gs_post = 0.0, mse_ds_post = 0.0;

    double mse_pre() const { return 0.5 * (mse_gs_pre + mse_ds_pre); }
    double mse_post() const { return 0.5 * (mse_gs_post + mse_ds_post); }
};

/// Encodes every (level, vds) grid point and decodes each curve on its own
/// via decode_stream, with no channel. Per-point MSEs (no block averaging).
NoiselessResult run_noiseless(const MosfetParams& p, std::span<const double> levels, std::span<const double> vds_grid,
                              Interval vds_range, bool scatter_with_correction = true);

struct LambdaPoint {
    double lambda = 0.0;
    double mse_pre = 0.0;
    double mse_post = 0.0;
    double accuracy_pre = 0.0;
    double accuracy_post = 0.0;
};

/// run_noiseless for every lambda. Throws std::invalid_argument for
/// lambda <= 0, where the curves cannot be inverted.
std::vector<LambdaPoint> sweep_lambda(const MosfetParams& base, std::span<const double> lambdas,
                                      std::span<const double> levels, std::span<const double> vds_grid,
                                      Interval vds_range);

// ---------------------------------------------------------------------------
// Channel experiments

/// What the receiver does with a pair whose V_ds estimates fall outside the
/// known V_ds interval even after the range check.
enum class FailedDecodePolicy {
    Keep,      ///< use the decoder output as is
    Clamp,     ///< clamp V_ds estimates into the interval
    Midpoint,  ///< replace V_ds estimates by the interval midpoint
    Erase,     ///< drop both samples from the block averages
};

std::string to_string(FailedDecodePolicy p);
FailedDecodePolicy parse_failed_policy(const std::string& s);

struct MseReport {
    double delta = 0.0;
    double snr_db = 0.0;
    double bandwidth_hz = 0.0;
    double lambda = 0.0;
    double mse_gs = 0.0;
    double mse_ds = 0.0;
    double mse_sum = 0.0;          ///< (mse_gs + mse_ds) / 2
    std::size_t n_blocks = 0;      ///< blocks per field times replicates
    double failed_fraction = 0.0;  ///< share of samples whose pair failed the range check
};

/// Block-averaged MSE: the estimates inside every (s_p x s_p x t_p) block are
/// averaged and compared with the block mean of the truth. Samples with
/// valid[i] == 0 are left out; a block without valid samples is estimated by
/// `fallback`. Throws std::invalid_argument on shape mismatch.
double block_mse(const Field& truth, std::span<const double> decoded, std::span<const std::uint8_t> valid = {},
                 double fallback = 0.0);

/// mse_gs and mse_ds for one realisation; mse_sum is their mean.
MseReport mse_averaged(const Field& truth_gs, std::span<const double> decoded_gs, const Field& truth_ds,
                       std::span<const double> decoded_ds, std::span<const std::uint8_t> valid = {});

struct ChannelExperiment {
    MosfetParams device;
    FieldSpec field;                 ///< geometry; lo/hi are overridden by the two ranges below
    Interval vgs_range{5.0, 10.0};
    Interval vds_range{5.0, 10.0};
    std::optional<Interval> vds_field_range;  ///< source range of the V_ds field; vds_range when unset
    ChannelConfig channel;           ///< bandwidth, SNR, fading, Doppler; FFT length at this bandwidth
    double oversampling = 2.0;       ///< sample_rate / bandwidth
    double fm_fill = 0.8;            ///< top current lands at this fraction of the band
    std::optional<double> fm_scale;  ///< explicit Hz/A; overrides fm_fill
    bool ideal_channel = false;      ///< no noise, no fading, no Doppler
    /// Other bandwidths keep symbol_duration(), so their FFT length scales
    /// with the bandwidth. Off: every bandwidth uses samples_per_symbol.
    bool fixed_symbol_duration = false;
    FailedDecodePolicy policy = FailedDecodePolicy::Keep;
    std::size_t replicates = 10;
    std::uint64_t seed = 1;
    unsigned workers = 1;

    /// Largest current the transmitter can emit.
    double max_current() const;

    /// Symbol duration implied by channel.samples_per_symbol at
    /// channel.bandwidth_hz.
    double symbol_duration() const;

    /// Fully resolved channel for a bandwidth and SNR.
    ChannelConfig channel_for(double bandwidth_hz, double snr_db) const;

    /// Throws std::invalid_argument naming the offending parameter.
    void validate() const;
};

/// One realisation of the full pipeline for a given replicate index.
struct PipelineRun {
    Field vgs;
    Field vds;
    std::vector<double> vgs_hat;
    std::vector<double> vds_hat;
    std::vector<std::uint8_t> valid;
    std::vector<double> ids;       ///< transmitted currents
    std::vector<double> ids_hat;   ///< demodulated currents
    MseReport report;
};

PipelineRun run_pipeline(const ChannelExperiment& exp, double delta, const ChannelConfig& channel,
                         std::size_t replicate);

/// Mean MseReport over exp.replicates realisations.
MseReport run_channel_point(const ChannelExperiment& exp, double delta, double bandwidth_hz, double snr_db);

struct SweepResult {
    std::string axis;
    std::vector<double> values;
    std::vector<MseReport> reports;
    std::size_t argmin = 0;  ///< index of the smallest mse_sum

    double best() const { return values.at(argmin); }
};

SweepResult sweep_delta(const ChannelExperiment& exp, std::span<const double> deltas);

/// One SweepResult (axis "snr_db") per bandwidth.
std::vector<SweepResult> sweep_snr(const ChannelExperiment& exp, std::span<const double> snrs,
                                   std::span<const double> bandwidths, double delta);

} // namespace ajscc
