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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <boost/random/mersenne_twister.hpp>

namespace ajscc {

enum class DopplerMode {
    Uniform,  ///< per-symbol shift drawn uniformly in [-fraction, +fraction] of the tone
    Fixed,    ///< constant +fraction shift
};

/// FM link parameters. The tone for current I sits at fm_scale * I inside
/// [0, bandwidth); the receiver samples at sample_rate and takes one FFT of
/// samples_per_symbol points per symbol.
struct ChannelConfig {
    double bandwidth_hz = 410e3;
    double snr_db = -20.0;                 ///< in-band SNR; +inf disables noise
    double doppler_fraction = 0.02;
    DopplerMode doppler_mode = DopplerMode::Uniform;
    double rician_k_db = 6.0;              ///< line-of-sight to diffuse power; +inf is pure LOS
    double fm_scale = 0.0;                 ///< Hz per ampere
    double sample_rate_hz = 2 * 410e3;
    std::size_t samples_per_symbol = 2048; ///< also the FFT length
    std::uint64_t seed = 1;

    // Channel correlation scales; carried as metadata, no model uses them.
    std::optional<double> s_c;
    std::optional<double> t_c;

    double symbol_duration() const { return static_cast<double>(samples_per_symbol) / sample_rate_hz; }
    double bin_width() const { return sample_rate_hz / static_cast<double>(samples_per_symbol); }

    /// Throws std::invalid_argument naming the offending field. When
    /// `max_current` is given, also checks that the Doppler-shifted top tone
    /// stays inside the band and below Nyquist.
    void validate(std::optional<double> max_current = std::nullopt) const;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// fm_scale that puts `max_current` at `fill` of the bandwidth.
double auto_fm_scale(double bandwidth_hz, double max_current, double fill = 0.8);

/// Tone frequency [Hz] for a drain current. Throws std::domain_error for
/// ids <= 0 and std::range_error if the tone would leave the band.
double modulate(double ids, const ChannelConfig& cfg);

/// Deterministic 64-bit mix of a seed and stream ids (splitmix64 rounds).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

/// 64-bit Mersenne Twister; same sequence as std::mt19937_64 but much
/// cheaper to draw from.
using SymbolRng = boost::random::mt19937_64;

/// Independent generator for symbol `index` of a run seeded with `seed`.
SymbolRng symbol_rng(std::uint64_t seed, std::uint64_t index);

/// One received symbol: a unit-amplitude complex tone at freq * (1 + doppler),
/// scaled by a Rician gain with unit mean power, plus complex white Gaussian
/// noise whose density puts the in-band SNR at cfg.snr_db.
std::vector<std::complex<double>> transmit(double freq, const ChannelConfig& cfg, SymbolRng& rng);

/// Per-sample complex noise variance used by transmit (0 for snr_db = +inf).
double noise_variance(const ChannelConfig& cfg);

/// Rectangular-window FFT of the block; returns the frequency of the
/// strongest bin in [bin_width, bandwidth] divided by fm_scale. The block
/// length must equal samples_per_symbol.
double demodulate(std::span<const std::complex<double>> samples, const ChannelConfig& cfg);

/// transmit + demodulate for symbol `index` under cfg.seed.
double pass_through(double ids, const ChannelConfig& cfg, std::uint64_t index);

/// |X[k]|^2 for k = 0..N-1 (unnormalised forward DFT).
std::vector<double> power_spectrum(std::span<const std::complex<double>> samples);

} // namespace ajscc
