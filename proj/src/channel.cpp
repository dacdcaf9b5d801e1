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

#include "ajscc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/random/normal_distribution.hpp>
#include <fftw3.h>

namespace ajscc {

namespace {

// Plan creation is not thread-safe in FFTW; execution with new arrays is.
// FFTW_ESTIMATE keeps the chosen algorithm, and so the results, identical
// from run to run.
fftw_plan forward_plan(std::size_t n)
{
    static std::mutex mutex;
    static std::map<std::size_t, fftw_plan> plans;
    std::lock_guard lock(mutex);
    auto it = plans.find(n);
    if (it != plans.end())
        return it->second;
    std::vector<std::complex<double>> in(n), out(n);
    auto plan = fftw_plan_dft_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(in.data()),
                                 reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
                                 FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (plan == nullptr)
        throw std::runtime_error("FFTW plan creation failed");
    plans.emplace(n, plan);
    return plan;
}

void forward_fft(std::span<const std::complex<double>> in, std::vector<std::complex<double>>& out)
{
    thread_local std::vector<std::complex<double>> scratch;
    scratch.assign(in.begin(), in.end());
    out.resize(in.size());
    fftw_execute_dft(forward_plan(in.size()), reinterpret_cast<fftw_complex*>(scratch.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace

void ChannelConfig::validate(std::optional<double> max_current) const
{
    auto fail = [](const std::string& key, const std::string& why) {
        throw std::invalid_argument(key + ": " + why);
    };
    if (!(bandwidth_hz > 0.0) || !std::isfinite(bandwidth_hz))
        fail("bandwidth_hz", "must be positive");
    if (std::isnan(snr_db) || snr_db == -kInf)
        fail("snr_db", "must be a number or +inf");
    if (!(doppler_fraction >= 0.0) || !(doppler_fraction < 1.0))
        fail("doppler_fraction", "must lie in [0, 1)");
    if (std::isnan(rician_k_db))
        fail("rician_k_db", "must be a number or +inf");
    if (!(fm_scale > 0.0) || !std::isfinite(fm_scale))
        fail("fm_scale", "must be positive");
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
        fail("sample_rate_hz", "must be positive");
    if (samples_per_symbol < 2)
        fail("samples_per_symbol", "must be at least 2");
    if (sample_rate_hz < bandwidth_hz)
        fail("sample_rate_hz", "must be at least the bandwidth");
    if (max_current) {
        const double top = fm_scale * *max_current * (1.0 + doppler_fraction);
        if (top > bandwidth_hz)
            fail("fm_scale", "Doppler-shifted top tone exceeds the bandwidth");
        if (sample_rate_hz < 2.0 * top)
            fail("sample_rate_hz", "below Nyquist for the top tone");
    }
}

double auto_fm_scale(double bandwidth_hz, double max_current, double fill)
{
    if (!(max_current > 0.0))
        throw std::invalid_argument("auto_fm_scale: max_current must be positive");
    return fill * bandwidth_hz / max_current;
}

double modulate(double ids, const ChannelConfig& cfg)
{
    if (!(ids > 0.0))
        throw std::domain_error("modulate: current must be positive");
    const double f = cfg.fm_scale * ids;
    if (f > cfg.bandwidth_hz)
        throw std::range_error("modulate: tone " + std::to_string(f) + " Hz exceeds bandwidth");
    return f;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    auto mix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    };
    return mix(mix(mix(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

SymbolRng symbol_rng(std::uint64_t seed, std::uint64_t index)
{
    return SymbolRng(derive_seed(seed, index));
}

double noise_variance(const ChannelConfig& cfg)
{
    if (cfg.snr_db == kInf)
        return 0.0;
    // Unit mean signal power; white over sample_rate, so the in-band share
    // is bandwidth / sample_rate of the total.
    return cfg.sample_rate_hz / cfg.bandwidth_hz / db_to_linear(cfg.snr_db);
}

std::vector<std::complex<double>> transmit(double freq, const ChannelConfig& cfg, SymbolRng& rng)
{
    const std::size_t n = cfg.samples_per_symbol;
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    boost::random::normal_distribution<double> gauss(0.0, 1.0);

    const double d = cfg.doppler_mode == DopplerMode::Fixed ? 1.0 : unit(rng);
    const double shifted = freq * (1.0 + cfg.doppler_fraction * d);

    std::complex<double> gain{1.0, 0.0};
    if (cfg.rician_k_db != kInf) {
        const double k = db_to_linear(cfg.rician_k_db);
        const double los = std::sqrt(k / (k + 1.0));
        const double nlos = std::sqrt(0.5 / (k + 1.0));
        const double re = gauss(rng);
        const double im = gauss(rng);
        gain = {los + nlos * re, nlos * im};
    }

    std::vector<std::complex<double>> out(n);
    const double w = 2.0 * std::numbers::pi * shifted / cfg.sample_rate_hz;
    // Phasor recurrence, re-anchored every 256 samples to bound drift.
    constexpr std::size_t anchor = 256;
    const std::complex<double> step = std::polar(1.0, w);
    // Products are spelled out: std::complex multiplication goes through the
    // NaN-recovering library routine, which dominates this loop otherwise.
    const double sr = step.real(), si = step.imag();
    double pr = 1.0, pi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (i % anchor == 0) {
            pr = std::cos(w * static_cast<double>(i));
            pi = std::sin(w * static_cast<double>(i));
        }
        out[i] = {gain.real() * pr - gain.imag() * pi, gain.real() * pi + gain.imag() * pr};
        const double t = pr * sr - pi * si;
        pi = pr * si + pi * sr;
        pr = t;
    }

    const double var = noise_variance(cfg);
    if (var > 0.0) {
        const double sigma = std::sqrt(0.5 * var);
        for (auto& s : out) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            s += std::complex<double>(sigma * re, sigma * im);
        }
    }
    return out;
}

std::vector<double> power_spectrum(std::span<const std::complex<double>> samples)
{
    std::vector<std::complex<double>> spec;
    forward_fft(samples, spec);
    std::vector<double> p(spec.size());
    std::transform(spec.begin(), spec.end(), p.begin(), [](auto c) { return std::norm(c); });
    return p;
}

double demodulate(std::span<const std::complex<double>> samples, const ChannelConfig& cfg)
{
    if (samples.size() != cfg.samples_per_symbol)
        throw std::invalid_argument("demodulate: block length differs from samples_per_symbol");

    thread_local std::vector<std::complex<double>> spec;
    forward_fft(samples, spec);

    const double df = cfg.bin_width();
    const auto n = samples.size();
    auto last = static_cast<std::size_t>(std::floor(cfg.bandwidth_hz / df + 1e-9));
    last = std::clamp<std::size_t>(last, 1, n / 2);

    std::size_t best = 1;
    double best_power = std::norm(spec[1]);
    for (std::size_t k = 2; k <= last; ++k) {
        const double pw = std::norm(spec[k]);
        if (pw > best_power) {
            best_power = pw;
            best = k;
        }
    }
    return static_cast<double>(best) * df / cfg.fm_scale;
}

double pass_through(double ids, const ChannelConfig& cfg, std::uint64_t index)
{
    auto rng = symbol_rng(cfg.seed, index);
    const auto block = transmit(modulate(ids, cfg), cfg, rng);
    return demodulate(block, cfg);
}

} // namespace ajscc
