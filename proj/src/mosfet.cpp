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

#include "ajscc/mosfet.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ajscc {

namespace {

double overdrive_gain(const MosfetParams& p, double vgs)
{
    const double ov = vgs - p.v_th;
    return 0.5 * p.k_gain * ov * ov;
}

} // namespace

void MosfetParams::validate() const
{
    if (!(k_gain > 0.0) || !std::isfinite(k_gain))
        throw std::invalid_argument("k_gain must be positive, got " + std::to_string(k_gain));
    if (!(v_th >= 0.0) || !std::isfinite(v_th))
        throw std::invalid_argument("v_th must be non-negative, got " + std::to_string(v_th));
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("lambda must be non-negative, got " + std::to_string(lambda));
}

double drain_current(const MosfetParams& p, double vgs, double vds)
{
    if (vgs < p.v_th)
        throw std::domain_error("drain_current: vgs below threshold (device off)");
    if (vds < 0.0)
        throw std::domain_error("drain_current: negative vds");
    return overdrive_gain(p, vgs) * (1.0 + p.lambda * vds);
}

double invert_vds(const MosfetParams& p, double vgs, double ids)
{
    if (!(vgs > p.v_th))
        throw std::domain_error("invert_vds: vgs must exceed v_th");
    if (!(ids > 0.0))
        throw std::domain_error("invert_vds: ids must be positive");
    if (p.lambda == 0.0)
        throw std::domain_error("invert_vds: undefined for lambda == 0");
    return (ids / overdrive_gain(p, vgs) - 1.0) / p.lambda;
}

double curve_slope(const MosfetParams& p, double vgs)
{
    if (vgs < p.v_th)
        throw std::domain_error("curve_slope: vgs below threshold");
    return p.lambda * overdrive_gain(p, vgs);
}

bool in_saturation(const MosfetParams& p, double vgs, double vds)
{
    return vds >= vgs - p.v_th;
}

} // namespace ajscc
