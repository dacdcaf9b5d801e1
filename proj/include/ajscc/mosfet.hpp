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

namespace ajscc {

/// Square-law n-channel MOSFET in saturation with channel-length modulation:
///
///   I_ds = 1/2 * k_gain * (V_gs - V_th)^2 * (1 + lambda * V_ds)
///
/// The default instance is a 0.18 um process device.
struct MosfetParams {
    double k_gain = 155e-6;  ///< W * mu * C_ox / L [A/V^2]
    double v_th   = 0.74;    ///< threshold voltage [V]
    double lambda = 0.037;   ///< channel-length modulation [1/V]

    /// Throws std::invalid_argument unless k_gain > 0, v_th >= 0, lambda >= 0.
    void validate() const;
};

/// Drain current [A]. Throws std::domain_error when vgs < v_th or vds < 0.
double drain_current(const MosfetParams& p, double vgs, double vds);

/// Solves drain_current(p, vgs, vds) == ids for vds. The result is not
/// range-limited and may be negative. Throws std::domain_error when
/// vgs <= v_th, ids <= 0 or lambda == 0.
double invert_vds(const MosfetParams& p, double vgs, double ids);

/// dI_ds/dV_ds [A/V]; constant along a curve.
double curve_slope(const MosfetParams& p, double vgs);

/// True when vds >= vgs - v_th. The model is evaluated regardless; this is a
/// diagnostic only.
bool in_saturation(const MosfetParams& p, double vgs, double vds);

} // namespace ajscc
