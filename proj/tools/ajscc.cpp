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

// Command-line front end: one subcommand per experiment.

#include "ajscc/config.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/os.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace ajscc;

namespace {

// Collects output files under temporary names and renames them only once the
// whole command succeeded; anything left over is deleted.
class OutputSet {
public:
    explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
    OutputSet(const OutputSet&) = delete;
    OutputSet& operator=(const OutputSet&) = delete;
    ~OutputSet()
    {
        std::error_code ec;
        for (const auto& [tmp, _] : files_)
            fs::remove(tmp, ec);
    }

    fs::path add(const std::string& name)
    {
        fs::create_directories(dir_);
        const auto final_path = dir_ / name;
        auto tmp = final_path;
        tmp += ".partial";
        files_.emplace_back(tmp, final_path);
        return tmp;
    }

    void commit()
    {
        for (const auto& [tmp, final_path] : files_)
            fs::rename(tmp, final_path);
        files_.clear();
    }

private:
    fs::path dir_;
    std::vector<std::pair<fs::path, fs::path>> files_;
};

std::string num(double v) { return fmt::format("{:.10g}", v); }

void write_lines(const fs::path& path, const std::string& meta, const std::string& header,
                 const std::vector<std::string>& rows)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << meta << '\n' << header << '\n';
    for (const auto& r : rows)
        out << r << '\n';
    if (!out)
        throw std::runtime_error("write failed: " + path.string());
}

int cmd_noiseless(const RunConfig& rc, OutputSet& out)
{
    const auto grid = rc.vds_grid();
    const auto res = run_noiseless(rc.device, rc.levels, grid, rc.vds_range, rc.correction);
    std::vector<std::string> rows;
    for (const auto& p : res.points)
        rows.push_back(fmt::format("{},{},{},{},{}", num(p.vgs_true), num(p.vds_true), num(p.vgs_hat),
                                   num(p.vds_hat), p.corrected ? 1 : 0));
    write_lines(out.add("noiseless.csv"), rc.metadata_line(), "vgs_true,vds_true,vgs_hat,vds_hat,corrected", rows);
    out.commit();
    fmt::print("accuracy_pre={} accuracy_post={} mse_pre={} mse_post={}\n", num(res.accuracy_pre),
               num(res.accuracy_post), num(res.mse_pre()), num(res.mse_post()));
    return 0;
}

int cmd_sweep_lambda(const RunConfig& rc, OutputSet& out)
{
    const auto grid = rc.vds_grid();
    const auto pts = sweep_lambda(rc.device, rc.lambda_grid, rc.levels, grid, rc.vds_range);
    std::vector<std::string> rows;
    double worst_pre = 0.0, worst_post = 0.0;
    for (const auto& p : pts) {
        rows.push_back(fmt::format("{},{},{},{},{}", num(p.lambda), num(p.mse_pre), num(p.mse_post),
                                   num(p.accuracy_pre), num(p.accuracy_post)));
        worst_pre = std::max(worst_pre, p.mse_pre);
        worst_post = std::max(worst_post, p.mse_post);
    }
    write_lines(out.add("sweep_lambda.csv"), rc.metadata_line(),
                "lambda,mse_pre,mse_post,accuracy_pre,accuracy_post", rows);
    out.commit();
    fmt::print("points={} max_mse_pre={} max_mse_post={}\n", pts.size(), num(worst_pre), num(worst_post));
    return 0;
}

double reported_sum(const RunConfig& rc, const MseReport& r)
{
    return rc.literal_sum ? r.mse_gs + r.mse_ds : r.mse_sum;
}

int cmd_sweep_delta(const RunConfig& rc, OutputSet& out)
{
    const auto deltas = rc.delta_points();
    const auto res = sweep_delta(rc.experiment, deltas);
    std::vector<std::string> rows;
    for (const auto& r : res.reports)
        rows.push_back(fmt::format("{},{},{},{}", num(r.delta), num(r.mse_gs), num(r.mse_ds), num(reported_sum(rc, r))));
    write_lines(out.add("sweep_delta.csv"), rc.metadata_line(), "delta,mse_gs,mse_ds,mse_sum", rows);
    out.commit();
    const auto& best = res.reports[res.argmin];
    fmt::print("delta_star={} mse_gs={} mse_ds={} mse_sum={}\n", num(res.best()), num(best.mse_gs),
               num(best.mse_ds), num(reported_sum(rc, best)));
    return 0;
}

int cmd_sweep_snr(const RunConfig& rc, OutputSet& out)
{
    const auto curves = sweep_snr(rc.experiment, rc.snr_grid, rc.bandwidth_grid, rc.snr_delta);
    std::vector<std::string> rows;
    for (const auto& c : curves)
        for (const auto& r : c.reports)
            rows.push_back(fmt::format("{},{},{}", num(r.snr_db), num(r.bandwidth_hz), num(reported_sum(rc, r))));
    write_lines(out.add("sweep_snr.csv"), rc.metadata_line(), "snr_db,bandwidth_hz,mse_sum", rows);
    out.commit();
    std::string summary = fmt::format("delta={}", num(rc.snr_delta));
    for (const auto& c : curves) {
        const auto& r = c.reports.front();
        summary += fmt::format(" bw{}:min_mse_sum={}@{}dB", num(r.bandwidth_hz), num(reported_sum(rc, c.reports[c.argmin])),
                               num(c.best()));
    }
    fmt::print("{}\n", summary);
    return 0;
}

int cmd_gen_field(const RunConfig& rc, OutputSet& out)
{
    const auto& ex = rc.experiment;
    // Same seeds as replicate 0 of the channel experiments.
    auto gs_spec = ex.field;
    gs_spec.lo = ex.vgs_range.lo;
    gs_spec.hi = ex.vgs_range.hi;
    auto ds_spec = ex.field;
    ds_spec.lo = ex.vds_field_range.value_or(ex.vds_range).lo;
    ds_spec.hi = ex.vds_field_range.value_or(ex.vds_range).hi;
    const auto gs = generate_field(gs_spec, derive_seed(ex.seed, 0, 1));
    const auto ds = generate_field(ds_spec, derive_seed(ex.seed, 0, 2));
    write_field_csv(gs, out.add("field_vgs.csv"));
    write_field_csv(ds, out.add("field_vds.csv"));
    out.commit();
    fmt::print("cells={} blocks={}\n", gs_spec.size(), gs_spec.block_count());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Single-transistor analog joint source-channel coding simulator"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    std::string config_path;
    std::vector<std::string> assignments;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::optional<std::string> out_dir;
    app.add_option("-c,--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("-s,--set", assignments, "Override one key: --set snr_db=-30 (repeatable)");
    app.add_option("--seed", seed, "Base RNG seed (default 1)");
    app.add_option("-j,--workers", workers, "Worker threads (default: available processors)");
    app.add_option("-o,--out", out_dir, "Output directory for CSV files");

    auto* noiseless = app.add_subcommand("noiseless", "Decode every level/V_ds grid point without a channel");
    auto* lambda = app.add_subcommand("sweep-lambda", "Noiseless MSE against lambda, with and without correction");
    auto* delta = app.add_subcommand("sweep-delta", "Block MSE against level spacing over the noisy channel");
    auto* snr = app.add_subcommand("sweep-snr", "Block MSE against SNR for several bandwidths");
    auto* field = app.add_subcommand("gen-field", "Write the V_gs and V_ds sensor fields as CSV");
    auto* encode_cmd = app.add_subcommand("encode", "Print the drain current for one (V_gs, V_ds) sample");
    auto* decode_cmd = app.add_subcommand("decode", "Decode two consecutive drain currents");

    double vgs = 0.0, vds = 0.0, ids1 = 0.0, ids2 = 0.0;
    encode_cmd->add_option("--vgs", vgs, "Gate voltage, quantized to the `levels` key")->required();
    encode_cmd->add_option("--vds", vds, "Drain voltage")->required();
    decode_cmd->add_option("--ids1", ids1, "First current [A]")->required();
    decode_cmd->add_option("--ids2", ids2, "Second current [A]")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        ConfigValues values = default_config_values();
        if (!config_path.empty())
            merge_config_file(values, config_path);
        merge_environment(values, [](const char* name) { return std::getenv(name); });
        for (const auto& a : assignments)
            merge_assignment(values, a);
        if (seed)
            values["seed"] = std::to_string(*seed);
        if (workers)
            values["workers"] = std::to_string(*workers);
        if (out_dir)
            values["out_dir"] = *out_dir;
        const RunConfig rc = resolve_config(values);
        OutputSet out(rc.out_dir);

        if (*noiseless)
            return cmd_noiseless(rc, out);
        if (*lambda)
            return cmd_sweep_lambda(rc, out);
        if (*delta)
            return cmd_sweep_delta(rc, out);
        if (*snr)
            return cmd_sweep_snr(rc, out);
        if (*field)
            return cmd_gen_field(rc, out);
        const auto codec = rc.device_codec();
        if (*encode_cmd) {
            fmt::print("{:.5g}\n", encode(rc.device, codec, vgs, vds));
            return 0;
        }
        if (*decode_cmd) {
            const auto d = decode_pair(rc.device, codec, ids1, ids2, {rc.correction});
            fmt::print("vgs_hat={} vds_hat_1={} vds_hat_2={} corrected={} in_range={}\n", num(d.vgs_hat),
                       num(d.vds_hat_1), num(d.vds_hat_2), d.corrected, d.in_range);
            return 0;
        }
    } catch (const ConfigError& e) {
        fmt::print(stderr, "ajscc: invalid configuration: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "ajscc: {}\n", e.what());
        return 1;
    }
    return 1;
}
