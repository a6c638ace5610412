/*
 Copyright 2026 The sofpg Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "sofpg/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "sofpg/error.hpp"
#include "sofpg/parallel.hpp"

namespace sofpg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string cell(double v) { return std::isnan(v) ? std::string() : format_number(v); }

double parse_cell(const std::string& s) {
    if (s.empty() || s == "nan") return kNaN;
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw DomainError("malformed trace cell '" + s + "'");
    }
    return v;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing", path.string());
    out << text;
    out.close();
    if (!out) throw IoError("failed writing '" + path.string() + "'", path.string());
}

struct Stats {
    double mean = kNaN, min = kNaN, max = kNaN;
};

Stats stats_of(const std::vector<double>& values) {
    Stats s;
    if (values.empty()) return s;
    double sum = 0.0;
    s.min = values.front();
    s.max = values.front();
    for (double v : values) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(values.size());
    // The rounded mean of equal values can land one ulp outside [min, max].
    s.mean = std::clamp(s.mean, s.min, s.max);
    return s;
}

}  // namespace

StabilizationResult run_single(const ExperimentConfig& cfg, std::uint64_t seed, int threads) {
    const Simulator sim = cfg.make_simulator();
    StabilizerConfig s = cfg.stabilizer;
    s.seed = seed;
    s.inner.threads = threads;
    s.cost.threads = threads;
    if (cfg.oracle_logging) {
        const TraceMonitor monitor = make_oracle_monitor(cfg.plant, cfg.cost);
        return learn_sof(sim, s, cfg.cost.l0, &monitor);
    }
    return learn_sof(sim, s, cfg.cost.l0);
}

std::string trace_csv(const RunTrace& trace) {
    std::string out = kTraceCsvHeader;
    out += '\n';
    for (const TraceRecord& r : trace.records) {
        out += std::to_string(r.outer_k);
        out += ',' + std::to_string(r.inner_j);
        out += ',' + cell(r.gamma);
        out += ',' + cell(r.grad_norm_est);
        out += ',' + cell(r.cost_est);
        out += ',' + std::to_string(r.traj_cum);
        out += ',' + cell(r.true_cost);
        out += ',' + cell(r.true_rho);
        out += '\n';
    }
    return out;
}

RunTrace parse_trace_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kTraceCsvHeader) {
        throw DomainError("trace CSV header mismatch");
    }
    RunTrace trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (;;) {
            const std::size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (cells.size() != 8) throw DomainError("trace CSV row must have 8 cells");
        TraceRecord r;
        r.outer_k = static_cast<std::size_t>(std::stoull(cells[0]));
        r.inner_j = static_cast<std::size_t>(std::stoull(cells[1]));
        r.gamma = parse_cell(cells[2]);
        r.grad_norm_est = parse_cell(cells[3]);
        r.cost_est = parse_cell(cells[4]);
        r.traj_cum = std::stoull(cells[5]);
        r.true_cost = parse_cell(cells[6]);
        r.true_rho = parse_cell(cells[7]);
        trace.records.push_back(r);
    }
    return trace;
}

AggregateReport aggregate(const std::vector<RunTrace>& traces, std::vector<RunSummary> runs) {
    AggregateReport report;
    std::map<std::size_t, std::pair<std::vector<double>, std::vector<double>>> by_k;
    for (const RunTrace& trace : traces) {
        std::map<std::size_t, const TraceRecord*> closing;
        for (const TraceRecord& r : trace.records) closing[r.outer_k] = &r;
        for (const auto& [k, rec] : closing) {
            auto& [gammas, rhos] = by_k[k];
            gammas.push_back(rec->gamma);
            if (!std::isnan(rec->true_rho)) rhos.push_back(rec->true_rho);
        }
    }
    for (const auto& [k, values] : by_k) {
        AggregateRow row;
        row.outer_k = k;
        row.runs_present = values.first.size();
        const Stats g = stats_of(values.first);
        const Stats r = stats_of(values.second);
        row.gamma_mean = g.mean;
        row.gamma_min = g.min;
        row.gamma_max = g.max;
        row.rho_mean = r.mean;
        row.rho_min = r.min;
        row.rho_max = r.max;
        report.rows.push_back(row);
    }

    double traj_sum = 0.0;
    for (const RunSummary& s : runs) {
        if (s.status == RunStatus::Stabilized) {
            ++report.successes;
            if (s.final_rho < 1.0) ++report.verified_stable;
        }
        traj_sum += static_cast<double>(s.total_trajectories);
    }
    report.mean_total_trajectories = runs.empty() ? 0.0 : traj_sum / static_cast<double>(runs.size());
    report.runs = std::move(runs);
    return report;
}

std::string aggregate_csv(const AggregateReport& report) {
    std::string out = kAggregateCsvHeader;
    out += '\n';
    for (const AggregateRow& r : report.rows) {
        out += std::to_string(r.outer_k) + ',' + std::to_string(r.runs_present);
        for (double v : {r.gamma_mean, r.gamma_min, r.gamma_max, r.rho_mean, r.rho_min, r.rho_max}) {
            out += ',' + cell(v);
        }
        out += '\n';
    }
    return out;
}

std::string summary_csv(const AggregateReport& report) {
    std::string out = kSummaryCsvHeader;
    out += '\n';
    for (const RunSummary& s : report.runs) {
        out += std::to_string(s.run) + ',' + std::to_string(s.seed) + ',' +
               std::string(to_string(s.status)) + ',' + std::to_string(s.outer_iterations) + ',' +
               cell(s.gamma_final) + ',' + std::to_string(s.total_trajectories) + ',' +
               cell(s.final_rho) + '\n';
    }
    return out;
}

AggregateReport run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& opts) {
    if (opts.runs < 1) throw DomainError("runs must be at least 1");

    std::filesystem::path dir;
    if (!opts.out_dir.empty()) {
        dir = opts.out_dir;
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) throw IoError("cannot create output directory '" + opts.out_dir + "'", opts.out_dir);
    }

    const int threads = std::max(opts.threads, 1);
    const bool across_runs = opts.runs > 1 && threads > 1;
    const int inner_threads = across_runs ? 1 : threads;

    std::vector<RunTrace> traces(opts.runs);
    std::vector<RunSummary> summaries(opts.runs);
    parallel_for(opts.runs, across_runs ? threads : 1, [&](std::size_t i) {
        const std::uint64_t seed = opts.base_seed + i;
        StabilizationResult res = run_single(cfg, seed, inner_threads);
        RunSummary& s = summaries[i];
        s.run = i;
        s.seed = seed;
        s.status = res.status;
        s.outer_iterations = res.outer_iterations;
        s.gamma_final = res.gamma_final;
        s.total_trajectories = res.total_trajectories;
        s.final_rho = cfg.oracle_logging ? spectral_radius(cfg.plant.closed_loop(res.gain)) : kNaN;
        traces[i] = std::move(res.trace);
    });

    AggregateReport report = aggregate(traces, std::move(summaries));
    if (!dir.empty()) {
        for (std::size_t i = 0; i < traces.size(); ++i) {
            write_file(dir / ("run_" + std::to_string(i) + ".csv"), trace_csv(traces[i]));
        }
        write_file(dir / "aggregate.csv", aggregate_csv(report));
        write_file(dir / "summary.csv", summary_csv(report));
    }
    return report;
}

}  // namespace sofpg
