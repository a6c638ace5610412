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

#ifndef SOFPG_EXPERIMENT_HPP
#define SOFPG_EXPERIMENT_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "sofpg/config.hpp"
#include "sofpg/stabilizer.hpp"

namespace sofpg {

/// Exact header of every trace CSV.
inline constexpr const char* kTraceCsvHeader =
    "outer_k,inner_j,gamma,grad_norm_est,cost_est,traj_cum,true_cost,true_rho";

inline constexpr const char* kAggregateCsvHeader =
    "outer_k,runs_present,gamma_mean,gamma_min,gamma_max,rho_mean,rho_min,rho_max";

inline constexpr const char* kSummaryCsvHeader =
    "run,seed,status,outer_iterations,gamma_final,total_trajectories,final_rho";

/// One learn_sof run of `cfg` with the given seed. Oracle columns are filled
/// when cfg.oracle_logging is set.
StabilizationResult run_single(const ExperimentConfig& cfg, std::uint64_t seed, int threads);

/// Trace as CSV; NaN cells are left empty.
std::string trace_csv(const RunTrace& trace);
RunTrace parse_trace_csv(const std::string& text);

struct RunSummary {
    std::size_t run = 0;
    std::uint64_t seed = 0;
    RunStatus status = RunStatus::MaxIterations;
    std::size_t outer_iterations = 0;
    double gamma_final = 0.0;
    std::uint64_t total_trajectories = 0;
    double final_rho = 0.0;  // NaN without oracle logging
};

struct AggregateRow {
    std::size_t outer_k = 0;
    std::size_t runs_present = 0;
    double gamma_mean = 0.0, gamma_min = 0.0, gamma_max = 0.0;
    double rho_mean = 0.0, rho_min = 0.0, rho_max = 0.0;  // NaN without oracle logging
};

struct AggregateReport {
    std::vector<AggregateRow> rows;
    std::vector<RunSummary> runs;
    std::size_t successes = 0;        // status stabilized
    std::size_t verified_stable = 0;  // stabilized and oracle rho < 1
    double mean_total_trajectories = 0.0;
};

/// Statistics per outer iteration over the runs that reached it. Each run
/// contributes the last record of every outer index (the row carrying the
/// cost estimate, or the terminal row).
AggregateReport aggregate(const std::vector<RunTrace>& traces, std::vector<RunSummary> runs);

std::string aggregate_csv(const AggregateReport& report);
std::string summary_csv(const AggregateReport& report);

struct ExperimentOptions {
    std::size_t runs = 1;
    std::uint64_t base_seed = 0;  // run i uses base_seed + i
    int threads = 1;
    std::string out_dir;          // empty: write nothing
};

/// Runs independent seeded learn_sof calls. With an output directory it writes
/// run_<i>.csv per run plus aggregate.csv and summary.csv. Runs are executed
/// in parallel when threads > 1; outputs do not depend on the thread count.
AggregateReport run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& opts);

}  // namespace sofpg

#endif  // SOFPG_EXPERIMENT_HPP
