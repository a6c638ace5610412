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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sofpg/sofpg.h"

namespace {

constexpr const char* kSmall = R"([plant]
A = [[0.5, 0.1], [0, 0.8]]
B = [[1], [0.5]]
C = [[1, 0], [0, 1]]

[cost]
Q = [[1, 0], [0, 1]]
R = 1

[stabilizer]
gamma0 = 0.2
eta = 0.01
tau_e = 40
n_e = 10
r = 0.01
tau = 40
n = 8
)";

struct ConfigHandle {
    sofpg_config* ptr = nullptr;
    ~ConfigHandle() { sofpg_config_free(ptr); }
};

TEST(CApi, VersionAndStatusNames) {
    EXPECT_STREQ(sofpg_version(), "1.0.0");
    EXPECT_STREQ(sofpg_status_name(SOFPG_OK), "ok");
    EXPECT_STREQ(sofpg_status_name(SOFPG_ERR_DIVERGENCE), "divergence error");
}

TEST(CApi, NullArgumentsAreRejected) {
    EXPECT_EQ(sofpg_config_parse(nullptr, nullptr), SOFPG_ERR_INVALID_ARGUMENT);
    EXPECT_NE(std::string(sofpg_last_error()), "");
    sofpg_config_free(nullptr);
    sofpg_result_free(nullptr);
    sofpg_report_free(nullptr);
}

TEST(CApi, ConfigParseErrorsMapToStatus) {
    sofpg_config* cfg = nullptr;
    EXPECT_EQ(sofpg_config_parse("[plant]\nA = 1\n", &cfg), SOFPG_ERR_DOMAIN);
    EXPECT_EQ(cfg, nullptr);
    EXPECT_EQ(sofpg_config_load("/nonexistent/cfg.ini", &cfg), SOFPG_ERR_IO);
    EXPECT_NE(std::string(sofpg_last_error()).find("/nonexistent/cfg.ini"), std::string::npos);
    EXPECT_EQ(sofpg_config_preset("unknown", &cfg), SOFPG_ERR_DOMAIN);
}

TEST(CApi, ConfigAccessorsAndSet) {
    ConfigHandle cfg;
    ASSERT_EQ(sofpg_config_parse(kSmall, &cfg.ptr), SOFPG_OK);
    size_t n = 0, m = 0, p = 0;
    ASSERT_EQ(sofpg_config_dims(cfg.ptr, &n, &m, &p), SOFPG_OK);
    EXPECT_EQ(n, 2u);
    EXPECT_EQ(m, 1u);
    EXPECT_EQ(p, 2u);

    EXPECT_EQ(sofpg_config_set(cfg.ptr, "stabilizer.gamma0", "2"), SOFPG_ERR_DOMAIN);
    EXPECT_EQ(sofpg_config_set(cfg.ptr, "experiment.runs", "4"), SOFPG_OK);
    size_t runs = 0;
    sofpg_config_runs(cfg.ptr, &runs);
    EXPECT_EQ(runs, 4u);

    size_t needed = 0;
    ASSERT_EQ(sofpg_config_to_string(cfg.ptr, nullptr, 0, &needed), SOFPG_OK);
    std::string text(needed, '\0');
    ASSERT_EQ(sofpg_config_to_string(cfg.ptr, text.data(), needed + 1, &needed), SOFPG_OK);
    ConfigHandle again;
    ASSERT_EQ(sofpg_config_parse(text.c_str(), &again.ptr), SOFPG_OK);
    sofpg_config_runs(again.ptr, &runs);
    EXPECT_EQ(runs, 4u);
}

TEST(CApi, OracleOnNumericalExample) {
    ConfigHandle cfg;
    ASSERT_EQ(sofpg_config_preset("numerical-example", &cfg.ptr), SOFPG_OK);
    const double zero[2] = {0.0, 0.0};
    sofpg_oracle_report rep{};
    double grad[2];
    ASSERT_EQ(sofpg_oracle_evaluate(cfg.ptr, 0.01, zero, &rep, grad), SOFPG_OK);
    EXPECT_NEAR(rep.rho, 6.406342820417326, 1e-10);
    EXPECT_NEAR(rep.damped_rho, 0.6406342820417326, 1e-11);
    EXPECT_NEAR(rep.grad_norm, std::hypot(grad[0], grad[1]), 1e-12);
    EXPECT_LT(rep.damped_rho, rep.margin_bound + 1e-12);

    EXPECT_EQ(sofpg_oracle_evaluate(cfg.ptr, 0.5, zero, &rep, nullptr), SOFPG_ERR_INSTABILITY);
    EXPECT_NEAR(rep.damped_rho, std::sqrt(0.5) * 6.406342820417326, 1e-9);
}

TEST(CApi, EstimatesAgreeWithOracle) {
    ConfigHandle cfg;
    ASSERT_EQ(sofpg_config_parse(kSmall, &cfg.ptr), SOFPG_OK);
    ASSERT_EQ(sofpg_config_set(cfg.ptr, "stabilizer.n", "20000"), SOFPG_OK);
    ASSERT_EQ(sofpg_config_set(cfg.ptr, "stabilizer.tau", "200"), SOFPG_OK);
    const double gain[2] = {0.1, 0.2};
    sofpg_oracle_report rep{};
    ASSERT_EQ(sofpg_oracle_evaluate(cfg.ptr, 1.0, gain, &rep, nullptr), SOFPG_OK);
    double cost = 0.0;
    ASSERT_EQ(sofpg_estimate_cost(cfg.ptr, 1.0, gain, 3, 1, &cost), SOFPG_OK);
    EXPECT_NEAR(cost, rep.cost, 0.05 * rep.cost);

    double grad[2];
    double norm = 0.0;
    uint64_t traj = 0;
    ASSERT_EQ(sofpg_estimate_gradient(cfg.ptr, 1.0, gain, 1, 2, grad, &norm, &traj), SOFPG_OK);
    EXPECT_EQ(traj, 20u);
    EXPECT_NEAR(norm, std::hypot(grad[0], grad[1]), 1e-12);
}

TEST(CApi, DivergenceStatus) {
    ConfigHandle cfg;
    ASSERT_EQ(sofpg_config_preset("numerical-example", &cfg.ptr), SOFPG_OK);
    const double zero[2] = {0.0, 0.0};
    double cost = 0.0;
    EXPECT_EQ(sofpg_estimate_cost(cfg.ptr, 1.0, zero, 0, 1, &cost), SOFPG_ERR_DIVERGENCE);
    EXPECT_NE(std::string(sofpg_last_error()).find("diverged"), std::string::npos);
}

TEST(CApi, ScheduleMatchesFrozenValues) {
    ConfigHandle cfg;
    ASSERT_EQ(sofpg_config_parse(R"([plant]
A = 0.5
B = 1
C = 1
[cost]
Q = 1
R = 1
d = 1
)", &cfg.ptr),
              SOFPG_OK);
    sofpg_schedule_inputs in{};
    ASSERT_EQ(sofpg_schedule_defaults(cfg.ptr, 4.0, &in), SOFPG_OK);
    in.eps = 1.0;
    in.delta0 = 0.01;
    in.delta1 = 0.1;
    in.zeta = 0.5;
    in.gamma0 = 0.1;
    in.j_bar = 4.0;
    sofpg_schedule_report out{};
    ASSERT_EQ(sofpg_schedule_compute(cfg.ptr, &in, &out), SOFPG_OK);
    EXPECT_NEAR(out.r, 1.0433360042735042735e-6, 1e-18);
    EXPECT_EQ(out.tau_e, 162.0);
    EXPECT_EQ(out.n_e, 159013339605.0);
    EXPECT_EQ(out.tau, 12.0);
    EXPECT_EQ(out.n, 24.0);
    EXPECT_EQ(out.m_iters, 7667712.0);
    EXPECT_EQ(out.k_prime, 52.0);

    sofpg_theory_constants tc{};
    ASSERT_EQ(sofpg_theory_constants_compute(cfg.ptr, 4.0, &tc), SOFPG_OK);
    EXPECT_DOUBLE_EQ(tc.kappa, 2.0);
    EXPECT_DOUBLE_EQ(tc.g, 8192.0);
    EXPECT_EQ(sofpg_theory_constants_compute(cfg.ptr, 0.5, &tc), SOFPG_ERR_DOMAIN);
}

TEST(CApi, LearnAndExperiment) {
    ConfigHandle cfg;
    ASSERT_EQ(sofpg_config_parse(kSmall, &cfg.ptr), SOFPG_OK);
    sofpg_result* res = nullptr;
    ASSERT_EQ(sofpg_learn(cfg.ptr, 7, 1, &res), SOFPG_OK);
    sofpg_run_summary sum{};
    ASSERT_EQ(sofpg_result_summary(res, &sum), SOFPG_OK);
    EXPECT_EQ(sum.status, SOFPG_RUN_STABILIZED);
    EXPECT_EQ(sum.seed, 7u);
    EXPECT_LT(sum.final_rho, 1.0);
    double gain[2];
    EXPECT_EQ(sofpg_result_gain(res, gain, 1), SOFPG_ERR_INVALID_ARGUMENT);
    EXPECT_EQ(sofpg_result_gain(res, gain, 2), SOFPG_OK);
    size_t needed = 0;
    ASSERT_EQ(sofpg_result_trace_csv(res, nullptr, 0, &needed), SOFPG_OK);
    std::string csv(needed, '\0');
    char tiny[8];
    EXPECT_EQ(sofpg_result_trace_csv(res, tiny, sizeof tiny, &needed), SOFPG_OK);
    EXPECT_EQ(std::string(tiny), "outer_k");
    ASSERT_EQ(sofpg_result_trace_csv(res, csv.data(), needed + 1, &needed), SOFPG_OK);
    EXPECT_EQ(csv.rfind("outer_k,inner_j,gamma,", 0), 0u);
    sofpg_result_free(res);

    const auto dir = std::filesystem::temp_directory_path() / "sofpg_capi_experiment";
    std::filesystem::remove_all(dir);
    sofpg_report* report = nullptr;
    ASSERT_EQ(sofpg_experiment_run(cfg.ptr, 2, 100, 1, dir.c_str(), &report), SOFPG_OK);
    size_t runs = 0, successes = 0, verified = 0;
    double mean_traj = 0.0;
    ASSERT_EQ(sofpg_report_counts(report, &runs, &successes, &verified, &mean_traj), SOFPG_OK);
    EXPECT_EQ(runs, 2u);
    EXPECT_EQ(successes, 2u);
    EXPECT_EQ(verified, 2u);
    EXPECT_GT(mean_traj, 0.0);
    ASSERT_EQ(sofpg_report_run(report, 1, &sum), SOFPG_OK);
    EXPECT_EQ(sum.seed, 101u);
    EXPECT_EQ(sofpg_report_run(report, 2, &sum), SOFPG_ERR_INVALID_ARGUMENT);
    sofpg_report_free(report);
    EXPECT_TRUE(std::filesystem::exists(dir / "run_1.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "summary.csv"));
    std::filesystem::remove_all(dir);
}

TEST(CApi, GainLoad) {
    ConfigHandle cfg;
    ASSERT_EQ(sofpg_config_parse(kSmall, &cfg.ptr), SOFPG_OK);
    const auto path = std::filesystem::temp_directory_path() / "sofpg_capi_gain.json";
    std::ofstream(path) << "[[0.25, -1.5]]\n";
    double gain[2] = {};
    ASSERT_EQ(sofpg_gain_load(cfg.ptr, path.c_str(), gain, 2), SOFPG_OK);
    EXPECT_EQ(gain[0], 0.25);
    EXPECT_EQ(gain[1], -1.5);
    std::ofstream(path) << "[[1], [2]]\n";
    EXPECT_EQ(sofpg_gain_load(cfg.ptr, path.c_str(), gain, 2), SOFPG_ERR_DIMENSION);
    std::filesystem::remove(path);
    EXPECT_EQ(sofpg_gain_load(cfg.ptr, path.c_str(), gain, 2), SOFPG_ERR_IO);
}

}  // namespace
