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

#include "sofpg/config.hpp"
#include "sofpg/error.hpp"
#include "sofpg/stabilizer.hpp"

namespace sofpg {
namespace {

/// Returns the same gradient everywhere.
class FixedGradient final : public GradientSource {
public:
    explicit FixedGradient(Matrix g) : g_(std::move(g)) {}
    std::size_t input_dim() const override { return static_cast<std::size_t>(g_.rows()); }
    std::size_t output_dim() const override { return static_cast<std::size_t>(g_.cols()); }
    GradEstimate estimate(const Matrix&, double, std::uint64_t) const override {
        return GradEstimate{g_, g_.norm(), 10};
    }

private:
    Matrix g_;
};

Plant scalar_plant(double a) {
    return Plant(Matrix::Constant(1, 1, a), Matrix::Identity(1, 1), Matrix::Identity(1, 1));
}

CostParams unit_params(std::size_t n, std::size_t m) {
    CostParams p;
    p.q = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    p.r = Matrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    return p;
}

TEST(InnerLoop, StopsImmediatelyOnSmallGradient) {
    const FixedGradient source(Matrix::Constant(1, 2, 0.1));
    const Matrix start = Matrix::Constant(1, 2, 0.7);
    RunTrace trace;
    InnerLoopContext ctx;
    ctx.outer_k = 3;
    ctx.traj_base = 100;
    ctx.trace = &trace;
    const InnerLoopResult res = pg_inner_loop(source, start, 0.5, 1e-2, 1.0, 50, 1, ctx);
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.steps, 0u);
    EXPECT_TRUE(res.gain == start);
    EXPECT_EQ(res.trajectories, 10u);
    ASSERT_EQ(trace.records.size(), 1u);
    EXPECT_EQ(trace.records[0].outer_k, 3u);
    EXPECT_EQ(trace.records[0].traj_cum, 110u);
    EXPECT_TRUE(std::isnan(trace.records[0].cost_est));
}

TEST(InnerLoop, BudgetCountsUpdates) {
    const Matrix g = Matrix::Constant(1, 1, 1.0);
    const FixedGradient source(g);
    const InnerLoopResult res =
        pg_inner_loop(source, Matrix::Zero(1, 1), 0.5, 0.1, 0.1, 5, 1);
    EXPECT_FALSE(res.converged);
    EXPECT_EQ(res.steps, 5u);
    EXPECT_NEAR(res.gain(0, 0), -0.5, 1e-15);
    EXPECT_EQ(res.trajectories, 60u);
    EXPECT_THROW(pg_inner_loop(source, Matrix::Zero(1, 1), 0.5, 0.0, 0.1, 5, 1), DomainError);
}

TEST(InnerLoop, OracleDescentIsMonotone) {
    const Plant plant = scalar_plant(0.5);
    const CostParams params = unit_params(1, 1);
    const OracleGradient source(plant, params);
    const TraceMonitor monitor = make_oracle_monitor(plant, params);
    RunTrace trace;
    InnerLoopContext ctx;
    ctx.trace = &trace;
    ctx.monitor = &monitor;
    const InnerLoopResult res =
        pg_inner_loop(source, Matrix::Zero(1, 1), 1.0, 0.1, 0.01, 10000, 0, ctx);
    ASSERT_TRUE(res.converged);
    ASSERT_GE(trace.records.size(), 3u);
    for (std::size_t i = 1; i < trace.records.size(); ++i) {
        EXPECT_LT(trace.records[i].true_cost, trace.records[i - 1].true_cost);
    }
    EXPECT_LE(exact_solution(plant, params, res.gain, 1.0).grad.norm(), 2.0 * 0.01 / 3.0);
}

TEST(DiscountUpdate, Examples) {
    DiscountUpdate u = update_discount(1.0, 0.2, 0.9, 1.0);
    EXPECT_DOUBLE_EQ(u.alpha, 1.0);
    EXPECT_DOUBLE_EQ(u.gamma_next, 0.2 * 1.9);

    u = update_discount(2.0, 0.5, 0.5, 1.0);
    EXPECT_DOUBLE_EQ(u.alpha, 1.0 / 3.0);
    EXPECT_DOUBLE_EQ(u.gamma_next, 0.5 * (1.0 + 0.5 / 3.0));

    EXPECT_THROW(update_discount(0.5, 0.5, 0.5, 1.0), DomainError);
    EXPECT_THROW(update_discount(2.0, 0.5, 0.5, 0.0), DomainError);
}

TEST(DiscountUpdate, NeverOvershootsSafeDiscount) {
    // With J_hat >= J / 2 the new damped closed loop stays stable.
    for (double a : {1.5, 2.0, 4.0}) {
        const Plant plant = scalar_plant(a);
        const CostParams params = unit_params(1, 1);
        const double gamma = 0.5 / (a * a);
        const double j = exact_solution(plant, params, Matrix::Zero(1, 1), gamma).cost;
        const DiscountUpdate u = update_discount(0.5 * j + 1e-12, gamma, 0.99, params.l0);
        EXPECT_LT(std::sqrt(u.gamma_next) * a, 1.0);
    }
}

TEST(EstimateNu0, ScalarUnstablePlant) {
    const Matrix one = Matrix::Identity(1, 1);
    const Simulator sim(scalar_plant(2.0), one, one, InitStateSampler(InitStateKind::Gaussian, 1.0, 1));
    CostEstConfig cfg;
    cfg.tau = 200;
    cfg.n = 20000;
    EXPECT_NEAR(estimate_nu0(sim, 0.2, cfg), 5.0, 0.5);
    cfg.tau = 400;
    cfg.n = 4;
    EXPECT_THROW(estimate_nu0(sim, 0.3, cfg), DivergenceError);
}

struct LearnFixture {
    Plant plant;
    CostParams params;
    Simulator sim;
    StabilizerConfig cfg;
};

LearnFixture stable_scalar_fixture() {
    Plant plant = scalar_plant(0.5);
    CostParams params = CostParams::from_plant(plant, Matrix::Identity(1, 1), Matrix::Identity(1, 1), 1.0);
    Simulator sim(plant, params.q, params.r, InitStateSampler(InitStateKind::Gaussian, 1.0, 1));
    StabilizerConfig cfg;
    cfg.gamma0 = 0.1;
    cfg.zeta = 0.9;
    cfg.eps = 1.0;
    cfg.eta = 0.05;
    cfg.inner.n_e = 20;
    cfg.inner.tau_e = 50;
    cfg.inner.r = 1e-2;
    cfg.cost.n = 10;
    cfg.cost.tau = 50;
    cfg.seed = 11;
    return LearnFixture{plant, params, sim, cfg};
}

TEST(LearnSof, StablePlantAccounting) {
    const LearnFixture f = stable_scalar_fixture();
    const TraceMonitor monitor = make_oracle_monitor(f.plant, f.params);
    const StabilizationResult res = learn_sof(f.sim, f.cfg, f.params.l0, &monitor);
    ASSERT_EQ(res.status, RunStatus::Stabilized) << res.message;
    EXPECT_GE(res.gamma_final, 1.0);
    EXPECT_LT(spectral_radius(f.plant.closed_loop(res.gain)), 1.0);

    std::uint64_t gradient_calls = 0;
    double last_gamma = 0.0;
    std::uint64_t last_traj = 0;
    for (const TraceRecord& rec : res.trace.records) {
        if (!std::isnan(rec.grad_norm_est)) ++gradient_calls;
        EXPECT_GE(rec.gamma, last_gamma);
        EXPECT_GE(rec.traj_cum, last_traj);
        last_gamma = rec.gamma;
        last_traj = rec.traj_cum;
    }
    const std::uint64_t expected =
        gradient_calls * 2 * f.cfg.inner.n_e + res.outer_iterations * f.cfg.cost.n;
    EXPECT_EQ(res.total_trajectories, expected);
    EXPECT_EQ(res.trace.records.back().traj_cum, expected);
    EXPECT_EQ(res.trace.records.back().outer_k, res.outer_iterations);
}

TEST(LearnSof, DeterministicForSeed) {
    const LearnFixture f = stable_scalar_fixture();
    const StabilizationResult a = learn_sof(f.sim, f.cfg, f.params.l0);
    const StabilizationResult b = learn_sof(f.sim, f.cfg, f.params.l0);
    EXPECT_TRUE(a.gain == b.gain);
    EXPECT_EQ(a.total_trajectories, b.total_trajectories);
    StabilizerConfig threaded = f.cfg;
    threaded.inner.threads = 3;
    threaded.cost.threads = 2;
    const StabilizationResult c = learn_sof(f.sim, threaded, f.params.l0);
    EXPECT_TRUE(a.gain == c.gain);
}

TEST(LearnSof, OracleGradientKeepsEveryStepSafe) {
    const Plant plant = scalar_plant(2.0);
    const CostParams params = CostParams::from_plant(plant, Matrix::Identity(1, 1),
                                                     Matrix::Identity(1, 1), 1.0);
    const Simulator sim(plant, params.q, params.r, InitStateSampler(InitStateKind::Gaussian, 1.0, 1));
    const OracleGradient source(plant, params);
    const TraceMonitor monitor = make_oracle_monitor(plant, params);
    StabilizerConfig cfg;
    cfg.gamma0 = 0.1;
    cfg.eta = 0.01;
    cfg.cost.n = 200;
    cfg.cost.tau = 200;
    const StabilizationResult res = learn_sof(source, sim, cfg, params.l0, &monitor);
    ASSERT_EQ(res.status, RunStatus::Stabilized) << res.message;
    // The gain leaving outer iteration k must be stable at gamma_{k+1}.
    const auto& recs = res.trace.records;
    for (std::size_t i = 0; i + 1 < recs.size(); ++i) {
        if (recs[i + 1].outer_k == recs[i].outer_k) continue;
        EXPECT_LT(std::sqrt(std::min(recs[i + 1].gamma, 1.0)) * recs[i].true_rho, 1.0)
            << "outer " << recs[i].outer_k;
    }
    EXPECT_LT(recs.back().true_rho, 1.0);
}

TEST(LearnSof, LargeInitialDiscountDiverges) {
    ExperimentConfig cfg = preset("numerical-example");
    cfg.stabilizer.gamma0 = 0.9;
    const Simulator sim = cfg.make_simulator();
    const StabilizationResult res = learn_sof(sim, cfg.stabilizer, cfg.cost.l0);
    EXPECT_EQ(res.status, RunStatus::Diverged);
    EXPECT_EQ(res.outer_iterations, 0u);
    EXPECT_FALSE(res.message.empty());
}

TEST(LearnSof, NumericalExampleFirstInnerLoopTerminates) {
    const ExperimentConfig cfg = preset("numerical-example");
    const Simulator sim = cfg.make_simulator();
    const ZerothOrderGradient source(sim, cfg.stabilizer.inner);
    const InnerLoopResult res = pg_inner_loop(source, Matrix::Zero(1, 2), cfg.stabilizer.gamma0,
                                              *cfg.stabilizer.eta, cfg.stabilizer.eps, 20000, 5);
    EXPECT_TRUE(res.converged);
    EXPECT_EQ(res.trajectories, (res.steps + 1) * 2 * cfg.stabilizer.inner.n_e);
}

TEST(LearnSof, BudgetExhaustionReported) {
    LearnFixture f = stable_scalar_fixture();
    f.cfg.max_outer = 1;
    const StabilizationResult res = learn_sof(f.sim, f.cfg, f.params.l0);
    EXPECT_EQ(res.status, RunStatus::MaxIterations);
    EXPECT_EQ(res.outer_iterations, 1u);
    EXPECT_LT(res.gamma_final, 1.0);
}

TEST(StabilizerConfig, Validation) {
    StabilizerConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.gamma0 = 1.0;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = StabilizerConfig{};
    cfg.zeta = 0.0;
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg = StabilizerConfig{};
    cfg.eta.reset();
    EXPECT_THROW(cfg.validate(), DomainError);
    cfg.theory = unit_params(1, 1);
    EXPECT_NO_THROW(cfg.validate());
}

}  // namespace
}  // namespace sofpg
