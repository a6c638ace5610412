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

#ifndef SOFPG_STABILIZER_HPP
#define SOFPG_STABILIZER_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sofpg/estimator.hpp"
#include "sofpg/matops.hpp"
#include "sofpg/oracle.hpp"
#include "sofpg/plant.hpp"

namespace sofpg {

/// One row of the run trace. Every gradient estimate produces a record; the
/// last record of an outer iteration also carries the cost estimate that
/// drove the discount update. Absent values are NaN.
struct TraceRecord {
    std::size_t outer_k = 0;
    std::size_t inner_j = 0;
    double gamma = 0.0;
    double grad_norm_est = 0.0;
    double cost_est = 0.0;
    std::uint64_t traj_cum = 0;
    double true_cost = 0.0;
    double true_rho = 0.0;
};

struct RunTrace {
    std::vector<TraceRecord> records;
};

enum class RunStatus { Stabilized, MaxIterations, Diverged };

std::string_view to_string(RunStatus status);

struct StabilizationResult {
    Matrix gain;
    double gamma_final = 0.0;
    std::size_t outer_iterations = 0;
    std::uint64_t total_trajectories = 0;
    RunTrace trace;
    RunStatus status = RunStatus::MaxIterations;
    std::string message;
};

/// Source of gradient estimates for the inner loop.
class GradientSource {
public:
    virtual ~GradientSource() = default;
    virtual std::size_t input_dim() const = 0;
    virtual std::size_t output_dim() const = 0;
    virtual GradEstimate estimate(const Matrix& gain, double gamma, std::uint64_t seed) const = 0;
};

/// Two-point rollout estimator; the model-free path.
class ZerothOrderGradient final : public GradientSource {
public:
    ZerothOrderGradient(const RolloutInterface& env, GradEstConfig cfg) : env_(env), cfg_(cfg) {}

    std::size_t input_dim() const override { return env_.input_dim(); }
    std::size_t output_dim() const override { return env_.output_dim(); }
    GradEstimate estimate(const Matrix& gain, double gamma, std::uint64_t seed) const override;

private:
    const RolloutInterface& env_;
    GradEstConfig cfg_;
};

/// TEST HOOK, NOT MODEL-FREE: returns the exact gradient from the Lyapunov
/// oracle and reports zero trajectories.
class OracleGradient final : public GradientSource {
public:
    OracleGradient(const Plant& plant, CostParams params) : plant_(plant), params_(std::move(params)) {}

    std::size_t input_dim() const override { return plant_.input_dim(); }
    std::size_t output_dim() const override { return plant_.output_dim(); }
    GradEstimate estimate(const Matrix& gain, double gamma, std::uint64_t seed) const override;

private:
    const Plant& plant_;
    CostParams params_;
};

/// Fills the oracle columns (true_cost, true_rho) of a record. Only the
/// white-box tooling installs one.
using TraceMonitor = std::function<void(const Matrix& gain, double gamma, TraceRecord& record)>;

/// Monitor computing J_gamma(K) (inf outside the stabilizing set) and the
/// undamped rho(A - BKC).
TraceMonitor make_oracle_monitor(const Plant& plant, CostParams params);

struct StabilizerConfig {
    double gamma0 = 0.01;
    double zeta = 0.9;
    double eps = 1.0;
    std::optional<double> eta = 1e-3;  // nullopt: per-iteration theory stepsize
    GradEstConfig inner;
    CostEstConfig cost;
    std::size_t max_inner = 100000;
    std::size_t max_outer = 10000;
    std::uint64_t seed = 0;
    std::optional<Matrix> initial_gain;  // warm start; zero gain when empty
    /// Required when eta is automatic: the known bounds l0, l1, psi, phi, d.
    std::optional<CostParams> theory;

    void validate() const;
};

struct InnerLoopResult {
    Matrix gain;
    std::size_t steps = 0;
    bool converged = false;
    double last_grad_norm = 0.0;
    std::uint64_t trajectories = 0;
};

struct InnerLoopContext {
    std::size_t outer_k = 0;
    std::uint64_t traj_base = 0;
    const TraceMonitor* monitor = nullptr;
    RunTrace* trace = nullptr;  // records are appended here as they happen
};

/// Gradient descent K <- K - eta * g_hat at fixed gamma until the estimated
/// gradient norm is at most 2 eps / 3, or `max_inner` updates were taken.
/// Estimate j uses seed derive_seed(seed, {j, kGradient}). Divergence
/// propagates as DivergenceError; records emitted before it stay in the trace.
InnerLoopResult pg_inner_loop(const GradientSource& source, const Matrix& start, double gamma,
                              double eta, double eps, std::size_t max_inner, std::uint64_t seed,
                              const InnerLoopContext& ctx = {});

struct DiscountUpdate {
    double alpha = 0.0;
    double gamma_next = 0.0;
};

/// alpha = l0 / (2 J_hat - l0), gamma_next = (1 + zeta alpha) gamma.
DiscountUpdate update_discount(double j_hat, double gamma, double zeta, double l0);

/// Cost estimate at the zero gain, used as nu_0.
double estimate_nu0(const RolloutInterface& env, double gamma0, const CostEstConfig& cfg);

/// Alternates the inner loop and the discount update from gamma0 until
/// gamma >= 1. Every gradient estimate costs 2 Ne rollouts and every cost
/// estimate N, and total_trajectories is exactly their sum.
StabilizationResult learn_sof(const RolloutInterface& env, const StabilizerConfig& cfg, double l0,
                              const TraceMonitor* monitor = nullptr);

/// Same loop with an arbitrary gradient source (see OracleGradient).
StabilizationResult learn_sof(const GradientSource& source, const RolloutInterface& env,
                              const StabilizerConfig& cfg, double l0,
                              const TraceMonitor* monitor = nullptr);

}  // namespace sofpg

#endif  // SOFPG_STABILIZER_HPP
