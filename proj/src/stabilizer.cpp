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

#include "sofpg/stabilizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "sofpg/error.hpp"
#include "sofpg/random.hpp"

namespace sofpg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double theory_stepsize(const CostParams& theory, double nu, double eps, std::size_t m,
                       std::size_t p) {
    const TheoryConstants tc = theory_constants(theory, std::max(nu, theory.l0), m, p);
    return std::min(tc.d_radius / (tc.g0 + eps), 1.0 / (2.0 * tc.l));
}

TraceRecord blank_record(std::size_t k, std::size_t j, double gamma, std::uint64_t traj) {
    TraceRecord rec;
    rec.outer_k = k;
    rec.inner_j = j;
    rec.gamma = gamma;
    rec.grad_norm_est = kNaN;
    rec.cost_est = kNaN;
    rec.traj_cum = traj;
    rec.true_cost = kNaN;
    rec.true_rho = kNaN;
    return rec;
}

}  // namespace

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Stabilized: return "stabilized";
        case RunStatus::MaxIterations: return "max_iterations";
        case RunStatus::Diverged: return "diverged";
    }
    return "unknown";
}

GradEstimate ZerothOrderGradient::estimate(const Matrix& gain, double gamma,
                                           std::uint64_t seed) const {
    GradEstConfig cfg = cfg_;
    cfg.seed = seed;
    return estimate_gradient(env_, gain, gamma, cfg);
}

GradEstimate OracleGradient::estimate(const Matrix& gain, double gamma, std::uint64_t) const {
    const LyapunovSolution sol = exact_solution(plant_, params_, gain, gamma);
    GradEstimate out;
    out.matrix = sol.grad;
    out.fro_norm = sol.grad.norm();
    out.trajectories_used = 0;
    return out;
}

TraceMonitor make_oracle_monitor(const Plant& plant, CostParams params) {
    return [&plant, params = std::move(params)](const Matrix& gain, double gamma,
                                                TraceRecord& rec) {
        rec.true_cost = exact_cost_or_inf(plant, params, gain, std::min(gamma, 1.0));
        rec.true_rho = spectral_radius(plant.closed_loop(gain));
    };
}

void StabilizerConfig::validate() const {
    if (!(gamma0 > 0.0 && gamma0 < 1.0)) throw DomainError("gamma0 must lie in (0, 1)");
    if (!(zeta > 0.0 && zeta < 1.0)) throw DomainError("zeta must lie in (0, 1)");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("eps must be positive");
    if (eta && (!(*eta > 0.0) || !std::isfinite(*eta))) throw DomainError("eta must be positive");
    if (!eta && !theory) throw DomainError("automatic stepsize needs the theory bounds");
    if (max_inner < 1 || max_outer < 1) throw DomainError("iteration budgets must be at least 1");
    inner.validate();
    cost.validate();
}

InnerLoopResult pg_inner_loop(const GradientSource& source, const Matrix& start, double gamma,
                              double eta, double eps, std::size_t max_inner, std::uint64_t seed,
                              const InnerLoopContext& ctx) {
    if (!(eta > 0.0)) throw DomainError("eta must be positive");
    if (!(eps > 0.0)) throw DomainError("eps must be positive");

    const double threshold = 2.0 * eps / 3.0;
    InnerLoopResult out;
    out.gain = start;
    for (std::size_t j = 0;; ++j) {
        const GradEstimate g =
            source.estimate(out.gain, gamma, derive_seed(seed, {j, stream::kGradient}));
        out.trajectories += g.trajectories_used;
        out.last_grad_norm = g.fro_norm;
        out.steps = j;

        if (ctx.trace != nullptr) {
            TraceRecord rec = blank_record(ctx.outer_k, j, gamma, ctx.traj_base + out.trajectories);
            rec.grad_norm_est = g.fro_norm;
            if (ctx.monitor != nullptr) (*ctx.monitor)(out.gain, gamma, rec);
            ctx.trace->records.push_back(rec);
        }

        if (g.fro_norm <= threshold) {
            out.converged = true;
            return out;
        }
        if (j == max_inner) return out;
        out.gain -= eta * g.matrix;
    }
}

DiscountUpdate update_discount(double j_hat, double gamma, double zeta, double l0) {
    if (!(l0 > 0.0)) throw DomainError("l0 must be positive");
    if (!(2.0 * j_hat > l0)) {
        throw DomainError("cost estimate " + std::to_string(j_hat) +
                          " is not above l0 / 2; the discount rate is undefined");
    }
    DiscountUpdate out;
    out.alpha = l0 / (2.0 * j_hat - l0);
    out.gamma_next = (1.0 + zeta * out.alpha) * gamma;
    return out;
}

double estimate_nu0(const RolloutInterface& env, double gamma0, const CostEstConfig& cfg) {
    const Matrix zero = Matrix::Zero(static_cast<Eigen::Index>(env.input_dim()),
                                     static_cast<Eigen::Index>(env.output_dim()));
    return estimate_cost(env, zero, gamma0, cfg);
}

StabilizationResult learn_sof(const RolloutInterface& env, const StabilizerConfig& cfg, double l0,
                              const TraceMonitor* monitor) {
    const ZerothOrderGradient source(env, cfg.inner);
    return learn_sof(source, env, cfg, l0, monitor);
}

StabilizationResult learn_sof(const GradientSource& source, const RolloutInterface& env,
                              const StabilizerConfig& cfg, double l0,
                              const TraceMonitor* monitor) {
    cfg.validate();
    if (!(l0 > 0.0)) throw DomainError("l0 must be positive");

    const std::size_t m = env.input_dim();
    const std::size_t p = env.output_dim();

    StabilizationResult result;
    result.gain = cfg.initial_gain.value_or(
        Matrix::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p)));
    if (result.gain.rows() != static_cast<Eigen::Index>(m) ||
        result.gain.cols() != static_cast<Eigen::Index>(p)) {
        throw DimensionError("initial gain has the wrong shape");
    }

    double gamma = cfg.gamma0;
    result.gamma_final = gamma;
    std::uint64_t trajectories = 0;

    auto finish = [&](RunStatus status, std::string message) {
        result.status = status;
        result.message = std::move(message);
        result.gamma_final = gamma;
        result.total_trajectories = trajectories;
        return std::move(result);
    };

    double eta = cfg.eta.value_or(0.0);
    if (!cfg.eta) {
        CostEstConfig c = cfg.cost;
        c.seed = derive_seed(cfg.seed, {0, 0, stream::kNu0});
        double nu0 = 0.0;
        try {
            nu0 = estimate_nu0(env, gamma, c);
        } catch (const DivergenceError& e) {
            return finish(RunStatus::Diverged, e.what());
        }
        trajectories += c.n;
        eta = theory_stepsize(*cfg.theory, nu0, cfg.eps, m, p);
    }

    for (std::size_t k = 0; k < cfg.max_outer; ++k) {
        InnerLoopContext ctx;
        ctx.outer_k = k;
        ctx.traj_base = trajectories;
        ctx.monitor = monitor;
        ctx.trace = &result.trace;

        InnerLoopResult inner;
        try {
            inner = pg_inner_loop(source, result.gain, gamma, eta, cfg.eps, cfg.max_inner,
                                  derive_seed(cfg.seed, {k, stream::kGradient}), ctx);
        } catch (const DivergenceError& e) {
            if (!result.trace.records.empty()) {
                trajectories = result.trace.records.back().traj_cum;
            }
            return finish(RunStatus::Diverged, e.what());
        }
        trajectories += inner.trajectories;
        result.gain = inner.gain;
        if (!inner.converged) {
            return finish(RunStatus::MaxIterations,
                          "inner loop budget exhausted at outer iteration " + std::to_string(k));
        }

        CostEstConfig c = cfg.cost;
        c.seed = derive_seed(cfg.seed, {k, 0, stream::kCost});
        double j_hat = 0.0;
        try {
            j_hat = estimate_cost(env, result.gain, gamma, c);
        } catch (const DivergenceError& e) {
            return finish(RunStatus::Diverged, e.what());
        }
        trajectories += c.n;
        TraceRecord& last = result.trace.records.back();
        last.cost_est = j_hat;
        last.traj_cum = trajectories;

        const DiscountUpdate upd = update_discount(j_hat, gamma, cfg.zeta, l0);
        gamma = upd.gamma_next;
        result.outer_iterations = k + 1;
        if (!cfg.eta) eta = theory_stepsize(*cfg.theory, nu_next(j_hat, cfg.zeta, l0), cfg.eps, m, p);

        if (gamma >= 1.0) {
            TraceRecord rec = blank_record(k + 1, 0, gamma, trajectories);
            if (monitor != nullptr) (*monitor)(result.gain, gamma, rec);
            result.trace.records.push_back(rec);
            return finish(RunStatus::Stabilized, "discount factor reached 1");
        }
    }
    return finish(RunStatus::MaxIterations, "outer iteration budget exhausted");
}

}  // namespace sofpg
