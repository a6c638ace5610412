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

#include "sofpg/estimator.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "sofpg/error.hpp"
#include "sofpg/parallel.hpp"
#include "sofpg/random.hpp"

namespace sofpg {

namespace {

void check_gain_shape(const RolloutInterface& env, const Matrix& gain) {
    if (gain.rows() != static_cast<Eigen::Index>(env.input_dim()) ||
        gain.cols() != static_cast<Eigen::Index>(env.output_dim())) {
        throw DimensionError("gain must be " + std::to_string(env.input_dim()) + "x" +
                             std::to_string(env.output_dim()));
    }
}

void check_gamma(double gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("discount factor must lie in (0, 1]");
}

}  // namespace

void GradEstConfig::validate() const {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("smoothing radius r must be positive");
    if (tau_e < 1) throw DomainError("gradient rollout horizon must be at least 1");
    if (n_e < 1) throw DomainError("number of perturbation pairs must be at least 1");
}

void CostEstConfig::validate() const {
    if (tau < 1) throw DomainError("cost rollout horizon must be at least 1");
    if (n < 1) throw DomainError("number of cost rollouts must be at least 1");
}

double estimate_cost(const RolloutInterface& env, const Matrix& gain, double gamma,
                     const CostEstConfig& cfg) {
    cfg.validate();
    check_gain_shape(env, gain);
    check_gamma(gamma);

    std::vector<double> costs(cfg.n);
    parallel_for(cfg.n, cfg.threads, [&](std::size_t i) {
        const std::uint64_t x0_seed = derive_seed(cfg.seed, {i, stream::kInitialState});
        try {
            costs[i] = env.episode_cost(gain, gamma, cfg.tau, x0_seed);
        } catch (const DivergenceError& e) {
            throw DivergenceError("cost rollout " + std::to_string(i) + " diverged at step " +
                                      std::to_string(e.step()),
                                  e.step(), i, 0);
        }
    });
    return pairwise_sum(costs) / static_cast<double>(cfg.n);
}

Matrix sample_perturbation(std::size_t m, std::size_t p, std::uint64_t seed, std::size_t index) {
    if (m < 1 || p < 1) throw DimensionError("perturbation shape must be positive");
    Engine engine = make_engine(derive_seed(seed, {index, stream::kPerturbation}));
    std::normal_distribution<double> normal;
    Matrix u(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p));
    double norm = 0.0;
    do {
        for (Eigen::Index j = 0; j < u.cols(); ++j) {
            for (Eigen::Index i = 0; i < u.rows(); ++i) u(i, j) = normal(engine);
        }
        norm = u.norm();
    } while (norm == 0.0);
    return u / norm;
}

GradEstimate estimate_gradient(const RolloutInterface& env, const Matrix& gain, double gamma,
                               const GradEstConfig& cfg) {
    cfg.validate();
    check_gain_shape(env, gain);
    check_gamma(gamma);

    const std::size_t m = env.input_dim();
    const std::size_t p = env.output_dim();
    const std::size_t mp = m * p;

    // Row i holds (J(K + rU_i) - J(K - rU_i)) * vec(U_i).
    std::vector<double> contributions(cfg.n_e * mp);
    parallel_for(cfg.n_e, cfg.threads, [&](std::size_t i) {
        const Matrix u = sample_perturbation(m, p, cfg.seed, i);
        const std::uint64_t x0_seed = derive_seed(cfg.seed, {i, stream::kInitialState});
        double costs[2];
        for (int s = 0; s < 2; ++s) {
            const int sign = s == 0 ? +1 : -1;
            try {
                costs[s] = env.episode_cost(gain + (sign * cfg.r) * u, gamma, cfg.tau_e, x0_seed);
            } catch (const DivergenceError& e) {
                throw DivergenceError("gradient rollout " + std::to_string(i) + " (sign " +
                                          (sign > 0 ? "+" : "-") + ") diverged at step " +
                                          std::to_string(e.step()),
                                      e.step(), i, sign);
            }
        }
        const double diff = costs[0] - costs[1];
        double* row = contributions.data() + i * mp;
        for (std::size_t k = 0; k < mp; ++k) row[k] = diff * u.data()[k];
    });

    const std::vector<double> sum = pairwise_sum_rows(contributions, cfg.n_e, mp);
    const double scale = static_cast<double>(mp) / (2.0 * cfg.r * static_cast<double>(cfg.n_e));

    GradEstimate out;
    out.matrix = Matrix(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(p));
    for (std::size_t k = 0; k < mp; ++k) out.matrix.data()[k] = scale * sum[k];
    out.fro_norm = out.matrix.norm();
    out.trajectories_used = 2 * static_cast<std::uint64_t>(cfg.n_e);
    return out;
}

}  // namespace sofpg
