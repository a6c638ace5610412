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

#ifndef SOFPG_ESTIMATOR_HPP
#define SOFPG_ESTIMATOR_HPP

#include <cstddef>
#include <cstdint>

#include "sofpg/matops.hpp"
#include "sofpg/plant.hpp"

namespace sofpg {

struct GradEstConfig {
    double r = 1e-3;            // smoothing radius
    std::size_t tau_e = 100;    // rollout horizon
    std::size_t n_e = 60;       // perturbation pairs
    std::uint64_t seed = 0;
    int threads = 1;

    void validate() const;
};

struct CostEstConfig {
    std::size_t tau = 100;
    std::size_t n = 20;
    std::uint64_t seed = 0;
    int threads = 1;

    void validate() const;
};

struct GradEstimate {
    Matrix matrix;
    double fro_norm = 0.0;
    std::uint64_t trajectories_used = 0;
};

/// Mean of `n` truncated rollout costs from independent initial states.
/// Rollout i draws its initial state from derive_seed(seed, {i, kInitialState}).
/// A divergent rollout is rethrown as DivergenceError carrying its index.
double estimate_cost(const RolloutInterface& env, const Matrix& gain, double gamma,
                     const CostEstConfig& cfg);

/// Unit-Frobenius-norm m x p direction with Gaussian-then-normalized entries,
/// a pure function of (seed, index).
Matrix sample_perturbation(std::size_t m, std::size_t p, std::uint64_t seed, std::size_t index);

/// Two-point zeroth-order gradient estimate
///   (mp / (2 r Ne)) sum_i (J(K + r U_i) - J(K - r U_i)) U_i
/// where both costs of pair i are taken from the same initial state.
/// Pair contributions are summed pairwise in index order, so the result is
/// bit-identical for every thread count.
GradEstimate estimate_gradient(const RolloutInterface& env, const Matrix& gain, double gamma,
                               const GradEstConfig& cfg);

}  // namespace sofpg

#endif  // SOFPG_ESTIMATOR_HPP
