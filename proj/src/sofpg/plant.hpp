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

#ifndef SOFPG_PLANT_HPP
#define SOFPG_PLANT_HPP

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "sofpg/matops.hpp"

namespace sofpg {

/// Rollouts whose damped state norm exceeds this are reported as divergent.
inline constexpr double kDivergenceNorm = 1e12;

/// The hidden system x_{t+1} = A x_t + B u_t, y_t = C x_t. Only the
/// simulator and the oracle read the matrices.
class Plant {
public:
    Plant(Matrix a, Matrix b, Matrix c);

    const Matrix& a() const noexcept { return a_; }
    const Matrix& b() const noexcept { return b_; }
    const Matrix& c() const noexcept { return c_; }

    std::size_t state_dim() const noexcept { return static_cast<std::size_t>(a_.rows()); }
    std::size_t input_dim() const noexcept { return static_cast<std::size_t>(b_.cols()); }
    std::size_t output_dim() const noexcept { return static_cast<std::size_t>(c_.rows()); }

    /// A - B K C.
    Matrix closed_loop(const Matrix& gain) const;

    /// Throws DimensionError unless `gain` is input_dim x output_dim.
    void check_gain(const Matrix& gain) const;

private:
    Matrix a_;
    Matrix b_;
    Matrix c_;
};

enum class InitStateKind { Gaussian, SphereScaled, Rademacher };

InitStateKind parse_init_state_kind(std::string_view name);
std::string_view to_string(InitStateKind kind);

/// Zero-mean, identity-covariance initial-state distribution.
///
/// Gaussian draws N(0, I); `bound` is then only a nominal value used in the
/// theory constants. SphereScaled draws sqrt(n) times a uniform unit vector
/// and Rademacher draws independent +-1 entries; both have norm exactly
/// sqrt(n) and therefore require bound >= sqrt(n).
class InitStateSampler {
public:
    InitStateSampler(InitStateKind kind, double bound, std::size_t dim);

    InitStateKind kind() const noexcept { return kind_; }
    double bound() const noexcept { return bound_; }
    std::size_t dim() const noexcept { return dim_; }

    /// Deterministic in `seed`.
    Vector sample(std::uint64_t seed) const;

private:
    InitStateKind kind_;
    double bound_;
    std::size_t dim_;
};

struct Trajectory {
    std::vector<Vector> states;   // damped states, states[0] = x0
    std::vector<Vector> outputs;  // C * states[t]
    std::vector<Vector> inputs;   // -K * outputs[t]
    std::size_t horizon = 0;
};

/// Simulates x~_{t+1} = sqrt(gamma) (A x~_t + B u_t), u_t = -K C x~_t for
/// `horizon` steps, recording every signal.
Trajectory rollout_damped(const Plant& plant, const Matrix& gain, double gamma,
                          const Vector& x0, std::size_t horizon);

/// sum_{t < tau} x~_t^T Q x~_t + u_t^T R u_t along the damped rollout.
double truncated_cost(const Plant& plant, const Matrix& gain, double gamma, const Vector& x0,
                      const Matrix& q, const Matrix& r, std::size_t tau);

/// The only view of the system the learner gets: the gain shape and the
/// cost of a rollout. The initial state is drawn inside the environment from
/// the stream `seed`, so the learner never sees the state dimension.
class RolloutInterface {
public:
    virtual ~RolloutInterface() = default;

    virtual std::size_t input_dim() const = 0;
    virtual std::size_t output_dim() const = 0;

    /// Truncated cost of one damped rollout of length `horizon` from the
    /// initial state drawn with `seed`. Throws DivergenceError.
    virtual double episode_cost(const Matrix& gain, double gamma, std::size_t horizon,
                                std::uint64_t seed) const = 0;
};

/// RolloutInterface backed by a Plant and cost matrices.
class Simulator final : public RolloutInterface {
public:
    Simulator(Plant plant, Matrix q, Matrix r, InitStateSampler sampler);

    std::size_t input_dim() const override { return plant_.input_dim(); }
    std::size_t output_dim() const override { return plant_.output_dim(); }

    double episode_cost(const Matrix& gain, double gamma, std::size_t horizon,
                        std::uint64_t seed) const override;

    const Plant& plant() const noexcept { return plant_; }
    const Matrix& q() const noexcept { return q_; }
    const Matrix& r() const noexcept { return r_; }
    const InitStateSampler& sampler() const noexcept { return sampler_; }

private:
    Plant plant_;
    Matrix q_;
    Matrix r_;
    InitStateSampler sampler_;
};

}  // namespace sofpg

#endif  // SOFPG_PLANT_HPP
