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

#include "sofpg/plant.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "sofpg/error.hpp"
#include "sofpg/random.hpp"

namespace sofpg {

namespace {

constexpr double kDivergenceNormSq = kDivergenceNorm * kDivergenceNorm;

[[noreturn]] void throw_divergence(std::size_t step) {
    throw DivergenceError("rollout diverged at step " + std::to_string(step), step);
}

// Cost of `tau` steps of x <- m x, accumulating x^T s x. Plain loops: the
// matrices here are a handful of rows and this is the innermost kernel of
// every estimator.
double closed_loop_cost(const Matrix& m, const Matrix& s, Vector x, std::size_t tau) {
    const Eigen::Index n = m.rows();
    const double* md = m.data();
    const double* sd = s.data();
    Vector next(n);
    double total = 0.0;
    for (std::size_t t = 0; t < tau; ++t) {
        double norm_sq = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) norm_sq += x[i] * x[i];
        if (!(norm_sq <= kDivergenceNormSq)) throw_divergence(t);

        double stage = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            double col = 0.0;
            for (Eigen::Index i = 0; i < n; ++i) col += sd[j * n + i] * x[i];
            stage += col * x[j];
        }
        total += stage;

        if (t + 1 == tau) break;
        next.setZero();
        for (Eigen::Index j = 0; j < n; ++j) {
            const double xj = x[j];
            for (Eigen::Index i = 0; i < n; ++i) next[i] += md[j * n + i] * xj;
        }
        x.swap(next);
    }
    return total;
}

void check_cost_matrices(const Plant& plant, const Matrix& q, const Matrix& r) {
    require_finite(q, "Q");
    require_finite(r, "R");
    if (q.rows() != static_cast<Eigen::Index>(plant.state_dim()) || q.cols() != q.rows()) {
        throw DimensionError("Q must be n x n");
    }
    if (r.rows() != static_cast<Eigen::Index>(plant.input_dim()) || r.cols() != r.rows()) {
        throw DimensionError("R must be m x m");
    }
}

}  // namespace

Plant::Plant(Matrix a, Matrix b, Matrix c) : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    require_finite(a_, "A");
    require_finite(b_, "B");
    require_finite(c_, "C");
    require_square(a_, "A");
    if (b_.rows() != a_.rows()) {
        throw DimensionError("B must have " + std::to_string(a_.rows()) + " rows, got " +
                             std::to_string(b_.rows()));
    }
    if (c_.cols() != a_.cols()) {
        throw DimensionError("C must have " + std::to_string(a_.cols()) + " columns, got " +
                             std::to_string(c_.cols()));
    }
}

void Plant::check_gain(const Matrix& gain) const {
    if (gain.rows() != b_.cols() || gain.cols() != c_.rows()) {
        throw DimensionError("gain must be " + std::to_string(b_.cols()) + "x" +
                             std::to_string(c_.rows()) + ", got " + std::to_string(gain.rows()) +
                             "x" + std::to_string(gain.cols()));
    }
    if (!gain.allFinite()) throw DomainError("gain has non-finite entries");
}

Matrix Plant::closed_loop(const Matrix& gain) const {
    check_gain(gain);
    return a_ - b_ * gain * c_;
}

InitStateKind parse_init_state_kind(std::string_view name) {
    if (name == "gaussian") return InitStateKind::Gaussian;
    if (name == "sphere" || name == "sphere-scaled") return InitStateKind::SphereScaled;
    if (name == "rademacher") return InitStateKind::Rademacher;
    throw DomainError("unknown initial-state distribution '" + std::string(name) + "'");
}

std::string_view to_string(InitStateKind kind) {
    switch (kind) {
        case InitStateKind::Gaussian: return "gaussian";
        case InitStateKind::SphereScaled: return "sphere";
        case InitStateKind::Rademacher: return "rademacher";
    }
    return "gaussian";
}

InitStateSampler::InitStateSampler(InitStateKind kind, double bound, std::size_t dim)
    : kind_(kind), bound_(bound), dim_(dim) {
    if (dim_ < 1) throw DimensionError("initial-state dimension must be positive");
    if (!(bound_ > 0.0) || !std::isfinite(bound_)) {
        throw DomainError("initial-state bound d must be positive and finite");
    }
    if (kind_ != InitStateKind::Gaussian && bound_ < std::sqrt(static_cast<double>(dim_))) {
        throw DomainError("bounded samplers have norm sqrt(n) = " +
                          std::to_string(std::sqrt(static_cast<double>(dim_))) +
                          ", which exceeds d = " + std::to_string(bound_));
    }
}

Vector InitStateSampler::sample(std::uint64_t seed) const {
    Engine engine = make_engine(seed);
    const auto n = static_cast<Eigen::Index>(dim_);
    Vector x(n);
    switch (kind_) {
        case InitStateKind::Gaussian: {
            std::normal_distribution<double> normal;
            for (Eigen::Index i = 0; i < n; ++i) x[i] = normal(engine);
            break;
        }
        case InitStateKind::SphereScaled: {
            std::normal_distribution<double> normal;
            double norm = 0.0;
            do {
                for (Eigen::Index i = 0; i < n; ++i) x[i] = normal(engine);
                norm = x.norm();
            } while (norm == 0.0);
            x *= std::sqrt(static_cast<double>(n)) / norm;
            break;
        }
        case InitStateKind::Rademacher: {
            std::bernoulli_distribution coin;
            for (Eigen::Index i = 0; i < n; ++i) x[i] = coin(engine) ? 1.0 : -1.0;
            break;
        }
    }
    return x;
}

Trajectory rollout_damped(const Plant& plant, const Matrix& gain, double gamma,
                          const Vector& x0, std::size_t horizon) {
    plant.check_gain(gain);
    if (x0.size() != static_cast<Eigen::Index>(plant.state_dim())) {
        throw DimensionError("x0 has the wrong dimension");
    }
    if (horizon < 1) throw DomainError("horizon must be at least 1");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("discount factor must lie in (0, 1]");

    const double damping = std::sqrt(gamma);
    Trajectory traj;
    traj.horizon = horizon;
    traj.states.reserve(horizon);
    traj.outputs.reserve(horizon);
    traj.inputs.reserve(horizon);

    Vector x = x0;
    for (std::size_t t = 0; t < horizon; ++t) {
        if (!(x.squaredNorm() <= kDivergenceNormSq)) throw_divergence(t);
        Vector y = plant.c() * x;
        Vector u = -gain * y;
        traj.states.push_back(x);
        traj.outputs.push_back(y);
        traj.inputs.push_back(u);
        x = damping * (plant.a() * x + plant.b() * u);
    }
    return traj;
}

double truncated_cost(const Plant& plant, const Matrix& gain, double gamma, const Vector& x0,
                      const Matrix& q, const Matrix& r, std::size_t tau) {
    check_cost_matrices(plant, q, r);
    if (x0.size() != static_cast<Eigen::Index>(plant.state_dim())) {
        throw DimensionError("x0 has the wrong dimension");
    }
    if (tau < 1) throw DomainError("horizon must be at least 1");
    if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("discount factor must lie in (0, 1]");

    // u = -K C x, so the stage cost is x^T (Q + C^T K^T R K C) x and the
    // damped step is sqrt(gamma) (A - B K C) x.
    const Matrix kc = gain * plant.c();
    const Matrix stage = q + kc.transpose() * r * kc;
    const Matrix step = std::sqrt(gamma) * plant.closed_loop(gain);
    return closed_loop_cost(step, stage, x0, tau);
}

Simulator::Simulator(Plant plant, Matrix q, Matrix r, InitStateSampler sampler)
    : plant_(std::move(plant)), q_(std::move(q)), r_(std::move(r)), sampler_(sampler) {
    check_cost_matrices(plant_, q_, r_);
    if (sampler_.dim() != plant_.state_dim()) {
        throw DimensionError("initial-state sampler dimension does not match the plant");
    }
}

double Simulator::episode_cost(const Matrix& gain, double gamma, std::size_t horizon,
                               std::uint64_t seed) const {
    return truncated_cost(plant_, gain, gamma, sampler_.sample(seed), q_, r_, horizon);
}

}  // namespace sofpg
