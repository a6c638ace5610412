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

#include "sofpg/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sofpg/error.hpp"

namespace sofpg {

namespace {

// Slack for the eigenvalue sandwich so that l0 taken from eig(Q) itself
// passes validation.
constexpr double kSandwichSlack = 1e-12;

std::pair<double, double> symmetric_eig_range(const Matrix& m, std::string_view name) {
    require_square(m, name);
    require_finite(m, name);
    if ((m - m.transpose()).norm() > 1e-10 * std::max(1.0, m.norm())) {
        throw DomainError(std::string(name) + " must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
    return {solver.eigenvalues().minCoeff(), solver.eigenvalues().maxCoeff()};
}

double ceil_at_least_one(double x) { return std::max(1.0, std::ceil(x)); }

}  // namespace

void CostParams::validate() const {
    if (!(l0 > 0.0) || !std::isfinite(l0)) throw DomainError("l0 must be positive");
    if (!(l1 >= l0) || !std::isfinite(l1)) throw DomainError("l1 must be at least l0");
    if (!(psi >= 1.0) || !std::isfinite(psi)) throw DomainError("psi must be at least 1");
    if (!(phi >= 1.0) || !std::isfinite(phi)) throw DomainError("phi must be at least 1");
    if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("d must be positive");
    for (const auto& [mat, name] : {std::pair{&q, "Q"}, std::pair{&r, "R"}}) {
        const auto [lo, hi] = symmetric_eig_range(*mat, name);
        const double slack = kSandwichSlack * std::max(1.0, l1);
        if (lo < l0 - slack || hi > l1 + slack) {
            throw DomainError(std::string(name) + " eigenvalues [" + std::to_string(lo) + ", " +
                              std::to_string(hi) + "] are outside [l0, l1] = [" +
                              std::to_string(l0) + ", " + std::to_string(l1) + "]");
        }
    }
}

CostParams CostParams::from_plant(const Plant& plant, Matrix q, Matrix r, double d) {
    const auto [qlo, qhi] = symmetric_eig_range(q, "Q");
    const auto [rlo, rhi] = symmetric_eig_range(r, "R");
    CostParams params;
    params.q = std::move(q);
    params.r = std::move(r);
    params.l0 = std::min(qlo, rlo);
    params.l1 = std::max(qhi, rhi);
    params.psi = std::max(1.0, spectral_norm(plant.b()));
    params.phi = std::max(1.0, spectral_norm(plant.c()));
    params.d = d;
    params.validate();
    return params;
}

LyapunovSolution exact_solution(const Plant& plant, const CostParams& params,
                                const Matrix& gain, double gamma) {
    plant.check_gain(gain);
    if (params.q.rows() != static_cast<Eigen::Index>(plant.state_dim()) ||
        params.r.rows() != static_cast<Eigen::Index>(plant.input_dim())) {
        throw DimensionError("cost matrices do not match the plant");
    }
    const Matrix& a = plant.a();
    const Matrix& b = plant.b();
    const Matrix& c = plant.c();
    const Matrix kc = gain * c;
    const Matrix acl = a - b * kc;
    const Matrix stage = params.q + kc.transpose() * params.r * kc;

    LyapunovSolution sol;
    sol.p = solve_dlyap_p(acl, stage, gamma);
    sol.sigma = solve_dlyap_sigma(acl, gamma);
    const Matrix btp = b.transpose() * sol.p;
    sol.e = (params.r + gamma * btp * b) * kc - gamma * btp * a;
    sol.grad = 2.0 * sol.e * sol.sigma * c.transpose();
    sol.cost = sol.p.trace();
    return sol;
}

double exact_cost_or_inf(const Plant& plant, const CostParams& params, const Matrix& gain,
                         double gamma) {
    const Matrix acl = plant.closed_loop(gain);
    if (std::sqrt(gamma) * spectral_radius(acl) >= 1.0) {
        return std::numeric_limits<double>::infinity();
    }
    const Matrix kc = gain * plant.c();
    const Matrix stage = params.q + kc.transpose() * params.r * kc;
    try {
        return solve_dlyap_p(acl, stage, gamma).trace();
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

double exact_cost_from(const LyapunovSolution& sol, const Vector& x0) {
    return x0.dot(sol.p * x0);
}

TheoryConstants theory_constants(const CostParams& params, double nu, std::size_t m,
                                 std::size_t p) {
    params.validate();
    if (!(nu >= params.l0) || !std::isfinite(nu)) {
        throw DomainError("nu = " + std::to_string(nu) + " must be at least l0 = " +
                          std::to_string(params.l0));
    }
    if (m < 1 || p < 1) throw DimensionError("m and p must be positive");

    const double kappa = std::sqrt(nu / params.l0);
    const double root_min = std::sqrt(static_cast<double>(std::min(m, p)));
    TheoryConstants tc;
    tc.nu = nu;
    tc.kappa = kappa;
    tc.varrho = 1.0 / (2.0 * kappa * kappa);
    tc.d_radius = 1.0 / (8.0 * std::pow(kappa, 3) * params.psi * params.phi);
    tc.g = 16.0 * std::pow(kappa, 9) * params.l1 * params.psi * params.phi;
    tc.l = 104.0 * std::pow(kappa, 10) * params.l1 * params.psi * params.psi * params.phi *
           root_min;
    tc.g0 = 2.0 * std::pow(kappa, 3) * params.phi * (params.l1 + params.psi * nu) * root_min;
    return tc;
}

ScheduleReport schedule(const CostParams& params, const TheoryConstants& constants,
                        const ScheduleInputs& in, std::size_t m, std::size_t p) {
    params.validate();
    if (!(in.eps > 0.0)) throw DomainError("eps must be positive");
    if (!(in.delta0 > 0.0 && in.delta0 < std::exp(-2.0) / 2.0)) {
        throw DomainError("delta0 must lie in (0, e^-2 / 2)");
    }
    if (!(in.delta1 > 0.0 && in.delta1 < 1.0)) throw DomainError("delta1 must lie in (0, 1)");
    if (!(in.zeta > 0.0 && in.zeta < 1.0)) throw DomainError("zeta must lie in (0, 1)");
    if (!(in.gamma0 > 0.0 && in.gamma0 < 1.0)) throw DomainError("gamma0 must lie in (0, 1)");
    if (!(3.0 * in.j_bar > params.l0)) throw DomainError("J_bar must exceed l0 / 3");
    if (m < 1 || p < 1) throw DimensionError("m and p must be positive");

    const double nu = constants.nu;
    const double l0 = params.l0;
    const double d2 = params.d * params.d;
    const double mp = static_cast<double>(m * p);
    const double eps = in.eps;

    ScheduleReport out;
    out.nu = nu;
    out.r = std::min({constants.d_radius, nu / constants.g, eps / (9.0 * constants.l)});
    out.tau_e = ceil_at_least_one((2.0 * nu / l0) *
                                  std::log(36.0 * d2 * nu * nu * mp / (out.r * eps * l0)));
    const double mpg = mp * constants.g;
    out.n_e = std::ceil(81.0 * mpg * mpg * (d2 + 1.0) * (d2 + 1.0) / (eps * eps) *
                        std::log(15.0 / in.delta0));
    out.eta = std::min(constants.d_radius / (constants.g0 + eps), 1.0 / (2.0 * constants.l));
    out.tau = ceil_at_least_one((2.0 * nu / l0) * std::log(nu * d2 / l0));
    out.n = std::ceil(8.0 * d2 * d2 * std::log(2.0 / in.delta1));
    out.m_iters = std::ceil(9.0 * nu / (out.eta * eps * eps));
    out.k_prime = std::ceil(std::log(1.0 / in.gamma0) /
                            std::log(1.0 + in.zeta * l0 / (3.0 * in.j_bar - l0)));
    return out;
}

double nu_next(double j_hat, double zeta, double l0) {
    if (!(l0 > 0.0)) throw DomainError("l0 must be positive");
    if (!(zeta > 0.0 && zeta < 1.0)) throw DomainError("zeta must lie in (0, 1)");
    if (!(j_hat >= l0 / 2.0)) throw DomainError("cost estimate must be at least l0 / 2");
    return 8.0 * j_hat * j_hat * j_hat / ((1.0 - zeta) * l0 * l0);
}

double spectral_margin_bound(double cost, double l0) {
    if (!(l0 > 0.0)) throw DomainError("l0 must be positive");
    if (!(cost >= l0)) throw DomainError("cost must be at least l0");
    return std::sqrt(1.0 - l0 / cost);
}

}  // namespace sofpg
