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

#ifndef SOFPG_ORACLE_HPP
#define SOFPG_ORACLE_HPP

#include <cstddef>

#include "sofpg/matops.hpp"
#include "sofpg/plant.hpp"

// White-box quantities computed from the true system matrices. Nothing in
// the learner's update path may call into this header; tests, the CLI
// `oracle`/`schedule` commands and oracle trace logging do.

namespace sofpg {

struct LyapunovSolution {
    Matrix p;      // P = S + gamma Acl^T P Acl, S = Q + C^T K^T R K C
    Matrix sigma;  // Sigma = I + gamma Acl Sigma Acl^T
    Matrix e;      // (R + gamma B^T P B) K C - gamma B^T P A
    double cost = 0.0;
    Matrix grad;   // 2 E Sigma C^T
};

/// Cost matrices plus the known bounds l0 I <= Q, R <= l1 I, ||B|| <= psi,
/// ||C|| <= phi and the initial-state norm bound d.
struct CostParams {
    Matrix q;
    Matrix r;
    double l0 = 1.0;
    double l1 = 1.0;
    double psi = 1.0;
    double phi = 1.0;
    double d = 1.0;

    /// Domain checks on the scalars and the eigenvalue sandwich on Q, R.
    void validate() const;

    /// Tightest l0, l1 from the eigenvalues of Q and R and psi, phi as
    /// max(1, ||B||), max(1, ||C||).
    static CostParams from_plant(const Plant& plant, Matrix q, Matrix r, double d);
};

struct TheoryConstants {
    double nu = 0.0;
    double kappa = 0.0;
    double varrho = 0.0;
    double d_radius = 0.0;  // D
    double g = 0.0;         // G
    double l = 0.0;         // L
    double g0 = 0.0;        // G0
};

struct ScheduleInputs {
    double eps = 1.0;
    double delta0 = 0.01;
    double delta1 = 0.1;
    double zeta = 0.5;
    double gamma0 = 0.1;
    double j_bar = 0.0;
};

/// Theory-prescribed parameters. Count-valued fields are rounded up and held
/// as doubles because the gradient sample count easily exceeds 2^64.
struct ScheduleReport {
    double nu = 0.0;
    double r = 0.0;
    double tau_e = 0.0;
    double n_e = 0.0;
    double eta = 0.0;
    double tau = 0.0;
    double n = 0.0;
    double m_iters = 0.0;  // M = ceil(9 nu / (eta eps^2))
    double k_prime = 0.0;
};

LyapunovSolution exact_solution(const Plant& plant, const CostParams& params,
                                const Matrix& gain, double gamma);

/// J_gamma(K), or +inf when sqrt(gamma) rho(A - BKC) >= 1.
double exact_cost_or_inf(const Plant& plant, const CostParams& params, const Matrix& gain,
                         double gamma);

/// Exact per-initial-state cost x0^T P x0.
double exact_cost_from(const LyapunovSolution& sol, const Vector& x0);

TheoryConstants theory_constants(const CostParams& params, double nu, std::size_t m,
                                 std::size_t p);

ScheduleReport schedule(const CostParams& params, const TheoryConstants& constants,
                        const ScheduleInputs& inputs, std::size_t m, std::size_t p);

/// 8 J_hat^3 / ((1 - zeta) l0^2).
double nu_next(double j_hat, double zeta, double l0);

/// sqrt(1 - l0 / cost): certified bound on sqrt(gamma) rho(A - BKC).
double spectral_margin_bound(double cost, double l0);

}  // namespace sofpg

#endif  // SOFPG_ORACLE_HPP
