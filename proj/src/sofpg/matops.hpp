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

#ifndef SOFPG_MATOPS_HPP
#define SOFPG_MATOPS_HPP

#include <Eigen/Dense>

#include <string_view>

namespace sofpg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Throws DimensionError unless `m` is non-empty, and DomainError if any
/// entry is NaN or infinite. `name` is used in the message.
void require_finite(const Matrix& m, std::string_view name);

void require_square(const Matrix& m, std::string_view name);

/// Largest eigenvalue modulus. Uses Hessenberg reduction followed by
/// shifted QR iteration on the real Schur form.
double spectral_radius(const Matrix& m);

double spectral_norm(const Matrix& m);

/// Solves P = S + gamma * Acl^T P Acl. Requires sqrt(gamma) * rho(Acl) < 1.
///
/// The series sum_t gamma^t (Acl^T)^t S Acl^t is accumulated by doubling:
/// with X_0 = S and M_0 = sqrt(gamma) Acl,
///   X_{k+1} = X_k + M_k^T X_k M_k,   M_{k+1} = M_k^2,
/// so X_k holds the first 2^k terms. The result is symmetrized and checked
/// against the equation residual before it is returned.
Matrix solve_dlyap_p(const Matrix& acl, const Matrix& s, double gamma);

/// Solves Sigma = I + gamma * Acl Sigma Acl^T.
Matrix solve_dlyap_sigma(const Matrix& acl, double gamma);

/// ||P - S - gamma Acl^T P Acl||_F.
double dlyap_residual(const Matrix& acl, const Matrix& s, double gamma,
                      const Matrix& p);

inline Matrix symmetrize(const Matrix& m) {
    return 0.5 * (m + m.transpose());
}

}  // namespace sofpg

#endif  // SOFPG_MATOPS_HPP
