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

#include "sofpg/matops.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <string>

#include "sofpg/error.hpp"

namespace sofpg {

namespace {

// Stop once the newest block of terms is below this fraction of the sum.
constexpr double kDoublingTolerance = 1e-12;
constexpr double kResidualTolerance = 1e-9;
// 2^64 effective terms; only reached when sqrt(gamma) rho is within
// round-off of one.
constexpr int kMaxDoublings = 64;

}  // namespace

void require_finite(const Matrix& m, std::string_view name) {
    if (m.rows() < 1 || m.cols() < 1) {
        throw DimensionError(std::string(name) + " must have at least one row and column");
    }
    if (!m.allFinite()) {
        throw DomainError(std::string(name) + " has non-finite entries");
    }
}

void require_square(const Matrix& m, std::string_view name) {
    if (m.rows() != m.cols()) {
        throw DimensionError(std::string(name) + " must be square, got " +
                             std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
}

double spectral_radius(const Matrix& m) {
    require_square(m, "spectral_radius input");
    require_finite(m, "spectral_radius input");
    if (m.rows() == 1) return std::abs(m(0, 0));

    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        // RealSchur's default budget is 40 sweeps per row.
        throw NumericalError("eigenvalue iteration did not converge",
                             static_cast<std::size_t>(40 * m.rows()));
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const Matrix& m) {
    require_finite(m, "spectral_norm input");
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
}

double dlyap_residual(const Matrix& acl, const Matrix& s, double gamma,
                      const Matrix& p) {
    return (p - s - gamma * acl.transpose() * p * acl).norm();
}

Matrix solve_dlyap_p(const Matrix& acl, const Matrix& s, double gamma) {
    require_square(acl, "Acl");
    require_square(s, "S");
    if (acl.rows() != s.rows()) {
        throw DimensionError("Acl and S must have the same dimension");
    }
    require_finite(acl, "Acl");
    require_finite(s, "S");
    if (!(gamma > 0.0 && gamma <= 1.0)) {
        throw DomainError("discount factor must lie in (0, 1], got " + std::to_string(gamma));
    }

    const double damped = std::sqrt(gamma) * spectral_radius(acl);
    if (damped >= 1.0) {
        throw InstabilityError("sqrt(gamma) * rho(Acl) = " + std::to_string(damped) +
                                   " >= 1, no Lyapunov solution",
                               damped);
    }

    Matrix x = symmetrize(s);
    Matrix mk = std::sqrt(gamma) * acl;
    int k = 0;
    for (; k < kMaxDoublings; ++k) {
        Matrix increment = mk.transpose() * x * mk;
        x += increment;
        const double scale = x.norm();
        if (!x.allFinite()) break;
        if (increment.norm() <= kDoublingTolerance * scale) {
            ++k;
            break;
        }
        mk = mk * mk;
    }

    x = symmetrize(x);
    const double residual = dlyap_residual(acl, s, gamma, x);
    if (!x.allFinite() || residual > kResidualTolerance * x.norm()) {
        throw NumericalError("Lyapunov doubling did not reach residual tolerance (residual " +
                                 std::to_string(residual) + ")",
                             static_cast<std::size_t>(k));
    }
    return x;
}

Matrix solve_dlyap_sigma(const Matrix& acl, double gamma) {
    require_square(acl, "Acl");
    const Matrix identity = Matrix::Identity(acl.rows(), acl.cols());
    return solve_dlyap_p(acl.transpose(), identity, gamma);
}

}  // namespace sofpg
