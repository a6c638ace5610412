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

#include <gtest/gtest.h>

#include <cmath>

#include "sofpg/error.hpp"
#include "sofpg/matops.hpp"
#include "test_support.hpp"

namespace sofpg {
namespace {

TEST(SpectralRadius, DiagonalAndRotation) {
    Matrix d(3, 3);
    d << 0.5, 0, 0, 0, -2.5, 0, 0, 0, 1.0;
    EXPECT_NEAR(spectral_radius(d), 2.5, 1e-12);

    Matrix rot(2, 2);
    rot << 0.0, -1.2, 1.2, 0.0;
    EXPECT_NEAR(spectral_radius(rot), 1.2, 1e-12);
}

TEST(SpectralRadius, NumericalExamplePlant) {
    Matrix a(4, 4);
    a << 4.5, 2.8, 0, 0, 3, 2, 0, 0, 2, 0, 1.4, 0, 1.5, 0, 2, 0.4;
    // Reference from numpy.linalg.eigvals.
    EXPECT_NEAR(spectral_radius(a), 6.406342820417326, 1e-10);
    EXPECT_NEAR(1.0 / std::pow(spectral_radius(a), 2), 0.024365742464947934, 1e-12);
}

TEST(SpectralRadius, SimilarityInvariant) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix a = testing::random_matrix(rng, 5, 5);
        Matrix t = testing::random_matrix(rng, 5, 5) + 5.0 * Matrix::Identity(5, 5);
        const Matrix similar = t * a * t.inverse();
        EXPECT_NEAR(spectral_radius(a), spectral_radius(similar), 1e-8 * spectral_radius(a));
    }
}

TEST(SpectralRadius, RejectsBadInput) {
    EXPECT_THROW(spectral_radius(Matrix(2, 3)), DimensionError);
    Matrix nan_m = Matrix::Identity(2, 2);
    nan_m(0, 1) = std::nan("");
    EXPECT_THROW(spectral_radius(nan_m), DomainError);
}

TEST(Lyapunov, ScalarClosedForm) {
    const Matrix acl = Matrix::Constant(1, 1, 0.5);
    const Matrix s = Matrix::Identity(1, 1);
    EXPECT_NEAR(solve_dlyap_p(acl, s, 1.0)(0, 0), 4.0 / 3.0, 1e-14);
    // 1 / (1 - 0.2 * 4) for A = 2, gamma = 0.2.
    EXPECT_NEAR(solve_dlyap_p(Matrix::Constant(1, 1, 2.0), s, 0.2)(0, 0), 5.0, 1e-12);
}

TEST(Lyapunov, MatchesSeriesOnRandomInstances) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto inst = testing::random_stable_instance(seed);
        const Matrix acl = inst.plant.closed_loop(inst.gain);
        const Matrix s = inst.params.q;
        const Matrix p = solve_dlyap_p(acl, s, inst.gamma);
        // Damped radius <= 0.9, so 2000 terms leave < 1e-80 of the tail.
        const Matrix series = testing::lyapunov_series(acl, s, inst.gamma, 2000);
        EXPECT_LE((p - series).norm(), 1e-9 * series.norm()) << "seed " << seed;
        EXPECT_LE(dlyap_residual(acl, s, inst.gamma, p), 1e-9 * p.norm());
        EXPECT_LE((p - p.transpose()).norm(), 0.0);
    }
}

TEST(Lyapunov, SigmaIsDualAndDominatesIdentity) {
    const auto inst = testing::random_stable_instance(99, 4);
    const Matrix acl = inst.plant.closed_loop(inst.gain);
    const Matrix sigma = solve_dlyap_sigma(acl, inst.gamma);
    const auto n = acl.rows();
    const Matrix residual =
        sigma - Matrix::Identity(n, n) - inst.gamma * acl * sigma * acl.transpose();
    EXPECT_LE(residual.norm(), 1e-9 * sigma.norm());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma - Matrix::Identity(n, n));
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
}

TEST(Lyapunov, NearBoundaryStillConverges) {
    const Matrix acl = Matrix::Constant(1, 1, 0.999);
    const Matrix p = solve_dlyap_p(acl, Matrix::Identity(1, 1), 1.0);
    EXPECT_NEAR(p(0, 0), 1.0 / (1.0 - 0.999 * 0.999), 1e-6);
}

TEST(Lyapunov, UnstableIsRejected) {
    const Matrix acl = Matrix::Constant(1, 1, 2.0);
    EXPECT_THROW(solve_dlyap_p(acl, Matrix::Identity(1, 1), 0.25), InstabilityError);
    try {
        solve_dlyap_p(acl, Matrix::Identity(1, 1), 0.5);
        FAIL();
    } catch (const InstabilityError& e) {
        EXPECT_NEAR(e.damped_radius(), std::sqrt(0.5) * 2.0, 1e-12);
    }
}

TEST(Lyapunov, DomainAndShapeErrors) {
    const Matrix acl = Matrix::Constant(1, 1, 0.5);
    EXPECT_THROW(solve_dlyap_p(acl, Matrix::Identity(1, 1), 0.0), DomainError);
    EXPECT_THROW(solve_dlyap_p(acl, Matrix::Identity(1, 1), 1.5), DomainError);
    EXPECT_THROW(solve_dlyap_p(acl, Matrix::Identity(2, 2), 1.0), DimensionError);
}

TEST(SpectralNorm, LargestSingularValue) {
    Matrix m(2, 2);
    m << 3, 0, 4, 5;
    // Singular values of [[3,0],[4,5]] are sqrt(45) and sqrt(5).
    EXPECT_NEAR(spectral_norm(m), std::sqrt(45.0), 1e-12);
}

TEST(Lyapunov, ZeroClosedLoop) {
    std::mt19937_64 rng(3);
    const Matrix q = testing::random_spd(rng, 3);
    EXPECT_LE((solve_dlyap_p(Matrix::Zero(3, 3), q, 0.7) - q).norm(), 1e-15);
    EXPECT_LE((solve_dlyap_sigma(Matrix::Zero(3, 3), 0.7) - Matrix::Identity(3, 3)).norm(), 1e-15);
    EXPECT_NEAR(solve_dlyap_sigma(Matrix::Constant(1, 1, 0.5), 1.0)(0, 0), 4.0 / 3.0, 1e-14);
}

TEST(Lyapunov, TwoTraceExpressionsAgree) {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const auto inst = testing::random_stable_instance(seed);
        const Matrix acl = inst.plant.closed_loop(inst.gain);
        const Matrix& c = inst.plant.c();
        const Matrix s = inst.params.q + c.transpose() * inst.gain.transpose() * inst.params.r *
                                             inst.gain * c;
        const double via_p = solve_dlyap_p(acl, s, inst.gamma).trace();
        const double via_sigma = (s * solve_dlyap_sigma(acl, inst.gamma)).trace();
        EXPECT_NEAR(via_p, via_sigma, 1e-8 * via_p) << "seed " << seed;
    }
}

TEST(SpectralRadius, IdentityAndCartPole) {
    EXPECT_NEAR(spectral_radius(Matrix::Identity(4, 4)), 1.0, 1e-14);
    Matrix a(4, 4);
    a << 1, 0.02, 0.1, 0, 0, 1.05, 0, 0.1, 0, 0.41, 1, 0.02, 0, 1.02, 0, 1.05;
    const double rho = spectral_radius(a);
    EXPECT_NEAR(1.0 / (rho * rho), 0.533, 5e-4);
}

}  // namespace
}  // namespace sofpg
