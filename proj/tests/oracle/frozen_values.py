# Copyright 2026 The sofpg Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent reference values frozen into the C++ tests.

Run with `python3 tests/oracle/frozen_values.py`. Uses scipy's Lyapunov
solver and central finite differences for costs and gradients, and mpmath at
50 digits for the schedule arithmetic.
"""
import mpmath as mp
import numpy as np
import scipy.linalg as sl

mp.mp.dps = 50


def lqr(A, B, C, Q, R, K, g):
    Acl = A - B @ K @ C
    S = Q + C.T @ K.T @ R @ K @ C
    P = sl.solve_discrete_lyapunov(np.sqrt(g) * Acl.T, S)
    Sig = sl.solve_discrete_lyapunov(np.sqrt(g) * Acl, np.eye(A.shape[0]))
    return P, Sig


def cost(A, B, C, Q, R, K, g):
    return np.trace(lqr(A, B, C, Q, R, K, g)[0])


def fd_grad(A, B, C, Q, R, K, g, h=1e-6):
    G = np.zeros_like(K)
    for i in range(K.shape[0]):
        for j in range(K.shape[1]):
            E = np.zeros_like(K)
            E[i, j] = h
            G[i, j] = (cost(A, B, C, Q, R, K + E, g) - cost(A, B, C, Q, R, K - E, g)) / (2 * h)
    return G


def schedule(l0, l1, psi, phi, d, nu, m, p, eps, delta0, delta1, zeta, gamma0, jbar):
    l0, l1, psi, phi, d, nu = map(mp.mpf, (l0, l1, psi, phi, d, nu))
    eps, delta0, delta1, zeta, gamma0, jbar = map(mp.mpf, (eps, delta0, delta1, zeta, gamma0, jbar))
    kappa = mp.sqrt(nu / l0)
    rm = mp.sqrt(min(m, p))
    D = 1 / (8 * kappa**3 * psi * phi)
    G = 16 * kappa**9 * l1 * psi * phi
    L = 104 * kappa**10 * l1 * psi**2 * phi * rm
    G0 = 2 * kappa**3 * phi * (l1 + psi * nu) * rm
    r = min(D, nu / G, eps / (9 * L))
    tau_e = max(1, mp.ceil(2 * nu / l0 * mp.log(36 * d**2 * nu**2 * m * p / (r * eps * l0))))
    n_e = mp.ceil(81 * (m * p * G) ** 2 * (d**2 + 1) ** 2 / eps**2 * mp.log(15 / delta0))
    eta = min(D / (G0 + eps), 1 / (2 * L))
    tau = max(1, mp.ceil(2 * nu / l0 * mp.log(nu * d**2 / l0)))
    n = mp.ceil(8 * d**4 * mp.log(2 / delta1))
    m_iters = mp.ceil(9 * nu / (eta * eps**2))
    k_prime = mp.ceil(mp.log(1 / gamma0) / mp.log(1 + zeta * l0 / (3 * jbar - l0)))
    return dict(kappa=kappa, varrho=1 / (2 * kappa**2), D=D, G=G, L=L, G0=G0, r=r, tau_e=tau_e,
                n_e=n_e, eta=eta, tau=tau, n=n, m_iters=m_iters, k_prime=k_prime)


def main():
    print("# scalar A=0.5, B=C=Q=R=1, gamma=1, K=0")
    one = np.eye(1)
    A = np.array([[0.5]])
    print(cost(A, one, one, one, one, np.zeros((1, 1)), 1.0), fd_grad(A, one, one, one, one, np.zeros((1, 1)), 1.0))

    print("# fixed 3-state instance")
    A = np.array([[1.1, 0.3, 0.0], [0.0, 0.8, 0.4], [0.2, 0.0, 0.9]])
    B = np.array([[1.0, 0.0], [0.5, 1.0], [0.0, 0.3]])
    C = np.array([[1.0, 0.0, 0.5], [0.0, 1.0, 0.0]])
    Q = np.diag([1.0, 2.0, 1.5])
    R = np.array([[1.0, 0.1], [0.1, 2.0]])
    K = np.array([[0.4, 0.1], [-0.1, 0.3]])
    g = 0.9
    P, Sig = lqr(A, B, C, Q, R, K, g)
    print("rho", max(abs(np.linalg.eigvals(A - B @ K @ C))))
    print("cost", repr(np.trace(P)))
    print("P", repr(P))
    print("Sigma", repr(Sig))
    print("grad_fd", repr(fd_grad(A, B, C, Q, R, K, g)))

    print("# spectral radii")
    Ane = np.array([[4.5, 2.8, 0, 0], [3, 2, 0, 0], [2, 0, 1.4, 0], [1.5, 0, 2, 0.4]])
    Acp = np.array([[1, 0.02, 0.1, 0], [0, 1.05, 0, 0.1], [0, -0.08, 1, 0.0], [0, 1.02, 0, 1.05]])
    for name, M in (("numerical", Ane),):
        rho = max(abs(np.linalg.eigvals(M)))
        print(name, repr(rho), repr(1 / rho**2))

    print("# schedule tuples")
    tuples = [
        dict(l0=1, l1=1, psi=1, phi=1, d=1, nu=4, m=1, p=1, eps=1, delta0=0.01, delta1=0.1,
             zeta=0.5, gamma0=0.1, jbar=4),
        dict(l0=1, l1=2, psi=1, phi=1, d=2, nu=4, m=1, p=2, eps=0.5, delta0=0.05, delta1=0.5,
             zeta=0.9, gamma0=0.01, jbar=10),
        dict(l0=0.5, l1=3, psi=1.5, phi=1.25, d=3, nu=20, m=2, p=3, eps=2, delta0=0.06,
             delta1=0.2, zeta=0.25, gamma0=0.05, jbar=25),
    ]
    for t in tuples:
        print(t)
        for k, v in schedule(**t).items():
            print("  ", k, mp.nstr(v, 20))


if __name__ == "__main__":
    main()
