"""Numerical kernel: Hermitian eigensolver, angular-momentum special functions
and sphere quadrature.

Every sign convention downstream hangs on the Condon-Shortley phase fixed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import sph_harm_y

from .errors import InvalidDegreeOrder, InvalidQuantumNumbers, NonHermitianInput

HERMITIAN_TOL = 1e-10


# ---------------------------------------------------------------------------
# log-factorial table
# ---------------------------------------------------------------------------

class _LogFactorials:
    """ln(n!) for n = 0..size-1, grown in place when a larger argument shows up."""

    def __init__(self, size=64):
        self._table = np.zeros(0)
        self._grow(size)

    def _grow(self, size):
        n = np.arange(1, size)
        self._table = np.concatenate(([0.0], np.cumsum(np.log(n))))

    def __call__(self, n):
        n = int(n)
        if n < 0:
            raise InvalidQuantumNumbers(f"factorial of negative integer {n}")
        if n >= self._table.size:
            self._grow(max(2 * self._table.size, n + 1))
        return self._table[n]


log_factorial = _LogFactorials()


def log_binom(n, k):
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k)


def _twice(x, name):
    """Return 2*x as an int, or raise if x is not a half-integer."""
    t = 2 * x
    it = int(round(t))
    if abs(t - it) > 1e-9:
        raise InvalidQuantumNumbers(f"{name}={x} is not a multiple of 1/2")
    return it


# ---------------------------------------------------------------------------
# dense Hermitian matrices
# ---------------------------------------------------------------------------

def hermiticity_deficit(a):
    """Largest entrywise deviation max |A - A^dagger|."""
    a = np.asarray(a)
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def eigh(a, tol=HERMITIAN_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    a : array_like, shape (d, d)
        Complex (or real) Hermitian matrix.
    tol : float
        Largest tolerated Hermiticity deficit.

    Returns
    -------
    eigenvalues : ndarray, shape (d,)
        Real, ascending.
    eigenvectors : ndarray, shape (d, d)
        Orthonormal columns, ``a @ v[:, i] == w[i] * v[:, i]``.

    Raises
    ------
    NonHermitianInput
        If ``max |a - a^dagger| > tol``.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise NonHermitianInput(f"expected a non-empty square matrix, got shape {a.shape}")
    deficit = hermiticity_deficit(a)
    if deficit > tol:
        raise NonHermitianInput(f"Hermiticity deficit {deficit:.3e} exceeds {tol:.1e}")
    # symmetrize so LAPACK sees an exactly Hermitian input
    return np.linalg.eigh(0.5 * (a + a.conj().T))


def eigvalsh(a, tol=HERMITIAN_TOL):
    return eigh(a, tol)[0]


# ---------------------------------------------------------------------------
# angular momentum
# ---------------------------------------------------------------------------

def clebsch_gordan(j1, m1, j2, m2, J, M):
    """Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M>, Condon-Shortley phase.

    Racah's single-sum formula evaluated in log space with explicit sign
    tracking. Arguments may be half-integers (floats or Fractions).
    """
    tj1, tm1 = _twice(j1, "j1"), _twice(m1, "m1")
    tj2, tm2 = _twice(j2, "j2"), _twice(m2, "m2")
    tJ, tM = _twice(J, "J"), _twice(M, "M")
    for tj, tm, name in ((tj1, tm1, "1"), (tj2, tm2, "2"), (tJ, tM, "")):
        if tj < 0 or abs(tm) > tj or (tj - tm) % 2:
            raise InvalidQuantumNumbers(f"inconsistent j{name}/m{name} pair ({tj / 2}, {tm / 2})")
    if tM != tm1 + tm2:
        return 0.0
    if tJ < abs(tj1 - tj2) or tJ > tj1 + tj2 or (tj1 + tj2 + tJ) % 2:
        return 0.0

    # all factorial arguments below are integers once halved
    a = (tJ + tj1 - tj2) // 2
    b = (tJ - tj1 + tj2) // 2
    c = (tj1 + tj2 - tJ) // 2
    d = (tj1 + tj2 + tJ) // 2 + 1
    pre = 0.5 * (
        math.log(tJ + 1)
        + log_factorial(a) + log_factorial(b) + log_factorial(c) - log_factorial(d)
        + log_factorial((tJ + tM) // 2) + log_factorial((tJ - tM) // 2)
        + log_factorial((tj1 - tm1) // 2) + log_factorial((tj1 + tm1) // 2)
        + log_factorial((tj2 - tm2) // 2) + log_factorial((tj2 + tm2) // 2)
    )

    e1 = c                          # j1 + j2 - J - k
    e2 = (tj1 - tm1) // 2           # j1 - m1 - k
    e3 = (tj2 + tm2) // 2           # j2 + m2 - k
    e4 = (tJ - tj2 + tm1) // 2      # J - j2 + m1 + k
    e5 = (tJ - tj1 - tm2) // 2      # J - j1 - m2 + k
    kmin = max(0, -e4, -e5)
    kmax = min(e1, e2, e3)
    if kmin > kmax:
        return 0.0

    logs, signs = [], []
    for k in range(kmin, kmax + 1):
        logs.append(-(log_factorial(k) + log_factorial(e1 - k) + log_factorial(e2 - k)
                      + log_factorial(e3 - k) + log_factorial(e4 + k) + log_factorial(e5 + k)))
        signs.append(-1.0 if k % 2 else 1.0)
    logs = np.array(logs) + pre
    top = logs.max()
    return float(math.exp(top) * np.sum(np.array(signs) * np.exp(logs - top)))


def ylm(K, Q, theta, phi):
    """Spherical harmonic Y_KQ(theta, phi) with the Condon-Shortley phase.

    ``theta`` is the polar angle. Accepts scalars or broadcastable arrays.
    """
    if int(K) != K or int(Q) != Q or K < 0 or abs(Q) > K:
        raise InvalidDegreeOrder(f"invalid (K, Q) = ({K}, {Q})")
    return sph_harm_y(int(K), int(Q), theta, phi)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre rule on cos(theta) in [-1, 1]; weights sum to 2."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, f):
        return float(np.sum(self.weights * f(self.nodes)))


def gauss_legendre(n):
    """n-point Gauss-Legendre rule, exact for polynomials up to degree 2n-1."""
    if int(n) != n or n < 1:
        raise ValueError(f"quadrature order must be a positive integer, got {n}")
    nodes, weights = np.polynomial.legendre.leggauss(int(n))
    return QuadratureRule(int(n), nodes, weights)
