"""Collective spin moments and the Kitagawa-Ueda squeezing parameter."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import UndefinedMeanDirection
from .linalg import eigvalsh
from .symstate import as_density


@lru_cache(maxsize=None)
def _spin_matrices(n_qubits):
    S = n_qubits / 2
    ms = np.arange(n_qubits + 1) - S
    # S+ |M> = sqrt(S(S+1) - M(M+1)) |M+1>, one row below the diagonal in M = -S..S order
    sp = np.diag(np.sqrt(S * (S + 1) - ms[:-1] * (ms[:-1] + 1)), -1).astype(complex)
    sx = 0.5 * (sp + sp.T)
    sy = -0.5j * (sp - sp.T)
    sz = np.diag(ms).astype(complex)
    for a in (sx, sy, sz):
        a.setflags(write=False)
    return sx, sy, sz


def spin_matrices(n_qubits):
    """Collective ``(S_x, S_y, S_z)`` on the Dicke basis of ``n_qubits`` qubits."""
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    return _spin_matrices(int(n_qubits))


@dataclass(frozen=True)
class CollectiveMoments:
    mean: np.ndarray
    covariance: np.ndarray  # symmetrized, Cov(S_a, S_b) = <{S_a, S_b}>/2 - <S_a><S_b>


def collective_moments(rho):
    rho = as_density(rho)
    ops = spin_matrices(rho.n_qubits)
    R = rho.matrix
    mean = np.array([np.trace(R @ a).real for a in ops])
    cov = np.empty((3, 3))
    for i, a in enumerate(ops):
        for j, b in enumerate(ops):
            cov[i, j] = 0.5 * np.trace(R @ (a @ b + b @ a)).real - mean[i] * mean[j]
    return CollectiveMoments(mean, cov)


def squeezing_xi2(rho):
    """Kitagawa-Ueda parameter: least transverse variance over ``S/2``.

    Values below 1 mean the state is spin squeezed. Raises
    UndefinedMeanDirection when ``|<S>| <= 1e-6``.
    """
    rho = as_density(rho)
    mom = collective_moments(rho)
    norm = np.linalg.norm(mom.mean)
    if norm <= 1e-6:
        raise UndefinedMeanDirection(f"|<S>| = {norm:.2e}; no mean spin direction")
    n0 = mom.mean / norm
    # orthonormal pair spanning the plane perpendicular to <S>
    helper = np.eye(3)[np.argmin(np.abs(n0))]
    e1 = np.cross(n0, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n0, e1)
    P = np.stack([e1, e2])
    block = P @ mom.covariance @ P.T
    return float(eigvalsh(block)[0] / (rho.spin / 2))
