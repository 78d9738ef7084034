"""Band-limited spin P function.

The map ``P -> integral dOmega P(theta, phi) |theta,phi><theta,phi|`` is diagonal
on multipole tensors: a harmonic of degree K goes to ``lambda_K T_KQ``. The
canonical P of a state is therefore ``sum_KQ rho_KQ / lambda_K * Y_KQ`` with
K <= N; higher harmonics lie in the kernel and are left out.

Harmonics are evaluated at the Bloch direction of ``|theta, phi>``, i.e. at
polar angle ``pi - theta``. With the raw label angle the diagonal map picks up
a ``(-1)^(K+Q)`` sign and lambda_K stops being Q-independent.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize
from scipy.special import sph_harm_y

from .errors import InternalInconsistency, InvalidDegreeOrder, QuadratureTooCoarse
from .linalg import clebsch_gordan, gauss_legendre
from .symstate import Direction, as_density, scs_matrix

MAX_INVERSE_RESIDUAL = 1e-9


def kq_labels(n_qubits):
    return [(K, Q) for K in range(n_qubits + 1) for Q in range(-K, K + 1)]


# ---------------------------------------------------------------------------
# multipole tensors
# ---------------------------------------------------------------------------

def multipole_tensor(n_qubits, K, Q):
    """Irreducible tensor ``T_KQ`` on the spin-N/2 space.

    ``(T_KQ)_{M'M} = <S M; K Q | S M'> sqrt((2K+1)/(2S+1))``, orthonormal under
    the Hilbert-Schmidt inner product.
    """
    if int(K) != K or int(Q) != Q or not 0 <= K <= n_qubits or abs(Q) > K:
        raise InvalidDegreeOrder(f"(K, Q) = ({K}, {Q}) invalid for N={n_qubits}")
    return _multipole_basis(n_qubits)[kq_labels(n_qubits).index((K, Q))].copy()


@lru_cache(maxsize=None)
def _multipole_basis(n_qubits):
    S = n_qubits / 2
    d = n_qubits + 1
    ms = np.arange(d) - S
    basis = np.zeros(((n_qubits + 1) ** 2, d, d))
    for idx, (K, Q) in enumerate(kq_labels(n_qubits)):
        norm = np.sqrt((2 * K + 1) / d)
        for j, M in enumerate(ms):
            i = j + Q  # M' = M + Q
            if 0 <= i < d:
                basis[idx, i, j] = clebsch_gordan(S, M, K, Q, S, ms[i]) * norm
    basis.setflags(write=False)
    return basis


@dataclass(frozen=True)
class MultipoleCoords:
    """Coordinates ``rho_KQ = Tr[rho T_KQ^dagger]`` in :func:`kq_labels` order."""

    n_qubits: int
    coords: np.ndarray = field(repr=False)

    def __getitem__(self, kq):
        K, Q = kq
        return self.coords[K * K + K + Q]

    def reconstruct(self):
        return np.tensordot(self.coords, _multipole_basis(self.n_qubits), axes=1)


def state_multipoles(rho):
    rho = as_density(rho)
    T = _multipole_basis(rho.n_qubits)
    # T is real, so Tr[rho T^dagger] = sum_ij rho_ij T_ij
    return MultipoleCoords(rho.n_qubits, np.einsum("kij,ij->k", T, rho.matrix))


# ---------------------------------------------------------------------------
# grids and harmonics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SphereGrid:
    """Product grid: Gauss-Legendre in cos(theta) times uniform phi.

    Weights integrate ``dOmega`` and sum to 4 pi.
    """

    theta_order: int
    n_phi: int
    theta: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    weight: np.ndarray = field(repr=False)

    def __len__(self):
        return self.theta.size


def sphere_grid(theta_order, n_phi):
    rule = gauss_legendre(theta_order)
    theta = np.arccos(rule.nodes)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    tt, pp = np.meshgrid(theta, phi, indexing="ij")
    ww = np.outer(rule.weights, np.full(n_phi, 2 * np.pi / n_phi))
    return SphereGrid(theta_order, n_phi, tt.ravel(), pp.ravel(), ww.ravel())


def default_grid(n_qubits, density=1):
    return sphere_grid(density * (2 * n_qubits + 2), density * (4 * n_qubits + 4))


def _check_exact(n_qubits, theta_order, n_phi):
    if theta_order < n_qubits + 1 or n_phi < 2 * n_qubits + 2:
        raise QuadratureTooCoarse(
            f"grid ({theta_order} x {n_phi}) too coarse for N={n_qubits}; "
            f"need >= {n_qubits + 1} x {2 * n_qubits + 2}")


def harmonic_matrix(n_qubits, theta, phi):
    """``Y_KQ`` at the Bloch directions of ``|theta, phi>``, shape (G, (N+1)^2)."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    labels = np.array(kq_labels(n_qubits))
    return sph_harm_y(labels[None, :, 0], labels[None, :, 1], np.pi - theta[:, None], phi[:, None])


# ---------------------------------------------------------------------------
# calibration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LambdaTable:
    """Eigenvalues ``lambda_K`` of the diagonal map, K = 0..N."""

    n_qubits: int
    values: np.ndarray = field(repr=False)
    q_spread: float = 0.0  # worst |lambda_K(Q) - lambda_K(Q')| seen during calibration

    def per_label(self):
        return np.array([self.values[K] for K, _ in kq_labels(self.n_qubits)])


def calibrate_lambda(n_qubits, quadrature_order=None, n_phi=None):
    """Compute ``lambda_K`` by quadrature and certify Q-independence.

    Every ``(K, Q)`` image ``integral Y_KQ |theta,phi><theta,phi| dOmega`` is
    projected on ``T_KQ``; the spread across Q must stay below 1e-8.
    """
    order = 2 * n_qubits + 2 if quadrature_order is None else int(quadrature_order)
    n_phi = 4 * n_qubits + 4 if n_phi is None else int(n_phi)
    return _calibrate(n_qubits, order, n_phi)


@lru_cache(maxsize=64)
def _calibrate(n_qubits, order, n_phi):
    _check_exact(n_qubits, order, n_phi)
    grid = sphere_grid(order, n_phi)
    V = scs_matrix(n_qubits, grid.theta, grid.phi)                 # (d, G)
    Y = harmonic_matrix(n_qubits, grid.theta, grid.phi)             # (G, L)
    T = _multipole_basis(n_qubits)                                  # (L, d, d)
    # lam[l] = sum_g w_g Y_l(g) <g| T_l^dagger |g>, T real
    expect = np.einsum("ig,lji,jg->lg", V.conj(), T, V)
    lam = np.einsum("g,gl,lg->l", grid.weight, Y, expect)
    values = np.zeros(n_qubits + 1)
    spread = 0.0
    for K in range(n_qubits + 1):
        block = lam[K * K: (K + 1) * (K + 1)]
        spread = max(spread, float(np.ptp(block.real)), float(np.max(np.abs(block.imag))))
        values[K] = block.real.mean()
    if spread > 1e-8:
        raise QuadratureTooCoarse(f"lambda_K depends on Q (spread {spread:.2e}) at N={n_qubits}")
    if np.any(values <= 0):
        raise QuadratureTooCoarse(f"non-positive lambda_K {values}")
    values.setflags(write=False)
    return LambdaTable(n_qubits, values, spread)


# ---------------------------------------------------------------------------
# P evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PFuncTable:
    grid: SphereGrid
    values: np.ndarray = field(repr=False)

    @property
    def integral(self):
        return float(np.sum(self.grid.weight * self.values))

    def argmin(self):
        i = int(np.argmin(self.values))
        return float(self.values[i]), Direction.canonical(self.grid.theta[i], self.grid.phi[i])


def p_coefficients(rho, lam=None):
    """Harmonic coefficients ``rho_KQ / lambda_K`` of the canonical P."""
    rho = as_density(rho)
    lam = calibrate_lambda(rho.n_qubits) if lam is None else lam
    return state_multipoles(rho).coords / lam.per_label()


def p_values(rho, theta, phi, lam=None):
    """Evaluate the canonical P of ``rho`` at arbitrary label angles."""
    rho = as_density(rho)
    c = p_coefficients(rho, lam)
    vals = harmonic_matrix(rho.n_qubits, theta, phi) @ c
    imag = float(np.max(np.abs(vals.imag))) if vals.size else 0.0
    if imag > 1e-10:
        raise InternalInconsistency(f"P has imaginary part {imag:.2e}")
    return vals.real


def pfunc(rho, grid=None):
    """Canonical band-limited P sampled on ``grid`` (default: :func:`default_grid`)."""
    rho = as_density(rho)
    grid = default_grid(rho.n_qubits) if grid is None else grid
    _check_exact(rho.n_qubits, grid.theta_order, grid.n_phi)
    return PFuncTable(grid, p_values(rho, grid.theta, grid.phi))


def verify_inverse(rho, grid=None):
    """Max-entry residual of ``rho - sum_g w_g P(g) |g><g|``."""
    rho = as_density(rho)
    table = pfunc(rho, grid)
    V = scs_matrix(rho.n_qubits, table.grid.theta, table.grid.phi)
    rebuilt = (V * (table.grid.weight * table.values)) @ V.conj().T
    return float(np.max(np.abs(rho.matrix - rebuilt)))


def adaptive_grid(rho, tol=MAX_INVERSE_RESIDUAL, max_doublings=4):
    """Default grid, doubled until :func:`verify_inverse` falls below ``tol``."""
    rho = as_density(rho)
    for level in range(max_doublings + 1):
        grid = default_grid(rho.n_qubits, 2 ** level)
        if verify_inverse(rho, grid) < tol:
            return grid
    raise QuadratureTooCoarse(f"inverse residual stays above {tol} after {max_doublings} doublings")


def _parabola_vertex(x, y):
    """Abscissa of the parabola through three points (non-uniform spacing)."""
    (x0, x1, x2), (y0, y1, y2) = x, y
    den = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den
    b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den
    return x1 if a <= 0 else -b / (2 * a)


def p_min(rho, grid_density=1):
    """Minimum of the canonical P and where it is attained.

    Diagnostic only: a classical state can have negative band-limited P (a pure
    qubit reaches -1/(2 pi)). Classicality verdicts come from
    :func:`symsep.separability.certify`.

    The grid minimum is refined by 3-point parabolic interpolation along theta
    and phi, then polished with a bounded quasi-Newton step. Poles are always
    candidates since Gauss-Legendre nodes never reach them.
    """
    rho = as_density(rho)
    n = rho.n_qubits
    lam = calibrate_lambda(n)
    grid = default_grid(n, grid_density)
    vals = p_values(rho, grid.theta, grid.phi, lam).reshape(grid.theta_order, grid.n_phi)
    thetas = grid.theta.reshape(grid.theta_order, grid.n_phi)[:, 0]
    phis = grid.phi[: grid.n_phi]
    i, j = np.unravel_index(np.argmin(vals), vals.shape)

    t0, p0 = thetas[i], phis[j]
    if 0 < i < thetas.size - 1:
        t0 = _parabola_vertex(thetas[i - 1: i + 2], vals[i - 1: i + 2, j])
    jj = [(j - 1) % grid.n_phi, j, (j + 1) % grid.n_phi]
    step = 2 * np.pi / grid.n_phi
    p0 = _parabola_vertex(np.array([phis[j] - step, phis[j], phis[j] + step]), vals[i, jj])

    def f(x):
        return float(p_values(rho, x[0], x[1], lam)[0])

    starts = [(float(np.clip(t0, 0, np.pi)), float(p0)), (thetas[i], phis[j]), (0.0, 0.0), (np.pi, 0.0)]
    best = min(((f(s), s) for s in starts), key=lambda r: r[0])
    res = minimize(f, np.array(best[1]), method="L-BFGS-B",
                   bounds=[(0.0, np.pi), (None, None)], options={"ftol": 1e-15, "gtol": 1e-12})
    value, x = (res.fun, res.x) if res.fun < best[0] else best
    return float(value), Direction.canonical(x[0], x[1])


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def write_grid_csv(table, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["theta", "phi", "weight", "p_value"])
        g = table.grid
        for row in zip(g.theta, g.phi, g.weight, table.values):
            writer.writerow([f"{x:.17g}" for x in row])
