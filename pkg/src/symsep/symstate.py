"""Symmetric (Dicke) subspace state model.

Conventions
-----------
* Dicke index ``i = M + S = k`` runs over ``0..N``; ``k`` counts qubits in
  ``|0>`` ("spin up"), so ``|1>^{(x)N} = |S, -S>`` sits at index 0.
* Single-qubit product basis is ``(|0>, |1>)`` with ``sigma_z = diag(1, -1)``.
* ``|theta, phi>`` has amplitudes
  ``sqrt(C(2S, S+M)) cos^{S-M}(theta/2) sin^{S+M}(theta/2) exp(-i (S+M) phi)``,
  i.e. theta = 0 is ``|S, -S>``. Its Bloch direction is
  ``(sin t cos p, sin t sin p, -cos t)``.
* Rotations are active zyz: ``D_{M'M} = exp(-i M' a) d_{M'M}(b) exp(-i M g)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, log, sqrt

import numpy as np

from .errors import (
    BlochOutOfBall,
    IndexOutOfRange,
    InvalidQuantumNumbers,
    InvalidRank,
    InvalidState,
    OversizeEmbedding,
)
from .linalg import eigvalsh, hermiticity_deficit, log_factorial

MAX_EMBED_QUBITS = 10
TWO_PI = 2.0 * np.pi


def _frozen(a, dtype=complex):
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Direction:
    """Point on the sphere labelling a spin coherent state.

    Use :meth:`canonical` to fold arbitrary angles into ``theta in [0, pi]``,
    ``phi in [0, 2 pi)``.
    """

    theta: float
    phi: float

    def __post_init__(self):
        if not (0.0 <= self.theta <= np.pi) or not (0.0 <= self.phi < TWO_PI):
            raise ValueError(f"direction ({self.theta}, {self.phi}) outside [0,pi]x[0,2pi)")

    @classmethod
    def canonical(cls, theta, phi):
        theta = float(np.mod(theta, TWO_PI))
        if theta > np.pi:
            theta, phi = TWO_PI - theta, phi + np.pi
        phi = float(np.mod(phi, TWO_PI))
        if phi >= TWO_PI:  # mod can round up to 2 pi
            phi = 0.0
        return cls(min(theta, np.pi), phi)

    @classmethod
    def from_bloch(cls, vec):
        """Label whose coherent state has Bloch direction ``vec``."""
        v = np.asarray(vec, dtype=float)
        r = np.linalg.norm(v)
        if r == 0:
            raise ValueError("zero vector has no direction")
        # atan2 keeps full precision near the poles, where arccos does not
        theta = float(np.arctan2(np.hypot(v[0], v[1]), -v[2]))
        return cls.canonical(theta, np.arctan2(v[1], v[0]))

    @property
    def bloch(self):
        return bloch_direction(self.theta, self.phi)


def bloch_direction(theta, phi):
    """Bloch (spin) direction carried by ``|theta, phi>``; broadcasts."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), -np.cos(theta)], axis=-1)


@dataclass(frozen=True)
class DickeVector:
    """Pure symmetric N-qubit state, amplitudes ordered M = -S..S."""

    n_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if self.n_qubits < 1 or amps.shape != (self.n_qubits + 1,):
            raise InvalidState(f"need {self.n_qubits + 1} amplitudes for N={self.n_qubits}, got {amps.shape}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-12:
            raise InvalidState(f"amplitudes have squared norm {norm!r}, expected 1")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def spin(self):
        return self.n_qubits / 2

    def density(self):
        return SymDensity(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True)
class SymDensity:
    """Density matrix on the symmetric subspace, Dicke basis M = -S..S."""

    n_qubits: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = _frozen(self.matrix)
        d = self.n_qubits + 1
        if self.n_qubits < 1 or rho.shape != (d, d):
            raise InvalidState(f"need a {d}x{d} matrix for N={self.n_qubits}, got {rho.shape}")
        deficit = hermiticity_deficit(rho)
        if deficit > 1e-10:
            raise InvalidState(f"matrix not Hermitian (deficit {deficit:.3e})")
        tr = np.trace(rho)
        if abs(tr - 1.0) > 1e-12:
            raise InvalidState(f"trace {tr!r} differs from 1")
        lo = eigvalsh(rho)[0]
        if lo < -1e-10:
            raise InvalidState(f"matrix not positive semidefinite (min eigenvalue {lo:.3e})")
        object.__setattr__(self, "matrix", rho)

    @property
    def spin(self):
        return self.n_qubits / 2

    @property
    def dim(self):
        return self.n_qubits + 1

    def purity(self):
        return float(np.real(np.sum(self.matrix * self.matrix.T)))

    def density(self):
        return self


def as_density(state):
    """Promote a DickeVector to a SymDensity; pass SymDensity through."""
    if isinstance(state, DickeVector):
        return state.density()
    if isinstance(state, SymDensity):
        return state
    raise TypeError(f"expected DickeVector or SymDensity, got {type(state).__name__}")


# ---------------------------------------------------------------------------
# coherent states and rotations
# ---------------------------------------------------------------------------

def _scs_array(n, theta, phi):
    k = np.arange(n + 1)
    mag = np.array([sqrt(comb(n, int(i))) for i in k])
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return mag * c ** (n - k) * s ** k * np.exp(-1j * k * phi)


def scs_amplitudes(n_qubits, direction):
    """Spin coherent state ``|theta, phi>`` of ``n_qubits`` qubits.

    ``direction`` may be a :class:`Direction` or a ``(theta, phi)`` pair.
    """
    if n_qubits < 1:
        raise ValueError("n_qubits must be >= 1")
    theta, phi = (direction.theta, direction.phi) if isinstance(direction, Direction) else direction
    amps = _scs_array(n_qubits, float(theta), float(phi))
    return DickeVector(n_qubits, amps / np.linalg.norm(amps))


def scs_matrix(n_qubits, theta, phi):
    """Columns are coherent-state amplitude vectors for arrays of angles.

    Returns shape ``(n_qubits + 1, len(theta))``; no validation, used in hot loops.
    """
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    k = np.arange(n_qubits + 1)[:, None]
    logmag = np.array([0.5 * (log_factorial(n_qubits) - log_factorial(i) - log_factorial(n_qubits - i))
                       for i in range(n_qubits + 1)])[:, None]
    c, s = np.cos(theta / 2)[None, :], np.sin(theta / 2)[None, :]
    return np.exp(logmag) * c ** (n_qubits - k) * s ** k * np.exp(-1j * k * phi[None, :])


def _check_m(S, M, name):
    tS, tM = round(2 * S), round(2 * M)
    if abs(2 * S - tS) > 1e-9 or abs(2 * M - tM) > 1e-9 or tS < 0 or abs(tM) > tS or (tS - tM) % 2:
        raise InvalidQuantumNumbers(f"{name}={M} incompatible with S={S}")
    return tS, tM


def wigner_small_d(S, M, Mp, theta):
    """Wigner small-d element ``d^S_{M, Mp}(theta)`` (row M, column Mp)."""
    tS, tM = _check_m(S, M, "M")
    _, tMp = _check_m(S, Mp, "Mp")
    j_plus_m, j_minus_m = (tS + tM) // 2, (tS - tM) // 2      # row
    j_plus_n, j_minus_n = (tS + tMp) // 2, (tS - tMp) // 2    # column
    delta = (tM - tMp) // 2
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    pre = 0.5 * (log_factorial(j_plus_m) + log_factorial(j_minus_m)
                 + log_factorial(j_plus_n) + log_factorial(j_minus_n))
    total = 0.0
    for k in range(max(0, -delta), min(j_plus_n, j_minus_m) + 1):
        logc = pre - (log_factorial(j_plus_n - k) + log_factorial(k)
                      + log_factorial(j_minus_m - k) + log_factorial(k + delta))
        sign = -1.0 if (k + delta) % 2 else 1.0
        total += sign * np.exp(logc) * c ** (tS - delta - 2 * k) * s ** (2 * k + delta)
    return float(total)


def wigner_small_d_matrix(n_qubits, theta):
    S = n_qubits / 2
    ms = np.arange(n_qubits + 1) - S
    return np.array([[wigner_small_d(S, m, mp, theta) for mp in ms] for m in ms])


def wigner_D_matrix(n_qubits, alpha, beta, gamma):
    ms = np.arange(n_qubits + 1) - n_qubits / 2
    d = wigner_small_d_matrix(n_qubits, beta)
    return np.exp(-1j * ms * alpha)[:, None] * d * np.exp(-1j * ms * gamma)[None, :]


def rotate(state, alpha, beta, gamma):
    """Apply the zyz Euler rotation ``D(alpha, beta, gamma)``; returns the same type."""
    D = wigner_D_matrix(state.n_qubits, alpha, beta, gamma)
    if isinstance(state, DickeVector):
        amps = D @ state.amplitudes
        return DickeVector(state.n_qubits, amps / np.linalg.norm(amps))
    if isinstance(state, SymDensity):
        rho = D @ state.matrix @ D.conj().T
        return SymDensity(state.n_qubits, _renormalize(rho))
    raise TypeError(f"cannot rotate {type(state).__name__}")


def rotation_matrix(alpha, beta, gamma):
    """SO(3) matrix acting on Bloch vectors for the same zyz Euler angles."""
    def rz(a):
        return np.array([[np.cos(a), -np.sin(a), 0], [np.sin(a), np.cos(a), 0], [0, 0, 1]])

    def ry(b):
        return np.array([[np.cos(b), 0, np.sin(b)], [0, 1, 0], [-np.sin(b), 0, np.cos(b)]])

    return rz(alpha) @ ry(beta) @ rz(gamma)


def _renormalize(rho):
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def dicke_state(n_qubits, k):
    """``|S, M = k - S>``: the Dicke state with ``k`` qubits up."""
    if not 0 <= k <= n_qubits:
        raise IndexOutOfRange(f"k={k} outside 0..{n_qubits}")
    amps = np.zeros(n_qubits + 1, dtype=complex)
    amps[k] = 1.0
    return DickeVector(n_qubits, amps)


def ghz_state(n_qubits):
    amps = (dicke_state(n_qubits, 0).amplitudes + dicke_state(n_qubits, n_qubits).amplitudes) / sqrt(2)
    return DickeVector(n_qubits, amps)


def maximally_mixed(n_qubits):
    d = n_qubits + 1
    return SymDensity(n_qubits, np.eye(d) / d)


def one_axis_twist(state, chi):
    """Phase map ``C_M -> exp(-i chi M^2) C_M``."""
    ms = np.arange(state.n_qubits + 1) - state.spin
    return DickeVector(state.n_qubits, np.exp(-1j * chi * ms ** 2) * state.amplitudes)


def scs_mixture(n_qubits, weights, directions):
    """Convex mixture ``sum_w p_w |theta_w, phi_w><theta_w, phi_w|``."""
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise InvalidState("mixture weights must be nonnegative and sum to 1")
    rho = np.zeros((n_qubits + 1, n_qubits + 1), dtype=complex)
    for p, d in zip(weights, directions):
        v = scs_amplitudes(n_qubits, d).amplitudes
        rho += p * np.outer(v, v.conj())
    return SymDensity(n_qubits, _renormalize(rho))


def random_density(n_qubits, seed, rank=None):
    """Seeded Ginibre state ``G G^dagger / Tr(G G^dagger)``, G of shape (N+1, rank).

    Uses numpy's PCG64 generator; real and imaginary parts are drawn in that
    order, so a given ``(n_qubits, seed, rank)`` reproduces bit for bit.
    """
    d = n_qubits + 1
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise InvalidRank(f"rank={rank} outside 1..{d}")
    rng = np.random.Generator(np.random.PCG64(seed))
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return SymDensity(n_qubits, _renormalize(rho))


# ---------------------------------------------------------------------------
# full 2**N tensor-space embedding (oracle side)
# ---------------------------------------------------------------------------

def dicke_isometry(n_qubits):
    """Isometry V of shape (2**N, N+1) mapping Dicke coordinates into qubit space.

    Qubit 1 is the most significant bit; bit value 1 means ``|1>`` (down).
    """
    if n_qubits > MAX_EMBED_QUBITS:
        raise OversizeEmbedding(f"N={n_qubits} exceeds full-tensor limit {MAX_EMBED_QUBITS}")
    dim = 2 ** n_qubits
    ones = np.array([bin(i).count("1") for i in range(dim)])
    ups = n_qubits - ones
    V = np.zeros((dim, n_qubits + 1))
    for k in range(n_qubits + 1):
        V[ups == k, k] = 1.0 / sqrt(comb(n_qubits, k))
    return V


def embed(state):
    """Full tensor-space representation: a 2**N vector or a 2**N x 2**N matrix."""
    V = dicke_isometry(state.n_qubits)
    if isinstance(state, DickeVector):
        return V @ state.amplitudes
    return V @ state.matrix @ V.T


def qubit_density(bloch):
    s = np.asarray(bloch, dtype=float)
    return 0.5 * np.array([[1 + s[2], s[0] - 1j * s[1]], [s[0] + 1j * s[1], 1 - s[2]]])


def _apply_product(op, columns, n_qubits):
    """Apply ``op^{(x)N}`` to each column of ``columns`` (shape (2**N, m))."""
    m = columns.shape[1]
    t = columns.T.reshape((m,) + (2,) * n_qubits)
    for axis in range(1, n_qubits + 1):
        t = np.moveaxis(np.tensordot(op, t, axes=([1], [axis])), 0, axis)
    return t.reshape(m, -1).T


def symmetric_weight(qubit_bloch, n_qubits):
    """Weight ``Tr[Pi_sym rho_w^{(x)N}]`` of an N-fold product on the symmetric subspace.

    Computed in the full ``2**N`` space, so N is capped at 10. Equals 1 exactly
    when the factor is pure.
    """
    s = np.asarray(qubit_bloch, dtype=float)
    r = float(np.linalg.norm(s))
    if r > 1 + 1e-12:
        raise BlochOutOfBall(f"|s|={r} exceeds 1")
    V = dicke_isometry(n_qubits)
    rho_w = qubit_density(s)
    image = _apply_product(rho_w, V.astype(complex), n_qubits)
    return float(np.real(np.sum(V.conj() * image)))


def qubit_direction(amplitudes):
    """Direction of the coherent state equal (up to phase) to a pure qubit ``a|0> + b|1>``."""
    a, b = np.asarray(amplitudes, dtype=complex) / np.linalg.norm(amplitudes)
    ab = np.conj(a) * b
    return Direction.from_bloch([2 * ab.real, 2 * ab.imag, abs(a) ** 2 - abs(b) ** 2])


# ---------------------------------------------------------------------------
# JSON state schema
# ---------------------------------------------------------------------------

def state_to_dict(state):
    if isinstance(state, DickeVector):
        return {"n_qubits": state.n_qubits, "kind": "pure",
                "amplitudes": [[float(z.real), float(z.imag)] for z in state.amplitudes]}
    return {"n_qubits": state.n_qubits, "kind": "mixed",
            "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in state.matrix]}


def state_from_dict(data):
    """Inverse of :func:`state_to_dict`; raises InvalidState on schema errors."""
    try:
        n = int(data["n_qubits"])
        kind = data["kind"]
        if kind == "pure":
            amps = np.array([complex(re, im) for re, im in data["amplitudes"]])
            norm = np.linalg.norm(amps)
            # tolerate the rounding of a text round trip
            if abs(norm - 1.0) > 1e-9:
                raise InvalidState(f"amplitudes have norm {norm}")
            return DickeVector(n, amps / norm)
        if kind == "mixed":
            rho = np.array([[complex(re, im) for re, im in row] for row in data["matrix"]])
            return SymDensity(n, _renormalize(rho))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidState):
            raise
        raise InvalidState(f"malformed state record: {exc}") from exc
    raise InvalidState(f"unknown state kind {data.get('kind')!r}")
