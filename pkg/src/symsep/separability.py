"""Separability of symmetric states and the positive-P certifier.

A symmetric state is classical exactly when it is a convex mixture of spin
coherent projectors. :func:`certify_classical_nnls` searches for such a
mixture; partial transposes and the pair concurrence supply the opposite
(entangled) evidence. :func:`certify` combines both into a :class:`Certificate`.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from math import comb, sqrt

import numpy as np
from scipy.optimize import least_squares, minimize, nnls

from .errors import (
    InternalInconsistency,
    InvalidCut,
    InvalidEnsemble,
    InvalidState,
    SolverStall,
    TooFewQubits,
)
from .linalg import eigh, eigvalsh, hermiticity_deficit
from .symstate import Direction, as_density, bloch_direction, dicke_isometry, scs_matrix

PAULI = {
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]]),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_SIGMAS = [PAULI["x"], PAULI["y"], PAULI["z"]]
_I2 = np.eye(2)
_YY = np.kron(PAULI["y"], PAULI["y"])

EPSILON_SEP = 1e-6
DELTA_WIT = 1e-8
WEIGHT_PRUNE = 1e-12


# ---------------------------------------------------------------------------
# Dicke split and two-qubit marginals
# ---------------------------------------------------------------------------

def dicke_split(n_qubits, m):
    """Isometry from the N-qubit Dicke space into (m-qubit) x (N-m-qubit) Dicke spaces.

    ``|D_N^k> = sum_q sqrt(C(m,q) C(N-m,k-q) / C(N,k)) |D_m^q>|D_{N-m}^{k-q}>``.
    Product index is ``q * (N - m + 1) + (k - q)``.
    """
    if not 1 <= m <= n_qubits - 1:
        raise InvalidCut(f"cut m={m} outside 1..{n_qubits - 1}")
    nb = n_qubits - m
    V = np.zeros(((m + 1) * (nb + 1), n_qubits + 1))
    for k in range(n_qubits + 1):
        for q in range(max(0, k - nb), min(m, k) + 1):
            V[q * (nb + 1) + k - q, k] = sqrt(comb(m, q) * comb(nb, k - q) / comb(n_qubits, k))
    return V


@dataclass(frozen=True)
class BipartiteView:
    """A symmetric state rewritten across the ``(m | N-m)`` cut."""

    n_qubits: int
    m: int
    matrix: np.ndarray = field(repr=False)

    @property
    def dims(self):
        return self.m + 1, self.n_qubits - self.m + 1

    def _tensor(self):
        da, db = self.dims
        return self.matrix.reshape(da, db, da, db)

    def partial_trace_b(self):
        return np.einsum("ajbj->ab", self._tensor())

    def partial_transpose_b(self):
        da, db = self.dims
        return self._tensor().transpose(0, 3, 2, 1).reshape(da * db, da * db)


def bipartite_view(rho, m):
    rho = as_density(rho)
    V = dicke_split(rho.n_qubits, m)
    return BipartiteView(rho.n_qubits, m, V @ rho.matrix @ V.T)


@dataclass(frozen=True)
class TwoQubitSym:
    """Two-qubit symmetric density matrix with its Bloch data.

    ``matrix4`` is in the product basis ``|00>, |01>, |10>, |11>``.
    """

    s: np.ndarray
    t: np.ndarray
    matrix4: np.ndarray = field(repr=False)

    def __post_init__(self):
        if np.max(np.abs(self.t - self.t.T)) > 1e-12:
            raise InvalidState("correlation tensor not symmetric")
        if hermiticity_deficit(self.matrix4) > 1e-10 or abs(np.trace(self.matrix4) - 1) > 1e-10:
            raise InvalidState("matrix4 is not a unit-trace Hermitian matrix")
        if eigvalsh(self.matrix4)[0] < -1e-10:
            raise InvalidState("matrix4 is not positive semidefinite")
        if abs(np.trace(self.t) - 1.0) > 1e-10:
            raise InvalidState(f"sum of t_mumu is {np.trace(self.t)!r}, symmetric states give 1")

    @classmethod
    def from_matrix(cls, matrix4):
        rho = np.asarray(matrix4, dtype=complex)
        s1 = np.array([np.trace(rho @ np.kron(sg, _I2)).real for sg in _SIGMAS])
        s2 = np.array([np.trace(rho @ np.kron(_I2, sg)).real for sg in _SIGMAS])
        if np.max(np.abs(s1 - s2)) > 1e-10:
            raise InvalidState(f"single-qubit Bloch vectors differ ({s1} vs {s2}); not symmetric")
        t = np.array([[np.trace(rho @ np.kron(a, b)).real for b in _SIGMAS] for a in _SIGMAS])
        return cls(s1, 0.5 * (t + t.T), rho)


def reduce_two_qubit(rho):
    """Marginal of any two qubits of a symmetric N-qubit state."""
    rho = as_density(rho)
    if rho.n_qubits < 2:
        raise TooFewQubits("need at least two qubits")
    if rho.n_qubits == 2:
        dicke2 = rho.matrix
    else:
        dicke2 = bipartite_view(rho, 2).partial_trace_b()
    W = dicke_isometry(2)
    return TwoQubitSym.from_matrix(W @ dicke2 @ W.T)


def bloch_correlations(two):
    """``(s, t, sum_mu t_mumu)`` of a two-qubit symmetric state."""
    return two.s.copy(), two.t.copy(), float(np.trace(two.t))


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

def ppt_min_eigenvalue(rho, m):
    """Smallest eigenvalue of the partial transpose across the ``(m | N-m)`` cut."""
    rho = as_density(rho)
    return float(eigvalsh(bipartite_view(rho, m).partial_transpose_b())[0])


def _sqrtm_psd(a):
    w, v = eigh(a)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def concurrence(two):
    """Wootters concurrence of a two-qubit state (TwoQubitSym or 4x4 array).

    The lambdas (square roots of the spectrum of ``rho (Y x Y) rho* (Y x Y)``)
    are taken as singular values of ``sqrt(rho) (Y x Y) sqrt(rho)*``. Squaring
    and re-rooting instead leaves ~1e-8 of noise on pure product states, which
    is the size of the witness threshold.
    """
    rho = two.matrix4 if isinstance(two, TwoQubitSym) else np.asarray(two, dtype=complex)
    root = _sqrtm_psd(rho)
    lam = np.linalg.svd(root @ _YY @ root.conj(), compute_uv=False)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


@dataclass(frozen=True)
class WitnessRecord:
    type: str          # "PPT" or "Concurrence"
    cut_or_pair: str
    value: float

    def fires(self, delta):
        return self.value < -delta if self.type == "PPT" else self.value > delta


def evaluate_witnesses(rho):
    rho = as_density(rho)
    n = rho.n_qubits
    out = [WitnessRecord("PPT", f"{m}|{n - m}", ppt_min_eigenvalue(rho, m)) for m in range(1, n // 2 + 1)]
    if n >= 2:
        out.append(WitnessRecord("Concurrence", "pair", concurrence(reduce_two_qubit(rho))))
    return out


# ---------------------------------------------------------------------------
# NNLS certifier
# ---------------------------------------------------------------------------

def fibonacci_directions(n):
    """``n`` near-uniform directions; the first and last sit on the poles."""
    if n < 2:
        raise ValueError("need at least two dictionary atoms")
    i = np.arange(n)
    z = 1.0 - 2.0 * i / (n - 1)
    az = np.mod(i * np.pi * (3.0 - np.sqrt(5.0)), 2 * np.pi)
    # Bloch z = -cos(theta)
    return np.arccos(np.clip(-z, -1.0, 1.0)), az


def hermitian_coords(mats):
    """Inner-product-preserving real coordinates of Hermitian matrices.

    Diagonal entries as they are, then real and imaginary parts of the upper
    triangle scaled by sqrt(2). Accepts shape (d, d) or (n, d, d).
    """
    mats = np.asarray(mats)
    d = mats.shape[-1]
    iu = np.triu_indices(d, 1)
    diag = np.real(np.diagonal(mats, axis1=-2, axis2=-1))
    upper = mats[..., iu[0], iu[1]]
    return np.concatenate([diag, sqrt(2) * upper.real, sqrt(2) * upper.imag], axis=-1)


def _atom_coords(n_qubits, theta, phi):
    V = scs_matrix(n_qubits, theta, phi)
    proj = np.einsum("ig,jg->gij", V, V.conj())
    return hermitian_coords(proj).T


def _reconstruct(n_qubits, weights, theta, phi):
    V = scs_matrix(n_qubits, theta, phi)
    return (V * weights) @ V.conj().T


@dataclass(frozen=True)
class Decomposition:
    """``rho ~ sum_w p_w |theta_w, phi_w><theta_w, phi_w|``."""

    n_qubits: int
    weights: np.ndarray
    theta: np.ndarray
    phi: np.ndarray
    residual: float          # max-entry norm of rho minus the mixture
    kkt_violation: float

    def matrix(self):
        return _reconstruct(self.n_qubits, self.weights, self.theta, self.phi)

    def directions(self):
        return [Direction.canonical(t, p) for t, p in zip(self.theta, self.phi)]

    def to_list(self):
        return [{"weight": float(w), "theta": d.theta, "phi": d.phi}
                for w, d in zip(self.weights, self.directions())]


def _solve_nnls(A, b):
    try:
        x, _ = nnls(A, b, maxiter=100 * A.shape[1])
    except RuntimeError as exc:
        raise SolverStall(str(exc)) from exc
    grad = A.T @ (b - A @ x)
    # KKT: grad == 0 on the support, grad <= 0 off it
    kkt = max(float(np.max(np.abs(grad[x > 0]), initial=0.0)), float(np.max(grad[x == 0], initial=0.0)))
    return x, kkt


def _finish(rho, weights, theta, phi, kkt):
    keep = weights > WEIGHT_PRUNE
    w = weights[keep] / weights[keep].sum()
    t, p = np.mod(theta[keep], 2 * np.pi), np.mod(phi[keep], 2 * np.pi)
    resid = float(np.max(np.abs(rho - _reconstruct(len(rho) - 1, w, t, p))))
    return Decomposition(len(rho) - 1, w, t, p, resid, kkt)


def _scs_derivatives(n_qubits, theta, phi):
    """Coherent-state columns and their theta / phi derivatives, each (d, G)."""
    V = scs_matrix(n_qubits, theta, phi)
    k = np.arange(n_qubits + 1)[:, None]
    c, s = np.cos(theta / 2)[None, :], np.sin(theta / 2)[None, :]
    mag = np.sqrt([float(comb(n_qubits, i)) for i in range(n_qubits + 1)])[:, None]
    phase = np.exp(-1j * k * phi[None, :])
    # d/dtheta of c^(N-k) s^k, written without negative powers so the poles are safe
    lo = np.where(k < n_qubits, (n_qubits - k) * c ** np.maximum(n_qubits - k - 1, 0) * s ** (k + 1), 0.0)
    hi = np.where(k > 0, k * c ** (n_qubits - k + 1) * s ** np.maximum(k - 1, 0), 0.0)
    dtheta = mag * 0.5 * (hi - lo) * phase
    dphi = -1j * k * V
    return V, dtheta, dphi


def _polish(rho, n_qubits, weights, theta, phi):
    """Joint Gauss-Newton fit of directions and sqrt-weights of the support."""
    target = hermitian_coords(rho)
    r = weights.size

    def resid(x):
        th, ph, u = x[:r], x[r:2 * r], x[2 * r:]
        return hermitian_coords(_reconstruct(n_qubits, u * u, th, ph)) - target

    def jac(x):
        th, ph, u = x[:r], x[r:2 * r], x[2 * r:]
        V, dth, dph = _scs_derivatives(n_qubits, th, ph)
        proj = np.einsum("ig,jg->gij", V, V.conj())
        dproj_th = np.einsum("ig,jg->gij", dth, V.conj())
        dproj_ph = np.einsum("ig,jg->gij", dph, V.conj())
        dproj_th = dproj_th + dproj_th.conj().transpose(0, 2, 1)
        dproj_ph = dproj_ph + dproj_ph.conj().transpose(0, 2, 1)
        w = (u * u)[:, None]
        return np.concatenate([w * hermitian_coords(dproj_th), w * hermitian_coords(dproj_ph),
                               2 * u[:, None] * hermitian_coords(proj)]).T

    x0 = np.concatenate([theta, phi, np.sqrt(weights)])
    sol = least_squares(resid, x0, jac=jac, method="trf", xtol=1e-12, ftol=1e-12, gtol=1e-12, max_nfev=1000)
    th, ph, u = sol.x[:r], sol.x[r:2 * r], sol.x[2 * r:]
    return u * u, th, ph


def _merge(weights, theta, phi, angle=1e-3, drop=1e-7):
    """Fuse atoms closer than ``angle`` and drop negligible weights."""
    keep = weights > drop
    w, t, p = weights[keep], theta[keep], phi[keep]
    order = np.argsort(w)[::-1]
    vecs = bloch_direction(t, p)
    groups = []
    for i in order:
        for g in groups:
            if np.dot(vecs[g[0]], vecs[i]) > np.cos(angle):
                g.append(i)
                break
        else:
            groups.append([i])
    mw, mt, mp = [], [], []
    for g in groups:
        total = w[g].sum()
        d = Direction.from_bloch(np.einsum("g,gi->i", w[g], vecs[g]))
        mw.append(total)
        mt.append(d.theta)
        mp.append(d.phi)
    mw = np.array(mw)
    return mw / mw.sum(), np.array(mt), np.array(mp)


def _simplify(rho, dec, epsilon):
    """Merge, prune and re-fit a decomposition; keep each step only if still within epsilon.

    Repeats while atoms keep fusing, since a polish can pull two atoms together.
    """
    while True:
        w, t, p = _merge(dec.weights, dec.theta, dec.phi)
        if w.size == dec.weights.size:
            return dec
        w, t, p = _polish(rho, dec.n_qubits, w, t, p)
        cand = _finish(rho, w, t, p, dec.kkt_violation)
        if cand.residual >= epsilon:
            return dec
        dec = cand


def _best_new_direction(residual_matrix, n_qubits, theta, phi):
    """Direction maximizing ``<n| R |n>`` (most violated dual constraint)."""
    V = scs_matrix(n_qubits, theta, phi)
    score = np.real(np.einsum("ig,ij,jg->g", V.conj(), residual_matrix, V))

    def neg(x):
        v = scs_matrix(n_qubits, x[:1], x[1:])[:, 0]
        return -float(np.real(v.conj() @ residual_matrix @ v))

    best = None
    for g in np.argsort(score)[::-1][:3]:
        res = minimize(neg, np.array([theta[g], phi[g]]), method="BFGS")
        if best is None or res.fun < best.fun:
            best = res
    return best.x


def certify_classical_nnls(rho, grid_size=None, epsilon=EPSILON_SEP, extra_directions=(),
                           refine=True, max_rounds=25):
    """Search for a convex spin-coherent decomposition of ``rho``.

    Parameters
    ----------
    rho : SymDensity or DickeVector
    grid_size : int, optional
        Dictionary size; default ``max(400, 8 (N+1)^2)``. Doubled once on failure.
    epsilon : float
        Acceptance threshold on the max-entry reconstruction residual.
    extra_directions : iterable of Direction or (theta, phi)
        Atoms appended to the Fibonacci dictionary.
    refine : bool
        After the dictionary stages, alternate column generation (add the
        direction of the most violated dual constraint) with a joint
        Gauss-Newton fit of the support. Needed whenever the true atoms are
        off the dictionary, e.g. any single coherent state in general position.

    Returns
    -------
    Decomposition or None
        None when no mixture reaches ``epsilon``.
    """
    rho = as_density(rho)
    n = rho.n_qubits
    R = rho.matrix
    b = hermitian_coords(R)
    size = max(400, 8 * (n + 1) ** 2) if grid_size is None else int(grid_size)
    extra = [(d.theta, d.phi) if isinstance(d, Direction) else tuple(d) for d in extra_directions]
    et = np.array([e[0] for e in extra], dtype=float)
    ep = np.array([e[1] for e in extra], dtype=float)

    best = None
    for attempt in (size, 2 * size):
        ft, fp = fibonacci_directions(attempt)
        theta, phi = np.concatenate([ft, et]), np.concatenate([fp, ep])
        x, kkt = _solve_nnls(_atom_coords(n, theta, phi), b)
        dec = _finish(R, x, theta, phi, kkt)
        if best is None or dec.residual < best.residual:
            best = dec
        if dec.residual < epsilon:
            return _simplify(R, dec, epsilon)
    if not refine:
        return None

    # conditional-gradient refinement: grow the best support by the most violated
    # direction, reweight that small set by NNLS, then polish it jointly
    sup_w, sup_t, sup_p = best.weights, best.theta, best.phi
    for _ in range(max_rounds):
        w, t, p = _polish(R, n, *_merge(sup_w, sup_t, sup_p, drop=0.0))
        dec = _finish(R, w, t, p, best.kkt_violation)
        if dec.residual < best.residual:
            best = dec
        if best.residual < epsilon:
            return _simplify(R, best, epsilon)
        new = _best_new_direction(R - best.matrix(), n, theta, phi)
        cand_t = np.append(best.theta, new[0])
        cand_p = np.append(best.phi, new[1])
        x, kkt = _solve_nnls(_atom_coords(n, cand_t, cand_p), b)
        dec = _finish(R, x, cand_t, cand_p, kkt)
        if dec.residual < best.residual:
            best = dec
        if best.residual < epsilon:
            return _simplify(R, best, epsilon)
        sup_w, sup_t, sup_p = dec.weights, dec.theta, dec.phi
    return None


# ---------------------------------------------------------------------------
# certificate
# ---------------------------------------------------------------------------

CLASSICAL, NONCLASSICAL, UNDECIDED = "Classical", "NonClassical", "Undecided"


@dataclass(frozen=True)
class CertifyConfig:
    epsilon_sep: float = EPSILON_SEP
    delta_wit: float = DELTA_WIT
    grid_size: int | None = None
    refine: bool = True

    def __post_init__(self):
        if self.epsilon_sep <= 0 or self.delta_wit <= 0:
            raise ValueError("tolerances must be positive")


@dataclass(frozen=True)
class Certificate:
    verdict: str
    decomposition: Decomposition | None
    witnesses: list
    tolerances: dict
    residual: float | None = None

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "residual": self.residual,
            "decomposition": None if self.decomposition is None else self.decomposition.to_list(),
            "witnesses": [asdict(w) for w in self.witnesses],
            "tolerances": dict(self.tolerances),
        }


def _guard(rho, dec, witnesses, delta, epsilon):
    """Abort if a decomposition and a witness contradict each other.

    The stored residual must match a fresh reconstruction and the mixture
    itself must pass every PPT test. For ``rho`` the witnesses may
    only deviate from the mixture's values by what the residual allows:
    Weyl's bound for the partial transpose, and ``8 sqrt(||Delta||)`` for the
    concurrence (square root is operator-Hoelder).
    """
    sigma = dec.matrix()
    delta_mat = rho.matrix - sigma
    actual = float(np.max(np.abs(delta_mat)))
    if actual >= epsilon or abs(actual - dec.residual) > 1e-12:
        raise InternalInconsistency(f"decomposition claims residual {dec.residual:.2e}, reconstructs to {actual:.2e}")
    n = rho.n_qubits
    for w in witnesses:
        if w.type == "PPT":
            m = int(w.cut_or_pair.split("|")[0])
            split = dicke_split(n, m)
            sig_view = BipartiteView(n, m, split @ sigma @ split.T)
            if eigvalsh(sig_view.partial_transpose_b(), tol=1e-8)[0] < -delta:
                raise InternalInconsistency(f"SCS mixture fails PPT across {w.cut_or_pair}")
            diff = BipartiteView(n, m, split @ delta_mat @ split.T).partial_transpose_b()
            slack = np.linalg.norm(diff, 2)
        else:
            W = dicke_isometry(2)
            d2 = delta_mat if n == 2 else BipartiteView(
                n, 2, dicke_split(n, 2) @ delta_mat @ dicke_split(n, 2).T).partial_trace_b()
            slack = 8 * sqrt(np.linalg.norm(W @ d2 @ W.T, 2))
        if w.fires(delta + slack):
            raise InternalInconsistency(
                f"decomposition with residual {dec.residual:.2e} coexists with {w.type} "
                f"witness {w.value:.3e} on {w.cut_or_pair}")


def certify(rho, config=None):
    """Classify a symmetric state as Classical, NonClassical or Undecided.

    Classical needs an explicit coherent-state mixture within ``epsilon_sep``;
    NonClassical needs a PPT cut below ``-delta_wit`` or pair concurrence above
    ``delta_wit``. Anything else is Undecided.
    """
    rho = as_density(rho)
    config = CertifyConfig() if config is None else config
    witnesses = evaluate_witnesses(rho)
    fired = any(w.fires(config.delta_wit) for w in witnesses)
    # a firing witness rules out a decomposition, so skip the expensive refinement
    dec = certify_classical_nnls(rho, config.grid_size, config.epsilon_sep, refine=config.refine and not fired)
    tolerances = {"epsilon_sep": config.epsilon_sep, "delta_wit": config.delta_wit}
    if dec is not None:
        _guard(rho, dec, witnesses, config.delta_wit, config.epsilon_sep)
        return Certificate(CLASSICAL, dec, witnesses, tolerances, dec.residual)
    verdict = NONCLASSICAL if fired else UNDECIDED
    return Certificate(verdict, None, witnesses, tolerances, None)


# ---------------------------------------------------------------------------
# purity of product factors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FactorPurityReport:
    t: np.ndarray
    trace_sum: float
    squared_lengths: np.ndarray
    compatible: bool     # every factor pure, so the ensemble can live in the symmetric subspace


def factor_purity_report(weights, blochs, tol=1e-10):
    """Correlation tensor ``t = sum_w p_w s_w s_w^T`` of a product ensemble and its trace."""
    p = np.asarray(weights, dtype=float)
    s = np.atleast_2d(np.asarray(blochs, dtype=float))
    if s.shape != (p.size, 3):
        raise InvalidEnsemble(f"expected {p.size} Bloch 3-vectors, got shape {s.shape}")
    if np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
        raise InvalidEnsemble("weights must be nonnegative and sum to 1")
    sq = np.sum(s * s, axis=1)
    if np.any(sq > 1 + 1e-12):
        raise InvalidEnsemble("Bloch vector outside the unit ball")
    t = np.einsum("w,wi,wj->ij", p, s, s)
    return FactorPurityReport(t, float(np.trace(t)), sq, bool(np.all(np.abs(sq - 1) <= tol)))


def bloch_of(direction):
    return bloch_direction(direction.theta, direction.phi)
