"""Brute-force 2**N qubit-space operations.

These are the cross-validation oracles for the polynomial-size Dicke-split
routines in :mod:`symsep.separability`. They never touch the split isometry.
"""

import numpy as np

from .errors import InvalidCut
from .symstate import MAX_EMBED_QUBITS, embed  # noqa: F401  (re-exported oracle entry point)


def _as_tensor(rho_full, n_qubits):
    return np.asarray(rho_full).reshape((2,) * (2 * n_qubits))


def partial_trace(rho_full, n_qubits, keep):
    """Reduce a 2**N x 2**N matrix to the qubits listed in ``keep`` (in order)."""
    keep = list(keep)
    t = _as_tensor(rho_full, n_qubits)
    traced = [q for q in range(n_qubits) if q not in keep]
    # trace pairs from the highest index down so axis numbers stay valid
    for q in sorted(traced, reverse=True):
        nq = t.ndim // 2
        t = np.trace(t, axis1=q, axis2=q + nq)
    dim = 2 ** len(keep)
    return t.reshape(dim, dim)


def partial_transpose(rho_full, n_qubits, m):
    """Transpose the last ``N - m`` qubits of a 2**N x 2**N matrix."""
    if not 1 <= m <= n_qubits - 1:
        raise InvalidCut(f"cut m={m} outside 1..{n_qubits - 1}")
    t = _as_tensor(rho_full, n_qubits)
    rows = list(range(n_qubits))
    cols = list(range(n_qubits, 2 * n_qubits))
    for q in range(m, n_qubits):
        rows[q], cols[q] = cols[q], rows[q]
    dim = 2 ** n_qubits
    return t.transpose(rows + cols).reshape(dim, dim)
