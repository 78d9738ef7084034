"""scikit-learn style wrappers.

Inputs ``X`` are batches of symmetric states: a sequence of SymDensity /
DickeVector objects, an array of amplitude vectors with shape
``(n_samples, N+1)``, or an array of density matrices with shape
``(n_samples, N+1, N+1)``. A single state is accepted as a batch of one.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .errors import InvalidState
from .phasespace import calibrate_lambda, p_values, sphere_grid
from .separability import CLASSICAL, NONCLASSICAL, UNDECIDED, CertifyConfig, certify
from .symstate import DickeVector, SymDensity, scs_matrix


def check_states(X, n_qubits=None):
    """Validate a batch of states and return a list of SymDensity.

    Raises InvalidState for malformed input or mixed qubit numbers.
    """
    if isinstance(X, (SymDensity, DickeVector)):
        X = [X]
    elif isinstance(X, np.ndarray) and (X.ndim == 1 or (X.ndim == 2 and _looks_like_matrix(X))):
        X = [X]
    states = []
    for item in X:
        if isinstance(item, (SymDensity, DickeVector)):
            rho = item.density()
        else:
            a = np.asarray(item, dtype=complex)
            if a.ndim == 1:
                rho = DickeVector(a.size - 1, a).density()
            elif a.ndim == 2 and a.shape[0] == a.shape[1]:
                rho = SymDensity(a.shape[0] - 1, a)
            else:
                raise InvalidState(f"cannot interpret input of shape {a.shape} as a state")
        states.append(rho)
    if not states:
        raise InvalidState("empty batch")
    sizes = {s.n_qubits for s in states}
    if len(sizes) > 1:
        raise InvalidState(f"batch mixes qubit numbers {sorted(sizes)}")
    if n_qubits is not None and sizes != {n_qubits}:
        raise InvalidState(f"estimator fitted for N={n_qubits}, got N={sizes.pop()}")
    return states


def _looks_like_matrix(a):
    """A square unit-trace Hermitian 2-D array is one state, not a batch of vectors."""
    return a.shape[0] == a.shape[1] and np.allclose(a, a.conj().T) and np.isclose(np.trace(a), 1.0)


class PFunctionTransformer(TransformerMixin, BaseEstimator):
    """Map states to their canonical P function sampled on a sphere grid.

    Parameters
    ----------
    theta_order : int, optional
        Gauss-Legendre order in cos(theta); default ``2N + 2``.
    n_phi : int, optional
        Uniform azimuthal points; default ``4N + 4``.

    Attributes
    ----------
    n_qubits_ : int
    lambda_ : LambdaTable
    grid_ : SphereGrid
    """

    def __init__(self, theta_order=None, n_phi=None):
        self.theta_order = theta_order
        self.n_phi = n_phi

    def fit(self, X, y=None):
        states = check_states(X)
        n = states[0].n_qubits
        order = 2 * n + 2 if self.theta_order is None else self.theta_order
        n_phi = 4 * n + 4 if self.n_phi is None else self.n_phi
        self.n_qubits_ = n
        self.lambda_ = calibrate_lambda(n, order, n_phi)
        self.grid_ = sphere_grid(order, n_phi)
        return self

    def transform(self, X):
        check_is_fitted(self, "grid_")
        states = check_states(X, self.n_qubits_)
        return np.stack([p_values(s, self.grid_.theta, self.grid_.phi, self.lambda_) for s in states])

    def inverse_transform(self, P):
        """Rebuild density matrices ``sum_g w_g P_g |g><g|`` from sampled P rows."""
        check_is_fitted(self, "grid_")
        P = np.atleast_2d(np.asarray(P, dtype=float))
        V = scs_matrix(self.n_qubits_, self.grid_.theta, self.grid_.phi)
        return np.stack([(V * (self.grid_.weight * row)) @ V.conj().T for row in P])


class ClassicalityCertifier(ClassifierMixin, BaseEstimator):
    """Label states Classical / NonClassical / Undecided.

    ``fit`` learns nothing beyond the qubit number; it exists so the certifier
    slots into pipelines and model-selection tools.
    """

    def __init__(self, epsilon_sep=1e-6, delta_wit=1e-8, grid_size=None, refine=True):
        self.epsilon_sep = epsilon_sep
        self.delta_wit = delta_wit
        self.grid_size = grid_size
        self.refine = refine

    def fit(self, X, y=None):
        states = check_states(X)
        self.n_qubits_ = states[0].n_qubits
        self.classes_ = np.array([CLASSICAL, NONCLASSICAL, UNDECIDED])
        self.config_ = CertifyConfig(self.epsilon_sep, self.delta_wit, self.grid_size, self.refine)
        return self

    def certify(self, X):
        check_is_fitted(self, "config_")
        return [certify(s, self.config_) for s in check_states(X, self.n_qubits_)]

    def predict(self, X):
        return np.array([c.verdict for c in self.certify(X)])
