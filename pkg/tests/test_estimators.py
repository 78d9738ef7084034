import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from symsep.errors import InvalidState
from symsep.estimators import ClassicalityCertifier, PFunctionTransformer, check_states
from symsep.symstate import dicke_state, ghz_state, random_density, scs_amplitudes


def batch(n=3):
    return [scs_amplitudes(n, (0.4, 1.0)), dicke_state(n, 1), random_density(n, 2)]


def test_check_states_accepts_all_shapes():
    psi = scs_amplitudes(2, (1.0, 1.0))
    assert len(check_states(psi)) == 1
    assert len(check_states(psi.amplitudes)) == 1
    assert len(check_states(psi.density().matrix)) == 1
    assert len(check_states(np.stack([psi.amplitudes, dicke_state(2, 0).amplitudes]))) == 2
    assert len(check_states(np.stack([psi.density().matrix] * 3))) == 3


def test_check_states_rejects_mixed_sizes_and_junk():
    with pytest.raises(InvalidState):
        check_states([dicke_state(2, 1), dicke_state(3, 1)])
    with pytest.raises(InvalidState):
        check_states([])
    with pytest.raises(InvalidState):
        check_states(np.zeros((2, 3, 4)))
    with pytest.raises(InvalidState):
        check_states([dicke_state(2, 1)], n_qubits=3)


def test_params_and_clone():
    t = PFunctionTransformer(theta_order=10, n_phi=20)
    assert t.get_params() == {"theta_order": 10, "n_phi": 20}
    assert clone(t).get_params() == t.get_params()
    c = ClassicalityCertifier(epsilon_sep=1e-7).set_params(refine=False)
    assert clone(c).get_params()["refine"] is False


def test_transform_shapes_and_normalization():
    t = PFunctionTransformer().fit(batch())
    P = t.transform(batch())
    assert P.shape == (3, len(t.grid_))
    np.testing.assert_allclose(P @ t.grid_.weight, 1.0, atol=1e-12)


def test_inverse_transform_round_trip():
    states = batch(4)
    t = PFunctionTransformer()
    rebuilt = t.inverse_transform(t.fit_transform(states))
    for s, r in zip(states, rebuilt):
        np.testing.assert_allclose(r, s.density().matrix, atol=1e-12)


def test_unfitted_raises():
    with pytest.raises(NotFittedError):
        PFunctionTransformer().transform(batch())
    with pytest.raises(NotFittedError):
        ClassicalityCertifier().predict(batch())


def test_transform_rejects_other_qubit_number():
    t = PFunctionTransformer().fit(batch(3))
    with pytest.raises(InvalidState):
        t.transform(batch(2))


def test_certifier_predict_and_score():
    X = [scs_amplitudes(3, (0.4, 1.0)), dicke_state(3, 1), ghz_state(3)]
    y = np.array(["Classical", "NonClassical", "NonClassical"])
    clf = ClassicalityCertifier().fit(X)
    assert list(clf.classes_) == ["Classical", "NonClassical", "Undecided"]
    np.testing.assert_array_equal(clf.predict(X), y)
    assert clf.score(X, y) == 1.0
    assert clf.certify(X)[0].decomposition is not None
