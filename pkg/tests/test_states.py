import numpy as np
import pytest

from phasespace import ValidationError, states
from phasespace.linalg import partial_trace


@pytest.mark.parametrize("kind,params", [
    ("fock", {"n": 3, "n_max": 10}), ("coherent", {"alpha": 0.5 + 0.5j, "n_max": 30}),
    ("spin_up", {"j": 1.5}), ("spin_coherent", {"j": 1, "theta": 0.3, "phi": 2.0}),
    ("ghz", {"n": 4}), ("dicke", {"n": 4, "k": 2}), ("w_state", {"n": 3}),
    ("bell", {"which": "psi-"}), ("werner", {"p": 0.2}), ("hybrid_bell", {"n_max": 7}),
])
def test_builtins_are_density_matrices(kind, params):
    rho = states.named_state(kind, **params)
    assert np.allclose(rho, rho.conj().T)
    assert np.trace(rho).real == pytest.approx(1.0)
    assert np.linalg.eigvalsh(rho).min() > -1e-12


def test_entangled_states_have_mixed_marginals():
    for rho in (states.bell("phi-"), states.ghz(2)):
        assert np.allclose(partial_trace(rho, (2, 2), [0]), np.eye(2) / 2)
    w = states.w_state(3)
    assert np.allclose(np.diag(partial_trace(w, (2, 2, 2), [0])), [2 / 3, 1 / 3])


def test_dicke_populations():
    d = states.dicke(4, 1)
    assert np.count_nonzero(np.abs(np.diag(d)) > 1e-12) == 4


def test_unknown_state():
    with pytest.raises(ValidationError):
        states.named_state("cat")
