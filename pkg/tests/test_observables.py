import json

import numpy as np
import pytest

from lurgme.observables import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ObservableFamily,
    SpinConfig,
    collective_operator,
    family_from_dict,
    load_family,
    pauli_family,
    spin_family,
    spin_matrices,
)
from lurgme.states import noisy_mixture, w_state
from lurgme.tensor import embed, hermiticity, variance

SPINS = [0.5, 1, 1.5, 2]


def test_pauli_family_w3_config():
    fam = pauli_family([(1, 1, 1), (1, 1, 1), (-1, -1, 1)])
    np.testing.assert_array_equal(fam.per_site[2][0], -SIGMA_X)
    np.testing.assert_array_equal(fam.per_site[2][2], SIGMA_Z)
    assert fam.count == 3 and fam.dims == (2, 2, 2)


def test_pauli_family_repeated_triple():
    fam = pauli_family((1, 1, 1), n_sites=2)
    np.testing.assert_array_equal(collective_operator(fam, 2, {0, 1}), np.diag([2, 0, 0, -2]))


def test_pauli_family_rejects_bad_sign():
    with pytest.raises(ValueError):
        pauli_family([(1, 0, 1)])


def test_spin_half():
    jx, jy, jz = spin_matrices(0.5)
    np.testing.assert_allclose(jx, SIGMA_X / 2)
    np.testing.assert_allclose(jy, SIGMA_Y / 2)
    np.testing.assert_allclose(jz, SIGMA_Z / 2)


def test_spin_one_jz():
    np.testing.assert_array_equal(spin_matrices(1)[2], np.diag([1, 0, -1]))


@pytest.mark.parametrize("j", SPINS)
def test_spin_commutators(j):
    jx, jy, jz = spin_matrices(j)
    comm = lambda a, b: a @ b - b @ a
    np.testing.assert_allclose(comm(jx, jy), 1j * jz, atol=1e-12)
    np.testing.assert_allclose(comm(jy, jz), 1j * jx, atol=1e-12)
    np.testing.assert_allclose(comm(jz, jx), 1j * jy, atol=1e-12)


@pytest.mark.parametrize("j", SPINS)
def test_spin_casimir(j):
    jx, jy, jz = spin_matrices(j)
    dim = int(2 * j + 1)
    np.testing.assert_allclose(jx @ jx + jy @ jy + jz @ jz, j * (j + 1) * np.eye(dim), atol=1e-12)


@pytest.mark.parametrize("j", [0, -1, 0.3, 1.25])
def test_spin_invalid(j):
    with pytest.raises(ValueError):
        spin_matrices(j)


def test_spin_family_zero_weights():
    fam = spin_family(0.5, SpinConfig((0, 0, 0), (0, 0, 0)))
    rho = noisy_mixture(w_state(3), 0.7)
    assert variance(collective_operator(fam, 0, range(3)), rho) == 0.0


def test_spin_family_matches_u_and_v():
    fam = spin_family(1, SpinConfig((1, -1, -1), (1, -1, -1)))
    jx, jy, _ = spin_matrices(1)
    u = embed(jx, 0, [3] * 3) - embed(jx, 1, [3] * 3) - embed(jx, 2, [3] * 3)
    np.testing.assert_allclose(collective_operator(fam, 0, range(3)), u)
    assert fam.count == 2


def test_collective_operator_two_site_subset():
    fam = pauli_family([(1, 1, 1), (1, 1, 1), (-1, -1, 1)])
    op = collective_operator(fam, 0, {1, 2})
    expected = np.kron(np.eye(2), np.kron(SIGMA_X, np.eye(2)) - np.kron(np.eye(2), SIGMA_X))
    np.testing.assert_allclose(op, expected)


def test_collective_operator_single_site_and_additivity():
    fam = pauli_family([(1, 1, 1), (-1, 1, -1), (1, -1, 1), (1, 1, -1)])
    for k in range(3):
        np.testing.assert_allclose(collective_operator(fam, k, {2}), embed(fam.per_site[2][k], 2, fam.dims))
        np.testing.assert_allclose(
            collective_operator(fam, k, {0, 1, 3}),
            collective_operator(fam, k, {0}) + collective_operator(fam, k, {1, 3}),
        )
        assert hermiticity(collective_operator(fam, k, range(4))) < 1e-10


def test_collective_operator_empty_subset():
    with pytest.raises(ValueError):
        collective_operator(pauli_family((1, 1, 1), 2), 0, set())


def test_family_rejects_ragged_and_non_hermitian():
    with pytest.raises(ValueError):
        ObservableFamily((2, 2), ((SIGMA_X,), (SIGMA_X, SIGMA_Y)))
    with pytest.raises(ValueError):
        ObservableFamily((2,), ((np.array([[0, 1], [0, 0]]),),))


def test_family_json(tmp_path):
    doc = {"dims": [2, 2], "sites": [[{"matrix": [[0, 0], [1, 0], [1, 0], [0, 0]]}]] * 2}
    path = tmp_path / "obs.json"
    path.write_text(json.dumps(doc))
    fam = load_family(path)
    np.testing.assert_array_equal(fam.per_site[1][0], SIGMA_X)

    pauli = family_from_dict({"pattern": "pauli", "signs": [[1, 1, 1], [-1, -1, 1]]})
    np.testing.assert_array_equal(pauli.per_site[1][1], -SIGMA_Y)
    spin = family_from_dict({"pattern": "spin", "j": [1, 1], "h": [1, 2], "g": [1, 1]})
    assert spin.dims == (3, 3)
    with pytest.raises(ValueError, match="observables.signs"):
        family_from_dict({"pattern": "pauli"})
    with pytest.raises(ValueError, match="sites\\[0\\]\\[0\\]"):
        family_from_dict({"dims": [2], "sites": [[{"matrix": [[1, 0]]}]]})
