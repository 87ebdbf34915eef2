import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from lurgme.analysis import w_signs
from lurgme.bounds import (
    BoundError,
    BoundProvider,
    bound_for,
    commutator_bound,
    min_variance_sum,
    provider_from_string,
)
from lurgme.observables import SIGMA_X, SIGMA_Y, SIGMA_Z, pauli_family, subset_operator
from lurgme.states import NoiseFamily, PureState, noisy_mixture, random_density, random_pure, w_state
from lurgme.tensor import partial_trace, variance


@pytest.fixture(scope="module")
def w3():
    noise = NoiseFamily(w_state(3))
    return noise, pauli_family(w_signs(3)), BoundProvider.family_minimum(noise)


def brute_family_min(noise, family, subset, grid=2001):
    qs = np.linspace(0, 1, grid)
    return min(
        oracles.full_space_variance_sum(noise.at(q).matrix, list(family.dims), family.per_site, subset)
        for q in qs
    )


@pytest.mark.parametrize("subset,expected", [
    ({0}, 26 / 9),
    ({2}, 26 / 9),
    ({1, 2}, 20 / 9),
    ({0, 2}, 20 / 9),
    ({0, 1}, 6.0),
    ({0, 1, 2}, 10 / 3),
])
def test_family_min_w3_closed_forms(w3, subset, expected):
    assert bound_for(w3[2], w3[1], subset).value == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize("subset", [{1}, {0, 1}, {1, 2}])
def test_family_min_matches_brute_scan(subset):
    noise = NoiseFamily(w_state(3))
    family = pauli_family(w_signs(3))
    provider = BoundProvider.family_minimum(noise, grid=101)
    brute = brute_family_min(noise, family, subset, grid=401)
    # the brute scan only visits grid points, so it can sit slightly above the true minimum
    assert bound_for(provider, family, subset).value <= brute + 1e-12
    assert bound_for(provider, family, subset).value == pytest.approx(brute, abs=1e-4)


def test_family_min_single_qubit_closed_form():
    # on (1-q) I/2 + q|+><+| the Pauli variance sum is 3 - q^2
    noise = NoiseFamily(PureState((2,), np.array([1, 1]) / np.sqrt(2)))
    provider = BoundProvider.family_minimum(noise, grid=11)
    found = bound_for(provider, pauli_family([(1, 1, 1)]), {0})
    assert found.value == pytest.approx(2.0, abs=1e-12)
    assert found.diagnostics["q_min"] == 1.0


@given(st.integers(0, 2**32 - 1), st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=40, deadline=None)
def test_variance_sum_concave_along_noise_family(seed, a, b, t):
    # concavity is why the grid endpoints already give the family minimum
    psi = random_pure([2, 2], seed=seed)
    family = pauli_family((1, 1, 1), 2)
    ops = [subset_operator(family, k, {0, 1}) for k in range(3)]
    vsum = lambda q: sum(variance(x, noisy_mixture(psi, q)) for x in ops)
    mid = t * a + (1 - t) * b
    assert vsum(mid) >= t * vsum(a) + (1 - t) * vsum(b) - 1e-9


def test_family_min_cached(w3):
    noise, family, _ = w3
    provider = BoundProvider.family_minimum(noise)
    first = bound_for(provider, family, {0, 2})
    assert bound_for(provider, family, {2, 0}) is first


def test_reference_provider():
    family = pauli_family(w_signs(3))
    provider = BoundProvider.reference_state(w_state(3))
    # on the pure W state the single-site variance sum is 3 - 1/9
    assert bound_for(provider, family, {1}).value == pytest.approx(26 / 9, abs=1e-12)


def test_zero_and_constant_providers():
    family = pauli_family((1, 1, 1), 3)
    assert bound_for(BoundProvider.zero(), family, {0, 1}).value == 0.0
    const = BoundProvider.constant({frozenset({0}): 2.0}, default=0.5)
    assert bound_for(const, family, {0}).value == 2.0
    assert bound_for(const, family, {1, 2}).value == 0.5


def test_bound_subset_out_of_range():
    with pytest.raises(BoundError):
        bound_for(BoundProvider.zero(), pauli_family((1, 1, 1), 2), {2})


def test_commutator_examples():
    zero = np.diag([1.0, 0.0])
    # (-i)[sx, sy] = 2 sz
    assert commutator_bound(SIGMA_X, SIGMA_Y, zero) == pytest.approx(2.0)
    assert commutator_bound(SIGMA_X, SIGMA_Y, np.eye(2) / 2) == pytest.approx(0.0)
    assert commutator_bound(SIGMA_X, SIGMA_X, zero) == 0.0


def test_commutator_needs_pairs_and_state():
    family = pauli_family((1, 1, 1), 2)
    with pytest.raises(BoundError):
        bound_for(BoundProvider.commutator(), family, {0}, random_density([2, 2], seed=0))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_commutator_below_variance_sum(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(2, 5))
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    b = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    x, y = a + a.conj().T, b + b.conj().T
    rho = random_density([dim], seed=rng)
    assert commutator_bound(x, y, rho) <= variance(x, rho) + variance(y, rho) + 1e-9


def test_min_variance_sum_pauli_qubit():
    assert min_variance_sum([SIGMA_X, SIGMA_Y, SIGMA_Z], seed=0) == pytest.approx(2.0, abs=1e-8)


def test_min_variance_sum_singlet():
    ops = [np.kron(s, np.eye(2)) + np.kron(np.eye(2), s) for s in (SIGMA_X, SIGMA_Y, SIGMA_Z)]
    assert min_variance_sum(ops, seed=1, restarts=4) == pytest.approx(0.0, abs=1e-8)


def test_min_variance_sum_is_upper_estimate_of_sampled_states():
    ops = [SIGMA_X, SIGMA_Z]
    est = min_variance_sum(ops, seed=3)
    rng = np.random.default_rng(4)
    for _ in range(50):
        rho = random_density([2], seed=rng)
        assert sum(variance(x, rho) for x in ops) >= est - 1e-8
    assert est == pytest.approx(1.0, abs=1e-8)


def test_min_variance_sum_monotone_in_restarts():
    rng = np.random.default_rng(5)
    ops = []
    for _ in range(3):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        ops.append(a + a.conj().T)
    values = [min_variance_sum(ops, restarts=r, seed=11) for r in (1, 2, 4, 8)]
    assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


def test_min_variance_sum_rejects_zero_restarts():
    with pytest.raises(ValueError):
        min_variance_sum([SIGMA_X], restarts=0)


def test_provider_from_string(tmp_path):
    assert provider_from_string("zero").strategy == "zero"
    assert provider_from_string("commutator").strategy == "commutator"
    path = tmp_path / "u.json"
    path.write_text(json.dumps({"default": 0, "subsets": {"0": 2, "1,2": 1.5}}))
    const = provider_from_string(f"constant:{path}")
    assert const.values[frozenset({1, 2})] == 1.5
    with pytest.raises(ValueError):
        provider_from_string("family-min")
    with pytest.raises(ValueError):
        provider_from_string("magic")


def test_family_min_bound_is_sound_along_family(w3):
    noise, family, provider = w3
    for q in np.linspace(0, 1, 11):
        rho = noisy_mixture(noise.target, q)
        for subset in ({0}, {1, 2}, {0, 1, 2}):
            ops = [subset_operator(family, k, subset) for k in range(3)]
            reduced = partial_trace(rho, subset)
            v = sum(variance(x, reduced) for x in ops)
            assert v >= bound_for(provider, family, subset).value - 1e-9
