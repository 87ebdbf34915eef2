"""State constructors: W states, white-noise mixtures, the 3-qutrit example,
random states, and JSON loading."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .tensor import DensityMatrix, DimensionError, InvalidStateError, kron_all

NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PureState:
    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        amps.setflags(write=False)
        if amps.size != int(np.prod(dims)):
            raise DimensionError(f"{amps.size} amplitudes do not match dims {dims}")
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"state norm is {norm:.12g}, expected 1")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amps)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def density(self) -> DensityMatrix:
        return DensityMatrix(self.dims, self.projector())


@dataclass(frozen=True)
class NoiseFamily:
    """``rho(q) = (1-q) I/D + q |target><target|`` for ``q`` in ``[q_lo, q_hi]``."""

    target: PureState
    q_lo: float = 0.0
    q_hi: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.q_lo < self.q_hi <= 1.0:
            raise ValueError(f"invalid parameter range [{self.q_lo}, {self.q_hi}]")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.target.dims

    def at(self, q: float) -> DensityMatrix:
        return noisy_mixture(self.target, q)


def basis_index(digits: Sequence[int], dims: Sequence[int]) -> int:
    """Flat index of the computational basis vector ``|d0 d1 ...>``."""
    return int(np.ravel_multi_index(tuple(digits), tuple(dims)))


def w_state(n: int) -> PureState:
    """Single-excitation symmetric state on ``n`` qubits."""
    if n < 2:
        raise ValueError("W state needs at least 2 qubits")
    amps = np.zeros(2**n, dtype=complex)
    for site in range(n):
        digits = [0] * n
        digits[site] = 1
        amps[basis_index(digits, [2] * n)] = 1.0
    return PureState((2,) * n, amps / math.sqrt(n))


def qutrit_phi() -> PureState:
    """``(|012> + |021> + |111>)/sqrt(3)`` on three qutrits."""
    dims = (3, 3, 3)
    amps = np.zeros(27, dtype=complex)
    for digits in [(0, 1, 2), (0, 2, 1), (1, 1, 1)]:
        amps[basis_index(digits, dims)] = 1.0
    return PureState(dims, amps / math.sqrt(3))


def ghz_state(n: int, d: int = 2) -> PureState:
    amps = np.zeros(d**n, dtype=complex)
    for level in range(d):
        amps[basis_index([level] * n, [d] * n)] = 1.0
    return PureState((d,) * n, amps / math.sqrt(d))


def noisy_mixture(psi: PureState, q: float) -> DensityMatrix:
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"mixing parameter q={q} outside [0, 1]")
    dim = psi.amplitudes.size
    mat = (1.0 - q) / dim * np.eye(dim) + q * psi.projector()
    return DensityMatrix(psi.dims, mat)


def maximally_mixed(dims: Sequence[int]) -> DensityMatrix:
    dim = int(np.prod(dims))
    return DensityMatrix(tuple(dims), np.eye(dim) / dim)


def mix(states: Sequence[DensityMatrix], weights: Sequence[float]) -> DensityMatrix:
    """Convex combination of states sharing the same ``dims``."""
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError("mixing weights must be a probability vector")
    dims = states[0].dims
    if any(s.dims != dims for s in states):
        raise DimensionError("cannot mix states with different dims")
    mat = sum(w * s.matrix for w, s in zip(weights, states))
    return DensityMatrix(dims, mat)


def fully_separable_threshold(n: int) -> float:
    """Largest white-noise weight ``q`` at which the noisy ``n``-qubit W state is
    known to be fully separable."""
    if n < 2:
        raise ValueError("need n >= 2")
    if n <= 5:
        return 1.0 / (1.0 + 2**n * math.sqrt((n - 1) / (2 * n)))
    return n / (n + (n - 2) * 2**n)


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def _ginibre(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_density(dims: Sequence[int], seed=None) -> DensityMatrix:
    """Full-rank random state ``G G^† / tr`` with complex Gaussian ``G``."""
    rng = _rng(seed)
    return DensityMatrix(tuple(dims), _ginibre(int(np.prod(dims)), rng))


def random_pure(dims: Sequence[int], seed=None) -> PureState:
    rng = _rng(seed)
    dim = int(np.prod(dims))
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return PureState(tuple(dims), v / np.linalg.norm(v))


def _reorder(mat: np.ndarray, dims_in_order: list[int], order: list[int]) -> np.ndarray:
    """Permute subsystems of ``mat``; ``order[i]`` is the original site placed at slot ``i``.

    ``mat`` is laid out as ``kron`` over ``order``; the result is laid out in
    site order 0..n-1.
    """
    n = len(order)
    t = mat.reshape(dims_in_order + dims_in_order)
    inv = np.argsort(order)
    perm = list(inv) + [n + i for i in inv]
    dim = mat.shape[0]
    return t.transpose(perm).reshape(dim, dim)


def product_across(rho_left: np.ndarray, rho_right: np.ndarray, left, right, dims) -> np.ndarray:
    """Embed ``rho_left ⊗ rho_right`` with the blocks living on the given site sets."""
    left, right = sorted(left), sorted(right)
    order = left + right
    mat = np.kron(rho_left, rho_right)
    return _reorder(mat, [dims[i] for i in order], order)


def random_biseparable(dims: Sequence[int], partition, terms: int = 1, seed=None,
                       rank: int | None = None) -> DensityMatrix:
    """Convex mixture of ``terms`` random product states across ``partition``.

    ``partition`` is anything with ``left``/``right`` site sets (a
    :class:`~lurgme.criteria.Bipartition`) or a ``(left, right)`` pair.
    ``rank`` limits the rank of each random block; ``rank=1`` gives pure
    product terms, which sit closer to the criterion boundary.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    rng = _rng(seed)
    left, right = (partition.left, partition.right) if hasattr(partition, "left") else partition
    dims = list(dims)
    d_l = int(np.prod([dims[i] for i in left]))
    d_r = int(np.prod([dims[i] for i in right]))
    weights = rng.dirichlet(np.ones(terms)) if terms > 1 else np.ones(1)
    mat = np.zeros((int(np.prod(dims)),) * 2, dtype=complex)
    for w in weights:
        r_l = _ginibre(d_l, rng, None if rank is None else min(rank, d_l))
        r_r = _ginibre(d_r, rng, None if rank is None else min(rank, d_r))
        mat += w * product_across(r_l, r_r, left, right, dims)
    return DensityMatrix(tuple(dims), mat)


def random_fully_separable(dims: Sequence[int], terms: int = 1, seed=None,
                           rank: int | None = None) -> DensityMatrix:
    rng = _rng(seed)
    weights = rng.dirichlet(np.ones(terms)) if terms > 1 else np.ones(1)
    mat = sum(
        w * kron_all(_ginibre(d, rng, None if rank is None else min(rank, d)) for d in dims)
        for w in weights
    )
    return DensityMatrix(tuple(dims), mat)


def _complex_entries(raw, path: str) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{path}: entries must be [re, im] pairs") from exc
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"{path}: expected a list of [re, im] pairs, got shape {arr.shape}")
    return arr[:, 0] + 1j * arr[:, 1]


def state_from_dict(doc: dict):
    """Build a :class:`DensityMatrix` or :class:`PureState` from a JSON document.

    Accepted forms::

        {"dims": [...], "matrix": [[re, im], ...]}      # row-major, D*D entries
        {"dims": [...], "amplitudes": [[re, im], ...]}  # D entries
    """
    if "dims" not in doc:
        raise ValueError("state: missing field 'dims'")
    dims = tuple(int(d) for d in doc["dims"])
    dim = int(np.prod(dims))
    if "matrix" in doc:
        entries = _complex_entries(doc["matrix"], "state.matrix")
        if entries.size != dim * dim:
            raise ValueError(f"state.matrix: expected {dim * dim} entries, got {entries.size}")
        return DensityMatrix(dims, entries.reshape(dim, dim))
    if "amplitudes" in doc:
        entries = _complex_entries(doc["amplitudes"], "state.amplitudes")
        return PureState(dims, entries)
    raise ValueError("state: need either 'matrix' or 'amplitudes'")


def load_state(path) -> DensityMatrix | PureState:
    return state_from_dict(json.loads(Path(path).read_text()))


def _pairs(values: np.ndarray) -> list[list[float]]:
    return [[float(v.real), float(v.imag)] for v in np.asarray(values).reshape(-1)]


def state_to_dict(state) -> dict:
    if isinstance(state, PureState):
        return {"dims": list(state.dims), "amplitudes": _pairs(state.amplitudes)}
    return {"dims": list(state.dims), "matrix": _pairs(state.matrix)}
