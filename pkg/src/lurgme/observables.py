"""Per-site observable families and collective (summed) operators."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .tensor import HERMITIAN_TOL, DimensionError, NotHermitianError, embed, hermiticity

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


@dataclass(frozen=True, eq=False)
class ObservableFamily:
    """Observables ``per_site[i][k]``; the ``k``-th ones are summed across sites.

    Every site must carry the same number of observables.
    """

    dims: tuple[int, ...]
    per_site: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(self.per_site) != len(dims):
            raise DimensionError(f"{len(self.per_site)} sites of observables for {len(dims)} subsystems")
        counts = {len(ops) for ops in self.per_site}
        if len(counts) != 1 or 0 in counts:
            raise ValueError(f"every site needs the same nonzero number of observables, got {sorted(counts)}")
        frozen = []
        for i, ops in enumerate(self.per_site):
            site_ops = []
            for k, op in enumerate(ops):
                op = np.array(op, dtype=complex)
                if op.shape != (dims[i], dims[i]):
                    raise DimensionError(f"observable {k} on site {i} has shape {op.shape}, expected {dims[i]}x{dims[i]}")
                if hermiticity(op) > HERMITIAN_TOL:
                    raise NotHermitianError(f"observable {k} on site {i} is not Hermitian")
                op.setflags(write=False)
                site_ops.append(op)
            frozen.append(tuple(site_ops))
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "per_site", tuple(frozen))

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    @property
    def count(self) -> int:
        return len(self.per_site[0])

    def fingerprint(self) -> bytes:
        return b"".join(op.tobytes() for ops in self.per_site for op in ops) + bytes(self.dims)


@dataclass(frozen=True)
class SpinConfig:
    """Weights of ``u = sum_i h_i J_x,i`` and ``v = sum_i g_i J_y,i``."""

    h: tuple[float, ...]
    g: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "h", tuple(float(x) for x in self.h))
        object.__setattr__(self, "g", tuple(float(x) for x in self.g))
        if len(self.h) != len(self.g):
            raise ValueError(f"h has {len(self.h)} weights but g has {len(self.g)}")

    @property
    def n_sites(self) -> int:
        return len(self.h)


def pauli_family(signs: Sequence[Sequence[int]], n_sites: int | None = None) -> ObservableFamily:
    """Site ``i`` gets ``(s_i1 σx, s_i2 σy, s_i3 σz)``.

    ``signs`` may be a single triple, which is then repeated over ``n_sites``.
    """
    signs = [tuple(s) for s in signs] if np.ndim(signs) == 2 else [tuple(signs)] * int(n_sites)
    if n_sites is not None and len(signs) != n_sites:
        raise ValueError(f"got {len(signs)} sign triples for {n_sites} sites")
    for triple in signs:
        if len(triple) != 3 or any(s not in (1, -1) for s in triple):
            raise ValueError(f"sign triple {triple} must be three entries from {{+1, -1}}")
    per_site = [tuple(s * p for s, p in zip(triple, PAULIS)) for triple in signs]
    return ObservableFamily((2,) * len(signs), tuple(per_site))


def _spin_value(j) -> float:
    twice = 2 * float(j)
    if twice <= 0 or not twice.is_integer():
        raise ValueError(f"spin j={j} must be a positive integer or half-integer")
    return twice / 2


def spin_matrices(j) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Spin-``j`` matrices in the ``|j, m>`` basis with ``m = j, j-1, ..., -j``.

    ``[Jx, Jy] = i Jz``.
    """
    j = _spin_value(j)
    m = np.arange(j, -j - 1, -1)
    # <m+1|J+|m> on the first superdiagonal
    jplus = np.diag(np.sqrt(j * (j + 1) - m[1:] * (m[1:] + 1)), 1).astype(complex)
    jminus = jplus.conj().T
    jx = 0.5 * (jplus + jminus)
    jy = -0.5j * (jplus - jminus)
    jz = np.diag(m).astype(complex)
    return jx, jy, jz


def _per_site_j(j, n_sites: int) -> list:
    return list(j) if isinstance(j, (list, tuple)) else [j] * n_sites


def spin_family(j, config: SpinConfig) -> ObservableFamily:
    """Two observables per site: ``(h_i Jx, g_i Jy)``."""
    js = _per_site_j(j, config.n_sites)
    if len(js) != config.n_sites:
        raise ValueError(f"{len(js)} spins given for {config.n_sites} sites")
    per_site, dims = [], []
    for ji, hi, gi in zip(js, config.h, config.g):
        jx, jy, _ = spin_matrices(ji)
        per_site.append((hi * jx, gi * jy))
        dims.append(jx.shape[0])
    return ObservableFamily(tuple(dims), tuple(per_site))


def spin_triple_family(j, signs: Sequence[Sequence[int]]) -> ObservableFamily:
    """Site ``i`` gets ``(s_i1 Jx, s_i2 Jy, s_i3 Jz)`` for its spin."""
    js = _per_site_j(j, len(signs))
    per_site, dims = [], []
    for ji, triple in zip(js, signs):
        mats = spin_matrices(ji)
        per_site.append(tuple(s * m for s, m in zip(triple, mats)))
        dims.append(mats[0].shape[0])
    return ObservableFamily(tuple(dims), tuple(per_site))


def collective_operator(family: ObservableFamily, k: int, subset: Iterable[int]) -> np.ndarray:
    """``sum_{i in subset} embed(per_site[i][k], i)`` on the full space.

    See :func:`subset_operator` for the same sum on the subset's own space.
    """
    subset = sorted(set(int(i) for i in subset))
    if not subset:
        raise ValueError("subset must be nonempty")
    if not 0 <= k < family.count:
        raise IndexError(f"observable index {k} out of range for family with {family.count}")
    if subset[0] < 0 or subset[-1] >= family.n_sites:
        raise IndexError(f"subset {subset} out of range for {family.n_sites} sites")
    return sum(embed(family.per_site[i][k], i, family.dims) for i in subset)


def subset_operator(family: ObservableFamily, k: int, subset: Iterable[int]) -> np.ndarray:
    """Collective operator of ``subset`` on the tensor space of that subset only.

    The ordering of factors follows the site order, matching
    :func:`~lurgme.tensor.partial_trace` output.
    """
    subset = sorted(set(int(i) for i in subset))
    if not subset:
        raise ValueError("subset must be nonempty")
    sub_dims = [family.dims[i] for i in subset]
    return sum(embed(family.per_site[i][k], pos, sub_dims) for pos, i in enumerate(subset))


def family_from_dict(doc: dict) -> ObservableFamily:
    """Build an observable family from a JSON document.

    Either inline matrices::

        {"dims": [...], "sites": [[{"matrix": [[re, im], ...]}, ...], ...]}

    or a built-in pattern::

        {"pattern": "pauli", "signs": [[1, 1, 1], ...]}
        {"pattern": "spin", "j": [1, 1, 1], "h": [...], "g": [...]}
        {"pattern": "spin3", "j": [1, 1, 1], "signs": [[1, 1, 1], ...]}
    """
    pattern = doc.get("pattern")
    if pattern == "pauli":
        if "signs" not in doc:
            raise ValueError("observables.signs: required for pattern 'pauli'")
        return pauli_family(doc["signs"])
    if pattern == "spin":
        for key in ("j", "h", "g"):
            if key not in doc:
                raise ValueError(f"observables.{key}: required for pattern 'spin'")
        return spin_family(doc["j"], SpinConfig(doc["h"], doc["g"]))
    if pattern == "spin3":
        return spin_triple_family(doc["j"], doc["signs"])
    if pattern is not None:
        raise ValueError(f"observables.pattern: unknown pattern {pattern!r}")
    if "dims" not in doc or "sites" not in doc:
        raise ValueError("observables: need 'pattern' or both 'dims' and 'sites'")
    dims = tuple(int(d) for d in doc["dims"])
    per_site = []
    for i, site in enumerate(doc["sites"]):
        ops = []
        for k, entry in enumerate(site):
            raw = np.asarray(entry["matrix"], dtype=float)
            if raw.ndim != 2 or raw.shape[1] != 2 or raw.shape[0] != dims[i] ** 2:
                raise ValueError(f"observables.sites[{i}][{k}].matrix: expected {dims[i] ** 2} [re, im] pairs")
            ops.append((raw[:, 0] + 1j * raw[:, 1]).reshape(dims[i], dims[i]))
        per_site.append(tuple(ops))
    return ObservableFamily(dims, tuple(per_site))


def load_family(path) -> ObservableFamily:
    return family_from_dict(json.loads(Path(path).read_text()))
