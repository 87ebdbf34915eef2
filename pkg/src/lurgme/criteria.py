"""Local-sum-uncertainty entanglement criteria.

Notation used throughout: for a site subset ``S`` and an observable family,
``v_S = sum_k Var(X_k^S)`` is the variance sum of the subset's collective
operators evaluated on the reduced state, and ``u_S`` is the lower bound
supplied by a :class:`~lurgme.bounds.BoundProvider`. For a bipartition
``L|R`` the biseparable bound is::

    u_L + u_R + (sqrt(v_L - u_L) - sqrt(v_R - u_R))**2

and the GME test compares the total variance sum ``F`` against the smallest
such bound over all bipartitions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .bounds import BoundProvider, bound_for
from .observables import ObservableFamily, SpinConfig, spin_family, spin_matrices, subset_operator
from .tensor import DensityMatrix, DimensionError, expectation, partial_trace, variance

VERDICT_TOL = 1e-9
RADICAND_TOL = 1e-9

DETECTED = "Detected"
INCONCLUSIVE = "Inconclusive"
NOT_FULLY_SEPARABLE = "NotFullySeparable"


class UnsoundBound(ValueError):
    """A provider returned ``u_S > v_S`` at the evaluated state."""

    def __init__(self, subset, radicand: float):
        self.subset = tuple(subset)
        self.radicand = float(radicand)
        super().__init__(
            f"bound exceeds variance sum on subset {self.subset} (v - u = {self.radicand:.3g})"
        )


@dataclass(frozen=True)
class Bipartition:
    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        left, right = tuple(sorted(set(self.left))), tuple(sorted(set(self.right)))
        if not left or not right:
            raise ValueError("both blocks of a bipartition must be nonempty")
        if set(left) & set(right):
            raise ValueError(f"blocks {left} and {right} overlap")
        if min(right) < min(left):
            left, right = right, left
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)

    @property
    def n_sites(self) -> int:
        return len(self.left) + len(self.right)

    def label(self) -> str:
        """1-based rendering such as ``12|34``."""
        sep = "," if self.n_sites > 9 else ""
        fmt = lambda block: sep.join(str(i + 1) for i in block)
        return f"{fmt(self.left)}|{fmt(self.right)}"

    @classmethod
    def from_label(cls, label: str) -> "Bipartition":
        left, right = label.split("|")
        parse = lambda s: tuple(int(c) - 1 for c in (s.split(",") if "," in s else s))
        return cls(parse(left), parse(right))


@dataclass(frozen=True)
class PartitionBound:
    partition: Bipartition
    u_left: float
    u_right: float
    v_left: float
    v_right: float
    w: float

    @property
    def total(self) -> float:
        return self.u_left + self.u_right + self.w**2


@dataclass(frozen=True)
class CriterionReport:
    f_total: float
    partition_bounds: tuple[PartitionBound, ...]
    criterion: str = "gme"

    @property
    def min_bound(self) -> float:
        return min(pb.total for pb in self.partition_bounds)

    @property
    def argmin(self) -> PartitionBound:
        return min(self.partition_bounds, key=lambda pb: pb.total)

    @property
    def f(self) -> float:
        return self.f_total - self.min_bound

    @property
    def verdict(self) -> str:
        return DETECTED if self.f < -VERDICT_TOL else INCONCLUSIVE

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "f_total": self.f_total,
            "min_bound": self.min_bound,
            "f": self.f,
            "verdict": self.verdict,
            "argmin_partition": self.argmin.partition.label(),
            "partition_bounds": [
                {
                    "partition": pb.partition.label(),
                    "u_left": pb.u_left,
                    "u_right": pb.u_right,
                    "v_left": pb.v_left,
                    "v_right": pb.v_right,
                    "w": pb.w,
                    "total": pb.total,
                }
                for pb in self.partition_bounds
            ],
        }


def enumerate_bipartitions(n: int) -> list[Bipartition]:
    """All ``2**(n-1) - 1`` bipartitions of ``n`` sites.

    Each has site 0 in the left block; ordered by the bitmask of the left block.
    """
    if n < 2:
        raise ValueError("need at least 2 sites")
    full = (1 << n) - 1
    parts = []
    for mask in range(1, full, 2):
        left = tuple(i for i in range(n) if mask >> i & 1)
        right = tuple(i for i in range(n) if not mask >> i & 1)
        parts.append(Bipartition(left, right))
    return parts


def _check_dims(rho: DensityMatrix, family: ObservableFamily):
    if tuple(rho.dims) != tuple(family.dims):
        raise DimensionError(f"state dims {rho.dims} do not match observable dims {family.dims}")


def variance_sum(rho: DensityMatrix, family: ObservableFamily, subset: Iterable[int]) -> float:
    """``sum_k Var(X_k^S)`` on the reduction of ``rho`` to ``subset``."""
    subset = sorted(set(subset))
    reduced = rho if len(subset) == rho.n_sites else partial_trace(rho, subset)
    return sum(variance(subset_operator(family, k, subset), reduced) for k in range(family.count))


def f_total(rho: DensityMatrix, family: ObservableFamily) -> float:
    """Variance sum of the full collective operators ``sum_k Var(sum_i O_k,i)``."""
    _check_dims(rho, family)
    return variance_sum(rho, family, range(rho.n_sites))


def _sqrt_gap(v: float, u: float, subset) -> float:
    gap = v - u
    if gap < -RADICAND_TOL:
        raise UnsoundBound(subset, gap)
    return math.sqrt(max(gap, 0.0))


def _w_term(v_left, u_left, v_right, u_right, partition: Bipartition) -> float:
    return _sqrt_gap(v_left, u_left, partition.left) - _sqrt_gap(v_right, u_right, partition.right)


def partition_bound(rho: DensityMatrix, family: ObservableFamily, partition: Bipartition,
                    provider: BoundProvider, include_w: bool = True) -> PartitionBound:
    """Biseparable lower bound for one bipartition.

    Raises :class:`UnsoundBound` if a provider's ``u`` exceeds the measured
    ``v`` by more than ``1e-9``.
    """
    v_l = variance_sum(rho, family, partition.left)
    v_r = variance_sum(rho, family, partition.right)
    u_l = bound_for(provider, family, partition.left, rho).value
    u_r = bound_for(provider, family, partition.right, rho).value
    w = _w_term(v_l, u_l, v_r, u_r, partition) if include_w else 0.0
    return PartitionBound(partition, u_l, u_r, v_l, v_r, w)


def _partitions(n: int, partitions) -> list[Bipartition]:
    if partitions is None:
        return enumerate_bipartitions(n)
    parts = [Bipartition.from_label(p) if isinstance(p, str) else p for p in partitions]
    if not parts or any(p.n_sites != n for p in parts):
        raise ValueError(f"partitions must be nonempty and cover all {n} sites")
    return parts


def gme_criterion(rho: DensityMatrix, family: ObservableFamily, provider: BoundProvider | None = None,
                  partitions: Sequence | None = None, include_w: bool = True) -> CriterionReport:
    """Compare ``F`` with the minimum biseparable bound over bipartitions.

    ``f = F - min_bound < 0`` certifies genuine multipartite entanglement
    (given sound bounds). ``partitions`` restricts the minimum to a subset of
    bipartitions; that is a diagnostic, the certificate needs all of them.
    """
    if rho.n_sites < 2:
        raise ValueError("GME criterion needs at least 2 subsystems")
    provider = BoundProvider.zero() if provider is None else provider
    total = f_total(rho, family)
    bounds = tuple(
        partition_bound(rho, family, p, provider, include_w)
        for p in _partitions(rho.n_sites, partitions)
    )
    return CriterionReport(total, bounds, "gme")


def restrict(family: ObservableFamily, sites: Sequence[int]) -> ObservableFamily:
    return ObservableFamily(tuple(family.dims[i] for i in sites),
                            tuple(family.per_site[i] for i in sites))


def lur_bipartite(rho_ab: DensityMatrix, family: ObservableFamily, u_a: float, u_b: float) -> float:
    """Two-party LUR value ``F^{AB}``; negative means ``rho_ab`` is entangled.

    ``F^{AB} = sum_k Var(A_k + B_k) - (u_a + u_b + M^2)`` with
    ``M = sqrt(sum_k Var A_k - u_a) - sqrt(sum_k Var B_k - u_b)``.
    """
    if rho_ab.n_sites != 2:
        raise ValueError(f"expected a two-party state, got {rho_ab.n_sites} subsystems")
    _check_dims(rho_ab, family)
    v_a = variance_sum(rho_ab, family, [0])
    v_b = variance_sum(rho_ab, family, [1])
    m = _sqrt_gap(v_a, u_a, (0,)) - _sqrt_gap(v_b, u_b, (1,))
    return f_total(rho_ab, family) - (u_a + u_b + m * m)


@dataclass(frozen=True)
class FullSeparabilityReport:
    """The six tripartite full-separability values, keyed like ``"AB"`` and ``"AB|C"``.

    A value of ``None`` marks an ``XY|Z`` entry skipped because its pairwise
    ``F^{XY}`` was already negative.
    """

    values: dict
    skipped: tuple[str, ...] = field(default_factory=tuple)

    @property
    def verdict(self) -> str:
        violated = any(v is not None and v < -VERDICT_TOL for v in self.values.values())
        return NOT_FULLY_SEPARABLE if violated else INCONCLUSIVE

    @property
    def minimum(self) -> float:
        return min(v for v in self.values.values() if v is not None)


def full_separability_tripartite(rho: DensityMatrix, family: ObservableFamily,
                                 provider: BoundProvider | None = None) -> FullSeparabilityReport:
    """Pairwise LUR values on the three reductions plus the three ``XY|Z`` values.

    ``F^{XY|Z} = F - (U_A + U_B + U_C + M_XY^2 + M_XYZ^2)`` with
    ``M_XYZ = sqrt(F^{XY}) - sqrt(sum_k Var Z_k - U_Z)``.

    Notes
    -----
    The pairwise values are sound for any separable reduction. The ``XY|Z``
    values are nonnegative on every pure product state but not on mixtures of
    them: ``|0><0| (x) (|01><01| + |10><10|)/2`` gives ``F^{AB|C} = -2`` with the
    Pauli triple and ``U = 2`` per site. The verdict still counts all six
    values, so a ``NotFullySeparable`` verdict driven only by an ``XY|Z``
    entry is not a certificate.
    """
    if rho.n_sites != 3:
        raise ValueError(f"expected 3 subsystems, got {rho.n_sites}")
    _check_dims(rho, family)
    provider = BoundProvider.zero() if provider is None else provider
    names = "ABC"
    u = [bound_for(provider, family, [i], rho).value for i in range(3)]
    v = [variance_sum(rho, family, [i]) for i in range(3)]
    total = f_total(rho, family)

    values, skipped = {}, []
    for x, y, z in [(0, 1, 2), (0, 2, 1), (1, 2, 0)]:
        pair = names[x] + names[y]
        f_pair = lur_bipartite(partial_trace(rho, [x, y]), restrict(family, [x, y]), u[x], u[y])
        values[pair] = f_pair
        label = f"{pair}|{names[z]}"
        if f_pair < -RADICAND_TOL:
            values[label] = None
            skipped.append(label)
            continue
        m_pair = _sqrt_gap(v[x], u[x], (x,)) - _sqrt_gap(v[y], u[y], (y,))
        m_split = math.sqrt(max(f_pair, 0.0)) - _sqrt_gap(v[z], u[z], (z,))
        values[label] = total - (sum(u) + m_pair**2 + m_split**2)
    order = ["AB", "AC", "BC", "AB|C", "AC|B", "BC|A"]
    return FullSeparabilityReport({k: values[k] for k in order}, tuple(skipped))


def spin_gme_criterion(rho: DensityMatrix, j_per_site, config: SpinConfig,
                       partitions: Sequence | None = None, include_w: bool = True) -> CriterionReport:
    """GME test for ``u = sum h_i Jx_i``, ``v = sum g_i Jy_i``.

    Compares ``Var(u) + Var(v)`` with the minimum over bipartitions of
    ``|c_L| + |c_R| + W^2`` where ``c_S = sum_{i in S} h_i g_i <Jz_i>``.
    Inside ``W`` the same ``|c_S|`` plays the role of the subset bound.
    """
    n = rho.n_sites
    if n < 2:
        raise ValueError("GME criterion needs at least 2 subsystems")
    if config.n_sites != n:
        raise ValueError(f"spin config has {config.n_sites} sites, state has {n}")
    js = list(j_per_site) if isinstance(j_per_site, (list, tuple)) else [j_per_site] * n
    if len(js) != n:
        raise ValueError(f"{len(js)} spins given for {n} sites")
    family = spin_family(js, config)
    _check_dims(rho, family)

    jz_mean = np.array([
        expectation(spin_matrices(js[i])[2], partial_trace(rho, [i])) for i in range(n)
    ])
    weights = np.array(config.h) * np.array(config.g)

    def c_abs(block):
        return abs(float(np.sum(weights[list(block)] * jz_mean[list(block)])))

    total = f_total(rho, family)
    bounds = []
    for p in _partitions(n, partitions):
        v_l = variance_sum(rho, family, p.left)
        v_r = variance_sum(rho, family, p.right)
        u_l, u_r = c_abs(p.left), c_abs(p.right)
        w = _w_term(v_l, u_l, v_r, u_r, p) if include_w else 0.0
        bounds.append(PartitionBound(p, u_l, u_r, v_l, v_r, w))
    return CriterionReport(total, tuple(bounds), "spin")
