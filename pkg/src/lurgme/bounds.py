"""Lower bounds ``U`` on subset variance sums.

The criteria need, for every site subset ``S``, a number ``U_S`` that the
caller treats as a lower bound on ``sum_k Var(X_k^S)`` where ``X_k^S`` is the
collective operator of ``S``. Which relation should produce ``U_S`` is a
modelling choice, so several strategies are provided:

``zero``
    ``U = 0``; always sound.
``constant``
    user-supplied numbers per subset (e.g. 2 for a single-qubit Pauli triple).
``commutator``
    ``|<(-i)[X_1, X_2]>|`` at the evaluated state; needs exactly two
    observables per site.
``reference``
    the variance sum at a fixed pure reference state.
``family-min``
    the minimum of the variance sum over a white-noise family
    ``(1-q) I/D + q |psi><psi|``.

``family-min`` and ``reference`` describe a state family rather than all
states; they reproduce worked examples but are not certified bounds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

from .observables import ObservableFamily, subset_operator
from .states import NoiseFamily, PureState
from .tensor import DensityMatrix, partial_trace, variance, _check_op, _real

STRATEGIES = ("zero", "constant", "commutator", "reference", "family-min")


class BoundError(ValueError):
    pass


def _key(subset) -> frozenset:
    return frozenset(int(i) for i in subset)


@dataclass(frozen=True, eq=False)
class BoundProvider:
    strategy: str = "zero"
    values: Mapping[frozenset, float] = field(default_factory=dict)
    default: float = 0.0
    noise: NoiseFamily | None = None
    reference: PureState | None = None
    grid: int = 1001
    overrides: Mapping[frozenset, float] = field(default_factory=dict)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown bound strategy {self.strategy!r}; choose from {STRATEGIES}")
        values = {_key(k): float(v) for k, v in self.values.items()}
        overrides = {_key(k): float(v) for k, v in self.overrides.items()}
        if self.strategy == "constant" and (self.default < 0 or any(v < 0 for v in values.values())):
            raise ValueError("constant bounds must be non-negative")
        if self.strategy == "family-min":
            if self.noise is None:
                raise ValueError("family-min provider needs a noise family")
            if self.grid < 2:
                raise ValueError("grid resolution must be at least 2 points")
        if self.strategy == "reference" and self.reference is None:
            raise ValueError("reference provider needs a reference state")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "overrides", overrides)

    @classmethod
    def zero(cls) -> "BoundProvider":
        return cls("zero")

    @classmethod
    def constant(cls, values: Mapping = (), default: float = 0.0) -> "BoundProvider":
        return cls("constant", values=dict(values), default=default)

    @classmethod
    def commutator(cls) -> "BoundProvider":
        return cls("commutator")

    @classmethod
    def family_minimum(cls, noise: NoiseFamily, grid: int = 1001) -> "BoundProvider":
        return cls("family-min", noise=noise, grid=grid)

    @classmethod
    def reference_state(cls, psi: PureState) -> "BoundProvider":
        return cls("reference", reference=psi)

    @property
    def state_dependent(self) -> bool:
        return self.strategy == "commutator"


@dataclass(frozen=True)
class SubsetBound:
    subset: tuple[int, ...]
    value: float
    strategy: str
    diagnostics: dict = field(default_factory=dict)


def commutator_bound(x: np.ndarray, y: np.ndarray, rho) -> float:
    """``|tr(rho (-i)[x, y])|``, which never exceeds ``Var(x) + Var(y)``."""
    mat = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    x = _check_op(x, mat.shape[0])
    y = _check_op(y, mat.shape[0])
    comm = -1j * (x @ y - y @ x)
    return abs(_real(np.einsum("ij,ji->", comm, mat), "commutator expectation"))


def _moments(ops: Sequence[np.ndarray], rho: np.ndarray) -> np.ndarray:
    """Rows ``(<X>, <X^2>)`` per operator."""
    return np.array([
        [np.einsum("ij,ji->", x, rho).real, np.einsum("ij,ji->", x @ x, rho).real]
        for x in ops
    ])


def _family_minimum(noise: NoiseFamily, ops: Sequence[np.ndarray], subset, grid: int):
    target = partial_trace(noise.target.projector(), subset, noise.dims)
    dim = target.shape[0]
    m0 = _moments(ops, np.eye(dim) / dim)
    m1 = _moments(ops, target)

    # Expectations are affine in q, so the variance sum is an affine term minus
    # a sum of squares: concave in q. The grid contains both endpoints, where a
    # concave function attains its minimum, so the scan is exact.
    def vsum(q):
        q = np.asarray(q, dtype=float)[..., None]
        first = (1 - q) * m0[:, 0] + q * m1[:, 0]
        second = (1 - q) * m0[:, 1] + q * m1[:, 1]
        return np.sum(second - first**2, axis=-1)

    qs = np.linspace(noise.q_lo, noise.q_hi, grid)
    vals = vsum(qs)
    i = int(np.argmin(vals))
    q_best, v_best = float(qs[i]), float(vals[i])
    return max(v_best, 0.0), q_best


def bound_for(provider: BoundProvider, family: ObservableFamily, subset,
              context: DensityMatrix | None = None) -> SubsetBound:
    """Lower bound ``U_S`` on the variance sum of ``subset``'s collective operators."""
    subset = tuple(sorted(_key(subset)))
    if not subset or subset[0] < 0 or subset[-1] >= family.n_sites:
        raise BoundError(f"subset {subset} out of range for {family.n_sites} sites")
    key = _key(subset)
    strategy = provider.strategy
    if key in provider.overrides:
        return SubsetBound(subset, provider.overrides[key], strategy, {"override": True})

    if strategy == "zero":
        return SubsetBound(subset, 0.0, strategy)
    if strategy == "constant":
        return SubsetBound(subset, provider.values.get(key, provider.default), strategy)

    ops = [subset_operator(family, k, subset) for k in range(family.count)]
    if strategy == "commutator":
        if family.count != 2:
            raise BoundError(f"commutator bound needs exactly 2 observables per site, family has {family.count}")
        if context is None:
            raise BoundError("commutator bound needs the evaluated state")
        reduced = partial_trace(context, subset)
        return SubsetBound(subset, commutator_bound(ops[0], ops[1], reduced), strategy)

    cache_key = (family.fingerprint(), key)
    cached = provider._cache.get(cache_key)
    if cached is not None:
        return cached
    if strategy == "reference":
        ref = provider.reference
        reduced = partial_trace(ref.projector(), subset, ref.dims)
        value = sum(variance(x, reduced) for x in ops)
        result = SubsetBound(subset, float(value), strategy)
    else:
        value, q_min = _family_minimum(provider.noise, ops, subset, provider.grid)
        result = SubsetBound(subset, value, strategy, {"q_min": q_min})
    provider._cache[cache_key] = result
    return result


def min_variance_sum(ops: Sequence[np.ndarray], dim: int | None = None, restarts: int = 8,
                     seed=None) -> float:
    """Estimate ``min_psi sum_k Var(ops[k], psi)`` over pure states.

    The variance sum is concave in the state, so its minimum over all density
    matrices is attained on a pure state. Each restart runs L-BFGS on the
    normalised parameterisation ``psi = z / |z|`` from a random start. The
    result is an *upper* estimate of the true minimum; treat it as a bound
    only after independent confirmation.
    """
    ops = [np.asarray(x, dtype=complex) for x in ops]
    dim = ops[0].shape[0] if dim is None else dim
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    squares = [x @ x for x in ops]
    rng = np.random.default_rng(seed)

    def fun(params):
        z = params[:dim] + 1j * params[dim:]
        norm = np.vdot(z, z).real
        total, grad = 0.0, np.zeros(dim, dtype=complex)
        for x, x2 in zip(ops, squares):
            xz, x2z = x @ z, x2 @ z
            mean = np.vdot(z, xz).real / norm
            second = np.vdot(z, x2z).real / norm
            total += second - mean**2
            grad += (x2z - second * z) / norm - 2 * mean * (xz - mean * z) / norm
        return total, np.concatenate([2 * grad.real, 2 * grad.imag])

    best = np.inf
    for _ in range(restarts):
        start = rng.standard_normal(2 * dim)
        res = minimize(fun, start, jac=True, method="L-BFGS-B",
                       options={"gtol": 1e-12, "ftol": 1e-15, "maxiter": 5000})
        best = min(best, float(res.fun))
    return max(best, 0.0)


def provider_from_string(spec: str, noise: NoiseFamily | None = None,
                         reference: PureState | None = None, grid: int = 1001) -> BoundProvider:
    """Parse ``zero | constant:<file> | commutator | family-min | reference``.

    A constant file holds ``{"default": 0, "subsets": {"0": 2, "1,2": 0}}``
    with 0-based comma-separated site lists as keys.
    """
    if spec == "zero":
        return BoundProvider.zero()
    if spec == "commutator":
        return BoundProvider.commutator()
    if spec == "family-min":
        if noise is None:
            raise ValueError("--bounds family-min needs a noise family (reference target)")
        return BoundProvider.family_minimum(noise, grid)
    if spec == "reference":
        if reference is None:
            raise ValueError("--bounds reference needs a reference pure state")
        return BoundProvider.reference_state(reference)
    if spec.startswith("constant:"):
        doc = json.loads(Path(spec.split(":", 1)[1]).read_text())
        return constant_from_dict(doc)
    raise ValueError(f"unknown bound specification {spec!r}")


def constant_from_dict(doc: dict) -> BoundProvider:
    subsets = {}
    for key, value in doc.get("subsets", {}).items():
        try:
            subsets[frozenset(int(s) for s in str(key).split(","))] = float(value)
        except ValueError as exc:
            raise ValueError(f"bounds.subsets: bad subset key {key!r}") from exc
    return BoundProvider.constant(subsets, default=float(doc.get("default", 0.0)))
