"""Dense linear algebra on multipartite operators.

Everything here works on plain ``numpy`` arrays. Subsystems are addressed by
0-based position in a dimension vector ``dims``; the joint space is ordered
as ``kron(site 0, site 1, ...)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
IMAG_TOL = 1e-9


class InvalidStateError(ValueError):
    """Base class for density-matrix invariant violations."""


class NotHermitianError(InvalidStateError):
    pass


class TraceError(InvalidStateError):
    pass


class NotPSDError(InvalidStateError):
    pass


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class DensityDiagnostics:
    hermiticity: float
    trace_deviation: float
    min_eigenvalue: float


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state on ``prod(dims)``-dimensional space.

    Construct through :func:`validate_density` (or the state constructors);
    the invariants are checked on construction and the array is made
    read-only.
    """

    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        mat = np.array(self.matrix, dtype=complex)
        mat.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)
        _enforce(mat, dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_sites(self) -> int:
        return len(self.dims)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def kron_all(ops: Iterable[np.ndarray]) -> np.ndarray:
    return reduce(kron, ops)


def embed(op: np.ndarray, site: int, dims: Sequence[int]) -> np.ndarray:
    """Return ``I ⊗ ... ⊗ op ⊗ ... ⊗ I`` with ``op`` acting on ``site``."""
    op = np.asarray(op, dtype=complex)
    dims = list(dims)
    if not 0 <= site < len(dims):
        raise DimensionError(f"site {site} out of range for {len(dims)} subsystems")
    if op.shape != (dims[site], dims[site]):
        raise DimensionError(
            f"operator of shape {op.shape} does not fit subsystem {site} of dimension {dims[site]}"
        )
    d_left = int(np.prod(dims[:site], dtype=int))
    d_right = int(np.prod(dims[site + 1:], dtype=int))
    return np.kron(np.kron(np.eye(d_left), op), np.eye(d_right))


def _dims_of(rho, dims=None) -> tuple[np.ndarray, tuple[int, ...]]:
    if isinstance(rho, DensityMatrix):
        return rho.matrix, rho.dims
    mat = np.asarray(rho, dtype=complex)
    if dims is None:
        dims = (mat.shape[0],)
    return mat, tuple(dims)


def partial_trace(rho, keep, dims: Sequence[int] | None = None):
    """Trace out every subsystem not in ``keep``.

    Kept subsystems stay in their original relative order. When ``rho`` is a
    :class:`DensityMatrix` the result is one too; a raw array (with explicit
    ``dims``) gives a raw array back.
    """
    mat, dims = _dims_of(rho, dims)
    keep = sorted(set(int(k) for k in keep))
    n = len(dims)
    if not keep:
        raise DimensionError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= n:
        raise DimensionError(f"keep indices {keep} out of range for {n} subsystems")
    if mat.shape != (int(np.prod(dims)),) * 2:
        raise DimensionError(f"matrix shape {mat.shape} does not match dims {dims}")

    traced = [i for i in range(n) if i not in keep]
    d_keep = int(np.prod([dims[i] for i in keep], dtype=int))
    d_tr = int(np.prod([dims[i] for i in traced], dtype=int))
    t = mat.reshape(dims + dims)
    perm = keep + traced + [n + i for i in keep] + [n + i for i in traced]
    t = t.transpose(perm).reshape(d_keep, d_tr, d_keep, d_tr)
    reduced = np.einsum("ajbj->ab", t)

    if isinstance(rho, DensityMatrix):
        return DensityMatrix(tuple(dims[i] for i in keep), reduced)
    return reduced


def _check_op(op: np.ndarray, size: int) -> np.ndarray:
    op = np.asarray(op, dtype=complex)
    if op.shape != (size, size):
        raise DimensionError(f"operator shape {op.shape} does not match state dimension {size}")
    dev = hermiticity(op)
    if dev > HERMITIAN_TOL:
        raise NotHermitianError(f"observable is not Hermitian (max deviation {dev:.3g})")
    return op


def hermiticity(mat: np.ndarray) -> float:
    """Max ``|m_ij - conj(m_ji)|``."""
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0.0
    return float(np.max(np.abs(mat - mat.conj().T)))


def _real(value: complex, what: str) -> float:
    if abs(value.imag) > IMAG_TOL:
        raise ValueError(f"{what} has imaginary residue {value.imag:.3g}")
    return float(value.real)


def expectation(op: np.ndarray, rho) -> float:
    """``tr(op rho)`` for Hermitian ``op``."""
    mat, _ = _dims_of(rho)
    op = _check_op(op, mat.shape[0])
    # tr(AB) = sum_ij A_ij B_ji
    return _real(np.einsum("ij,ji->", op, mat), "expectation")


def variance(op: np.ndarray, rho) -> float:
    """``tr(op^2 rho) - tr(op rho)^2``, clamped at 0 for float dust."""
    mat, _ = _dims_of(rho)
    op = _check_op(op, mat.shape[0])
    mean = _real(np.einsum("ij,ji->", op, mat), "expectation")
    second = _real(np.einsum("ij,ji->", op @ op, mat), "second moment")
    var = second - mean * mean
    if var < -PSD_TOL:
        raise InvalidStateError(f"negative variance {var:.3g}; state is not positive")
    return max(var, 0.0)


def density_diagnostics(matrix: np.ndarray) -> DensityDiagnostics:
    mat = np.asarray(matrix, dtype=complex)
    herm = hermiticity(mat)
    tr_dev = abs(np.trace(mat) - 1.0)
    hpart = 0.5 * (mat + mat.conj().T)
    min_eig = float(np.linalg.eigvalsh(hpart)[0])
    return DensityDiagnostics(herm, float(tr_dev), min_eig)


def _enforce(mat: np.ndarray, dims: tuple[int, ...]) -> DensityDiagnostics:
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"density matrix must be square, got shape {mat.shape}")
    if not dims or any(d < 2 for d in dims):
        raise DimensionError(f"subsystem dimensions must all be >= 2, got {dims}")
    if int(np.prod(dims)) != mat.shape[0]:
        raise DimensionError(f"matrix size {mat.shape[0]} != product of dims {dims}")
    if not np.all(np.isfinite(mat)):
        raise InvalidStateError("matrix has non-finite entries")
    diag = density_diagnostics(mat)
    if diag.hermiticity > HERMITIAN_TOL:
        raise NotHermitianError(f"not Hermitian: max deviation {diag.hermiticity:.3g}")
    if diag.trace_deviation > TRACE_TOL:
        raise TraceError(f"trace differs from 1 by {diag.trace_deviation:.3g}")
    if diag.min_eigenvalue < -PSD_TOL:
        raise NotPSDError(f"not positive semidefinite: min eigenvalue {diag.min_eigenvalue:.3g}")
    return diag


def validate_density(matrix: np.ndarray, dims: Sequence[int]) -> DensityMatrix:
    """Check every state invariant and wrap ``matrix`` as a :class:`DensityMatrix`.

    Raises
    ------
    NotHermitianError, TraceError, NotPSDError, DimensionError
        One distinct exception type per violated invariant; the message carries
        the measured deviation.
    """
    return DensityMatrix(tuple(dims), matrix)
