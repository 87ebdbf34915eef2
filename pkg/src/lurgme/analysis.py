"""Sweeps over noise families, bisection thresholds, and the built-in demos."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .bounds import BoundProvider, constant_from_dict
from .criteria import Bipartition, CriterionReport, gme_criterion, spin_gme_criterion
from .observables import ObservableFamily, SpinConfig, family_from_dict, pauli_family
from .states import NoiseFamily, PureState, fully_separable_threshold, ghz_state, qutrit_phi, state_from_dict, w_state

CSV_HEADER = ("q", "f", "f_total", "min_bound", "argmin_partition")
BISECTION_TOL = 1e-6

# detection thresholds as reported alongside the worked examples
REFERENCE_THRESHOLDS = {"w3": 0.512, "w4": 0.857, "w5": 0.651, "w6": 0.46, "qutrit3": 0.632}


class ConfigError(ValueError):
    pass


class NoSignChange(ValueError):
    def __init__(self, lo, hi, f_lo, f_hi):
        self.f_lo, self.f_hi = f_lo, f_hi
        super().__init__(f"f does not change sign on [{lo}, {hi}]: f(lo)={f_lo:.6g}, f(hi)={f_hi:.6g}")


@dataclass(frozen=True)
class SpinObservables:
    """Spin-weight setup evaluated through :func:`spin_gme_criterion`."""

    j: tuple
    config: SpinConfig


@dataclass(frozen=True)
class Setup:
    name: str
    noise: NoiseFamily
    observables: ObservableFamily | SpinObservables
    provider: BoundProvider | None = None
    bracket: tuple[float, float] = (0.0, 1.0)
    partitions: tuple | None = None


@dataclass(frozen=True)
class SweepRow:
    q: float
    f: float
    f_total: float
    min_bound: float
    argmin_partition: Bipartition


@dataclass(frozen=True)
class ThresholdResult:
    q_star: float
    bracket: tuple[float, float]
    iterations: int
    sign_lo: int
    sign_hi: int


@dataclass(frozen=True)
class FullSepRow:
    n: int
    q_gme: float | None
    q_fullsep: float


def evaluate(noise: NoiseFamily, observables, provider: BoundProvider | None, q: float,
             partitions=None) -> CriterionReport:
    rho = noise.at(q)
    if isinstance(observables, SpinObservables):
        return spin_gme_criterion(rho, list(observables.j), observables.config, partitions)
    return gme_criterion(rho, observables, provider, partitions)


def _evaluate_at(noise, observables, provider, q, partitions):
    try:
        return evaluate(noise, observables, provider, q, partitions)
    except ValueError as exc:
        exc.q = q
        raise


def sweep(noise: NoiseFamily, observables, provider: BoundProvider | None = None,
          grid: int = 101, partitions=None) -> list[SweepRow]:
    """Evaluate the criterion on ``grid`` evenly spaced ``q`` of the family.

    Errors raised by the criterion carry the offending value as ``exc.q``.
    """
    if grid < 2:
        raise ValueError("grid must have at least 2 points")
    rows = []
    for q in np.linspace(noise.q_lo, noise.q_hi, grid):
        report = _evaluate_at(noise, observables, provider, float(q), partitions)
        rows.append(SweepRow(float(q), report.f, report.f_total, report.min_bound,
                             report.argmin.partition))
    return rows


def find_threshold(noise: NoiseFamily, observables, provider: BoundProvider | None = None,
                   bracket: Sequence[float] = (0.0, 1.0), partitions=None,
                   tol: float = BISECTION_TOL) -> ThresholdResult:
    """Bisect for the ``q`` where ``f`` crosses zero inside ``bracket``."""
    lo, hi = float(bracket[0]), float(bracket[1])
    f = lambda q: _evaluate_at(noise, observables, provider, q, partitions).f
    f_lo, f_hi = f(lo), f(hi)
    if np.sign(f_lo) == np.sign(f_hi) or f_lo == 0 or f_hi == 0:
        raise NoSignChange(lo, hi, f_lo, f_hi)
    s_lo, s_hi = int(np.sign(f_lo)), int(np.sign(f_hi))
    iterations = 0
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if np.sign(f(mid)) == s_lo:
            lo = mid
        else:
            hi = mid
        iterations += 1
    return ThresholdResult(0.5 * (lo + hi), (lo, hi), iterations, s_lo, s_hi)


def w_signs(n: int) -> list[tuple[int, int, int]]:
    """Sign pattern of the noisy-W demos: ``(-,-,+)`` flips on sites past the first few."""
    if n < 3:
        raise ValueError("W demos start at n = 3")
    n_plus = 2 if n == 3 else 3
    return [(1, 1, 1)] * n_plus + [(-1, -1, 1)] * (n - n_plus)


def w_setup(n: int, grid: int = 1001) -> Setup:
    noise = NoiseFamily(w_state(n))
    return Setup(f"w{n}", noise, pauli_family(w_signs(n)), BoundProvider.family_minimum(noise, grid))


def qutrit_setup() -> Setup:
    noise = NoiseFamily(qutrit_phi())
    spin = SpinObservables((1, 1, 1), SpinConfig((1, -1, -1), (1, -1, -1)))
    return Setup("qutrit3", noise, spin)


def demo_setup(name: str) -> Setup:
    if name == "qutrit3":
        return qutrit_setup()
    if name.startswith("w") and name[1:].isdigit():
        return w_setup(int(name[1:]))
    raise ConfigError(f"unknown demo {name!r}; try w3, w4, w5, w6 or qutrit3")


DEMOS = ("w3", "w4", "w5", "w6", "qutrit3")


def setup_sweep(setup: Setup, grid: int = 101) -> list[SweepRow]:
    return sweep(setup.noise, setup.observables, setup.provider, grid, setup.partitions)


def setup_threshold(setup: Setup) -> ThresholdResult:
    return find_threshold(setup.noise, setup.observables, setup.provider, setup.bracket, setup.partitions)


def compare_fullsep(n_range: Sequence[int]) -> list[FullSepRow]:
    """GME detection threshold of the W demos next to the full-separability bound.

    ``q_gme`` is ``None`` when the criterion never changes sign on ``[0, 1]``.
    """
    rows = []
    for n in n_range:
        if n < 3:
            raise ConfigError(f"no demo observable pattern for n={n}")
        try:
            q_gme = setup_threshold(w_setup(n)).q_star
        except NoSignChange:
            q_gme = None
        rows.append(FullSepRow(n, q_gme, fully_separable_threshold(n)))
    return rows


def format_number(x: float) -> str:
    return "%.12g" % x


def write_csv(rows: Sequence[SweepRow], out=None) -> str:
    """Render sweep rows as CSV; also write them to ``out`` (path or file) if given."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([format_number(r.q), format_number(r.f), format_number(r.f_total),
                         format_number(r.min_bound), r.argmin_partition.label()])
    text = buf.getvalue()
    if out is not None:
        if hasattr(out, "write"):
            out.write(text)
        else:
            Path(out).write_text(text, encoding="utf-8", newline="\n")
    return text


def _target_from_config(doc: dict) -> PureState:
    family = doc.get("family")
    try:
        if family == "w":
            return w_state(int(doc["n"]))
        if family == "ghz":
            return ghz_state(int(doc["n"]), int(doc.get("d", 2)))
        if family == "qutrit_phi":
            return qutrit_phi()
        if "target" in doc:
            target = state_from_dict(doc["target"])
        else:
            raise ConfigError(f"state.family: unknown family {family!r} (w, ghz, qutrit_phi or a 'target')")
    except KeyError as exc:
        raise ConfigError(f"state.{exc.args[0]}: required field missing") from exc
    if not isinstance(target, PureState):
        raise ConfigError("state.target: must be a pure state given by 'amplitudes'")
    return target


def setup_from_config(doc: dict) -> Setup:
    """Build a :class:`Setup` from a parsed JSON config.

    Fields: ``state`` (``{"family": "w", "n": 3}``, ``{"family": "qutrit_phi"}``
    or ``{"target": {...}}``), ``q_range``, ``observables`` (see
    :func:`~lurgme.observables.family_from_dict`), ``criterion``
    (``gme`` or ``spin``), ``bounds``, ``bounds_grid``, ``bracket`` and
    ``partitions``.
    """
    if "state" not in doc:
        raise ConfigError("state: required field missing")
    if "observables" not in doc:
        raise ConfigError("observables: required field missing")
    try:
        target = _target_from_config(doc["state"])
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"state: {exc}") from exc
    q_lo, q_hi = doc.get("q_range", [0.0, 1.0])
    try:
        noise = NoiseFamily(target, float(q_lo), float(q_hi))
    except ValueError as exc:
        raise ConfigError(f"q_range: {exc}") from exc

    obs_doc = doc["observables"]
    criterion = doc.get("criterion", "spin" if obs_doc.get("pattern") == "spin" else "gme")
    try:
        if criterion == "spin":
            if obs_doc.get("pattern") != "spin":
                raise ConfigError("criterion: 'spin' needs observables.pattern = 'spin'")
            j = obs_doc["j"]
            j = tuple(j) if isinstance(j, list) else (j,) * len(obs_doc["h"])
            observables = SpinObservables(j, SpinConfig(obs_doc["h"], obs_doc["g"]))
        elif criterion == "gme":
            observables = family_from_dict(obs_doc)
        else:
            raise ConfigError(f"criterion: unknown criterion {criterion!r}")
    except KeyError as exc:
        raise ConfigError(f"observables.{exc.args[0]}: required field missing") from exc
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"observables: {exc}") from exc

    n_obs = len(observables.j) if isinstance(observables, SpinObservables) else observables.n_sites
    if n_obs != len(noise.dims):
        raise ConfigError(f"observables: {n_obs} sites, state has {len(noise.dims)}")

    provider = None
    if criterion == "gme":
        provider = provider_from_config(doc.get("bounds", "family-min"), noise,
                                        int(doc.get("bounds_grid", 1001)))
    bracket = tuple(float(x) for x in doc.get("bracket", [noise.q_lo, noise.q_hi]))
    partitions = doc.get("partitions")
    if partitions is not None:
        try:
            partitions = tuple(Bipartition.from_label(p) for p in partitions)
        except ValueError as exc:
            raise ConfigError(f"partitions: {exc}") from exc
        if any(p.n_sites != len(noise.dims) for p in partitions):
            raise ConfigError(f"partitions: every entry must cover all {len(noise.dims)} sites")
    return Setup(doc.get("name", "config"), noise, observables, provider, bracket, partitions)


def provider_from_config(spec, noise: NoiseFamily, grid: int = 1001) -> BoundProvider:
    if isinstance(spec, dict):
        if "constant" in spec:
            return constant_from_dict(spec["constant"])
        raise ConfigError("bounds: object form must be {\"constant\": {...}}")
    if spec == "family-min":
        return BoundProvider.family_minimum(noise, grid)
    if spec == "reference":
        return BoundProvider.reference_state(noise.target)
    if spec == "zero":
        return BoundProvider.zero()
    if spec == "commutator":
        return BoundProvider.commutator()
    raise ConfigError(f"bounds: unknown strategy {spec!r}")


def load_config(path) -> Setup:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    return setup_from_config(doc)
