"""Per-mode statistics and one-dimensional densities of the free-field states.

Every quantity lives in the reduced variables ``u_l = sqrt(dk/2pi) phi_l``
in which the functional measure is the product of plain Lebesgue measures.
There the vacuum variances are ``1/(2 omega_l)`` for the field and
``omega_l/2`` for the momentum field, and a state is described by its
variance ratios to the vacuum plus its (reduced) means.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence, Union

import numpy as np

from .lattice import LatticeModel

MAX_OCCUPATION = 64
_EXP_CUTOFF = 700.0

FIELD = "field"
MOMENTUM = "momentum"
SECTORS = (FIELD, MOMENTUM)


class StateKind(str, enum.Enum):
    VACUUM = "vacuum"
    COHERENT = "coherent"
    THERMAL = "thermal"
    EXCITED = "excited"


def bose_einstein(omega, beta):
    """Bose-Einstein occupation ``1/(exp(beta*omega) - 1)``.

    Works on scalars and arrays. Exponents above 700 return exactly 0.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise ValueError("omega must be positive (the zero mode has no thermal occupation)")
    x = beta * w
    with np.errstate(over="ignore"):
        n = np.where(x > _EXP_CUTOFF, 0.0, 1.0 / np.expm1(np.minimum(x, _EXP_CUTOFF)))
    return float(n) if n.ndim == 0 else n


def vacuum_variances(model: LatticeModel, sector: str = FIELD) -> np.ndarray:
    """Reduced vacuum variances per mode: ``1/(2w)`` (field) or ``w/2`` (momentum).

    The zero mode of a massless model gets ``inf`` (field) / ``0`` (momentum).
    """
    w = model.omegas
    if sector == FIELD:
        with np.errstate(divide="ignore"):
            return 0.5 / w
    if sector == MOMENTUM:
        return 0.5 * w
    raise ValueError(f"unknown sector {sector!r}")


@dataclass(frozen=True)
class ModeMoments:
    ratio_phi: float
    ratio_pi: float
    mean_phi: float = 0.0
    mean_pi: float = 0.0


@dataclass(frozen=True, eq=False)
class StateSpec:
    """Diagonal (mode-basis) description of a state.

    ``ratio_phi``/``ratio_pi`` are the per-mode ratios of actual to vacuum
    variance, ``mean_phi``/``mean_pi`` the reduced means, all in the order
    of :attr:`LatticeModel.modes`.
    """

    kind: StateKind
    ratio_phi: np.ndarray = field(repr=False)
    ratio_pi: np.ndarray = field(repr=False)
    mean_phi: np.ndarray = field(repr=False)
    mean_pi: np.ndarray = field(repr=False)
    occupations: Mapping[int, int] = field(default_factory=dict)
    beta: float | None = None

    def __post_init__(self):
        arrays = {}
        for name in ("ratio_phi", "ratio_pi", "mean_phi", "mean_pi"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            arrays[name] = a
            object.__setattr__(self, name, a)
        n = arrays["ratio_phi"].shape
        if any(a.shape != n for a in arrays.values()) or len(n) != 1:
            raise ValueError("per-mode arrays must be one-dimensional and of equal length")
        if np.any(arrays["ratio_phi"] <= 0) or np.any(arrays["ratio_pi"] <= 0):
            raise ValueError("variance ratios must be positive")
        object.__setattr__(self, "kind", StateKind(self.kind))
        object.__setattr__(self, "occupations", dict(self.occupations))

    @property
    def n_modes(self) -> int:
        return self.ratio_phi.shape[0]

    @property
    def moments(self) -> list[ModeMoments]:
        return [
            ModeMoments(float(a), float(b), float(c), float(d))
            for a, b, c, d in zip(self.ratio_phi, self.ratio_pi, self.mean_phi, self.mean_pi)
        ]

    def ratios(self, sector: str) -> np.ndarray:
        if sector == FIELD:
            return self.ratio_phi
        if sector == MOMENTUM:
            return self.ratio_pi
        raise ValueError(f"unknown sector {sector!r}")

    def means(self, sector: str) -> np.ndarray:
        if sector == FIELD:
            return self.mean_phi
        if sector == MOMENTUM:
            return self.mean_pi
        raise ValueError(f"unknown sector {sector!r}")

    @property
    def is_gaussian(self) -> bool:
        return self.kind is not StateKind.EXCITED or not self.occupations

    def to_dict(self) -> dict:
        data: dict = {"kind": self.kind.value}
        if self.beta is not None:
            data["beta"] = self.beta
        if self.kind is StateKind.EXCITED:
            data["occupations"] = [
                {"mode": int(k), "n": int(n)} for k, n in sorted(self.occupations.items())
            ]
        if self.kind is StateKind.COHERENT:
            data["means"] = [[float(a), float(b)] for a, b in zip(self.mean_phi, self.mean_pi)]
        return data

    @classmethod
    def from_dict(cls, data: Mapping, model: LatticeModel) -> "StateSpec":
        kind = StateKind(data.get("kind", "vacuum"))
        if kind is StateKind.VACUUM:
            return vacuum_state(model)
        if kind is StateKind.THERMAL:
            return thermal_state(model, float(data["beta"]))
        if kind is StateKind.EXCITED:
            occ = {int(e["mode"]): int(e["n"]) for e in data.get("occupations", [])}
            return excited_state(model, occ)
        phi, pi = parse_means(data.get("means", []), model.n_modes)
        return coherent_state(model, phi, pi)


def parse_means(raw, n_modes: int) -> tuple[list[float], list[float]]:
    """Accept ``[[phi, pi], ...]`` or ``{"phi": [...], "pi": [...]}``."""
    if isinstance(raw, Mapping):
        phi = [float(x) for x in raw.get("phi", [0.0] * n_modes)]
        pi = [float(x) for x in raw.get("pi", [0.0] * n_modes)]
        return phi, pi
    pairs = list(raw) or [[0.0, 0.0]] * n_modes
    return [float(p[0]) for p in pairs], [float(p[1]) for p in pairs]


def vacuum_state(model: LatticeModel) -> StateSpec:
    ones = np.ones(model.n_modes)
    zeros = np.zeros(model.n_modes)
    return StateSpec(StateKind.VACUUM, ones, ones, zeros, zeros)


def thermal_state(model: LatticeModel, beta: float) -> StateSpec:
    """Thermal state: both ratios equal ``1 + 2 n_BE(omega_l)`` on every mode.

    For a massless model the zero mode is left at its vacuum ratio.
    """
    ratio = np.ones(model.n_modes)
    reg = model.regular
    ratio[reg] = 1.0 + 2.0 * bose_einstein(model.omegas[reg], beta)
    zeros = np.zeros(model.n_modes)
    return StateSpec(StateKind.THERMAL, ratio, ratio, zeros, zeros, beta=float(beta))


def excited_state(model: LatticeModel, occupations: Mapping[int, int]) -> StateSpec:
    """Fock state with ``occupations[k]`` quanta in mode ``k``, vacuum elsewhere."""
    ratio = np.ones(model.n_modes)
    occ = {}
    for mode, n in occupations.items():
        pos = model.index(mode)
        n = int(n)
        if n < 0 or n > MAX_OCCUPATION:
            raise ValueError(f"occupation must lie in [0, {MAX_OCCUPATION}], got {n}")
        if not model.regular[pos]:
            raise ValueError("the massless zero mode cannot be excited")
        if n == 0:
            continue
        ratio[pos] = 1.0 + 2.0 * n
        occ[int(mode)] = n
    zeros = np.zeros(model.n_modes)
    if not occ:
        return StateSpec(StateKind.VACUUM, ratio, ratio, zeros, zeros)
    return StateSpec(StateKind.EXCITED, ratio, ratio, zeros, zeros, occupations=occ)


def coherent_state(
    model: LatticeModel, mean_phi: Sequence[float], mean_pi: Sequence[float]
) -> StateSpec:
    """Displaced vacuum with reduced means ``mean_phi``, ``mean_pi``."""
    phi = np.asarray(mean_phi, dtype=float)
    pi = np.asarray(mean_pi, dtype=float)
    if phi.shape != (model.n_modes,) or pi.shape != (model.n_modes,):
        raise ValueError(f"means must have length {model.n_modes}")
    ones = np.ones(model.n_modes)
    if not phi.any() and not pi.any():
        return StateSpec(StateKind.VACUUM, ones, ones, phi, pi)
    return StateSpec(StateKind.COHERENT, ones, ones, phi, pi)


def hermite(n: int, x):
    """Probabilist's Hermite polynomial ``He_n(x)`` by three-term recurrence."""
    if n < 0:
        raise ValueError("n must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = x.copy()
    for a in range(1, n):
        prev, cur = cur, x * cur - a * prev
    return cur if cur.ndim else float(cur)


def hermite_explicit(n: int, x, log_space: bool = False):
    """``He_n(x)`` from its explicit finite sum.

    Factorials are exact up to ``n = 20``; beyond that the terms are built
    from log-gamma and only allowed with ``log_space=True``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > 20 and not log_space:
        raise ValueError("n > 20 needs log_space=True")
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    for g in range(n // 2 + 1):
        k = n - 2 * g
        if n <= 20:
            coef = math.factorial(n) / (math.factorial(g) * math.factorial(k) * 2**g)
        else:
            coef = math.exp(
                math.lgamma(n + 1) - math.lgamma(g + 1) - math.lgamma(k + 1) - g * math.log(2)
            )
        total = total + (-1) ** g * coef * x**k
    return total if total.ndim else float(total)


@dataclass(frozen=True)
class GaussianDensity:
    variance: float
    mean: float = 0.0

    def __post_init__(self):
        if not self.variance > 0:
            raise ValueError("variance must be positive")

    @property
    def second_moment(self) -> float:
        return self.variance

    @property
    def center(self) -> float:
        return self.mean

    @property
    def spread(self) -> float:
        return math.sqrt(self.variance)

    def breakpoints(self) -> np.ndarray:
        return np.empty(0)

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        z = x - self.mean
        return -0.5 * z * z / self.variance - 0.5 * math.log(2 * math.pi * self.variance)

    def pdf(self, x):
        return np.exp(self.logpdf(x))


@dataclass(frozen=True)
class HermiteDensity:
    """``He_n(u/s)^2 / n! * N(u; 0, s^2)`` with ``s^2 = base_variance``."""

    n: int
    base_variance: float

    def __post_init__(self):
        if not 0 <= self.n <= MAX_OCCUPATION:
            raise ValueError(f"n must lie in [0, {MAX_OCCUPATION}]")
        if not self.base_variance > 0:
            raise ValueError("base_variance must be positive")

    @property
    def variance(self) -> float:
        return (1 + 2 * self.n) * self.base_variance

    @property
    def second_moment(self) -> float:
        return self.variance

    @property
    def mean(self) -> float:
        return 0.0

    center = mean

    @property
    def spread(self) -> float:
        return math.sqrt(self.variance)

    def breakpoints(self) -> np.ndarray:
        """Zeros of the density: the real roots of ``He_n`` scaled by ``s``."""
        if self.n == 0:
            return np.empty(0)
        roots, _ = np.polynomial.hermite_e.hermegauss(self.n)
        return np.sort(roots) * math.sqrt(self.base_variance)

    def logpdf(self, x):
        x = np.asarray(x, dtype=float)
        s2 = self.base_variance
        z = x / math.sqrt(s2)
        with np.errstate(divide="ignore"):
            log_h2 = 2.0 * np.log(np.abs(hermite(self.n, z)))
        return (
            log_h2
            - math.lgamma(self.n + 1)
            - 0.5 * z * z
            - 0.5 * math.log(2 * math.pi * s2)
        )

    def pdf(self, x):
        return np.exp(self.logpdf(x))


ModeDensity = Union[GaussianDensity, HermiteDensity]


def mode_density(
    spec: StateSpec, model: LatticeModel, mode: int, sector: str = FIELD
) -> ModeDensity:
    """Exact one-dimensional density of mode ``mode`` in the given sector."""
    pos = model.index(mode)
    if not model.regular[pos]:
        raise ValueError("the massless zero mode has no normalizable vacuum density")
    base = float(vacuum_variances(model, sector)[pos])
    n = spec.occupations.get(int(mode), 0) if spec.kind is StateKind.EXCITED else 0
    if n:
        return HermiteDensity(n, base)
    return GaussianDensity(base * float(spec.ratios(sector)[pos]), float(spec.means(sector)[pos]))
