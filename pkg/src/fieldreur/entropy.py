"""Differential and relative entropies of mode-factorized field densities.

All values are in nats. Gaussian quantities are closed form; relative
entropies of Hermite-weighted densities are integrated numerically with
breakpoints at the density's zeros.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .lattice import LatticeModel
from .quadrature import QuadratureError, integrate
from .states import (
    FIELD,
    MOMENTUM,
    SECTORS,
    GaussianDensity,
    ModeDensity,
    StateKind,
    StateSpec,
    mode_density,
    vacuum_variances,
)

WINDOW_SPREADS = 10.0


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    MONTE_CARLO = "monte_carlo"


@dataclass(frozen=True)
class EntropyValue:
    value: float
    method: Method
    error_estimate: float = 0.0
    count: int | None = None
    seed: int | None = None

    def __add__(self, other: "EntropyValue") -> "EntropyValue":
        method = self.method if self.method == other.method else Method.QUADRATURE
        return EntropyValue(
            self.value + other.value, method, self.error_estimate + other.error_estimate
        )

    def to_dict(self) -> dict:
        data = {
            "value": self.value,
            "method": self.method.value,
            "error_estimate": self.error_estimate,
        }
        if self.method is Method.MONTE_CARLO:
            data.update(stderr=self.error_estimate, count=self.count, seed=self.seed)
        return data


def gaussian_entropy(variance: float) -> float:
    """``0.5 * ln(2 pi e variance)``."""
    if not variance > 0:
        raise ValueError("variance must be positive")
    return 0.5 * math.log(2.0 * math.pi * math.e * variance)


def _sectors(sector: str) -> tuple[str, ...]:
    if sector == "both":
        return SECTORS
    if sector in SECTORS:
        return (sector,)
    raise ValueError(f"unknown sector {sector!r}")


def functional_entropy(
    spec: StateSpec, model: LatticeModel, sector: str = "both"
) -> EntropyValue:
    """Sum of per-mode Gaussian entropies ``0.5 ln(2 pi e m_l r_l)``.

    Grows linearly with the number of modes: each vacuum mode contributes
    ``1 + ln(pi)`` to the field-plus-momentum total.
    """
    if not spec.is_gaussian:
        raise ValueError("functional_entropy supports Gaussian states only")
    reg = model.regular
    terms = []
    for s in _sectors(sector):
        var = vacuum_variances(model, s)[reg] * spec.ratios(s)[reg]
        terms.extend(0.5 * np.log(2.0 * math.pi * math.e * var))
    return EntropyValue(math.fsum(terms), Method.CLOSED_FORM)


def gaussian_relative_entropy(ratio: float, mean_offset_sq_over_var: float = 0.0) -> float:
    """Per-mode ``S(N(s, r m) || N(0, m))`` as ``(r - 1 - ln r)/2 + s^2/(2m)``."""
    if not ratio > 0:
        raise ValueError("ratio must be positive")
    if mean_offset_sq_over_var < 0:
        raise ValueError("mean_offset_sq_over_var must be non-negative")
    # log1p keeps r close to 1 accurate
    x = ratio - 1.0
    return 0.5 * (x - math.log1p(x)) + 0.5 * mean_offset_sq_over_var


def integration_window(p: ModeDensity) -> tuple[float, float]:
    c = WINDOW_SPREADS * p.spread
    return p.center - c, p.center + c


def relative_entropy_quadrature(
    p: ModeDensity,
    q: ModeDensity,
    epsabs: float = 1e-13,
    epsrel: float = 1e-12,
    max_intervals: int = 2000,
) -> EntropyValue:
    """``int p (ln p - ln q)`` by adaptive Gauss-Kronrod quadrature.

    ``q`` must be Gaussian so its support covers that of ``p``. The window is
    ``center(p) +- 10 sd(p)``, split at the zeros of ``p``, where the
    integrand is continued by 0.
    """
    if not isinstance(q, GaussianDensity):
        raise TypeError("the reference density must be Gaussian")

    def integrand(x):
        lp = p.logpdf(x)
        out = np.zeros_like(lp)
        ok = np.isfinite(lp)
        out[ok] = np.exp(lp[ok]) * (lp[ok] - q.logpdf(x[ok]))
        return out

    a, b = integration_window(p)
    res = integrate(
        integrand, a, b, points=p.breakpoints(), epsabs=epsabs, epsrel=epsrel,
        max_intervals=max_intervals,
    )
    return EntropyValue(res.value, Method.QUADRATURE, res.error)


def entropy_quadrature(p: ModeDensity, **kwargs) -> EntropyValue:
    """Differential entropy ``-int p ln p`` by quadrature (test oracle path)."""
    def integrand(x):
        lp = p.logpdf(x)
        out = np.zeros_like(lp)
        ok = np.isfinite(lp)
        out[ok] = -np.exp(lp[ok]) * lp[ok]
        return out

    a, b = integration_window(p)
    res = integrate(integrand, a, b, points=p.breakpoints(), **kwargs)
    return EntropyValue(res.value, Method.QUADRATURE, res.error)


def _occupied(spec: StateSpec) -> dict[int, int]:
    return spec.occupations if spec.kind is StateKind.EXCITED else {}


def sector_relative_entropy(
    spec: StateSpec, model: LatticeModel, sector: str
) -> EntropyValue:
    """``S[F || F_alpha]`` for one sector, with the optimal coherent reference.

    The reference shares the state's means, so only the variance mismatch
    contributes: closed form on Gaussian modes, quadrature on occupied modes.
    """
    occupied = _occupied(spec)
    mask = model.regular.copy()
    mask[[model.index(k) for k in occupied]] = False
    x = spec.ratios(sector)[mask] - 1.0
    total = EntropyValue(math.fsum(0.5 * (x - np.log1p(x))), Method.CLOSED_FORM)
    for mode in sorted(occupied):
        p = mode_density(spec, model, mode, sector)
        q = GaussianDensity(float(vacuum_variances(model, sector)[model.index(mode)]))
        total = total + relative_entropy_quadrature(p, q)
    return total


def state_relative_entropy_to_optimal_coherent(
    spec: StateSpec, model: LatticeModel
) -> tuple[EntropyValue, EntropyValue]:
    """Field and momentum relative entropies to the optimal coherent reference.

    Raises :class:`~fieldreur.quadrature.QuadratureError` if an excited mode
    does not converge.
    """
    return (
        sector_relative_entropy(spec, model, FIELD),
        sector_relative_entropy(spec, model, MOMENTUM),
    )


def non_gaussianity(spec: StateSpec, model: LatticeModel, sector: str) -> EntropyValue:
    """``S[F || F~]`` against the Gaussian with the state's own moments.

    Identically zero for Gaussian states; for Fock modes each occupied mode
    contributes ``S(HermiteDensity(n, m) || N(0, (1 + 2n) m))``.
    """
    total = EntropyValue(0.0, Method.CLOSED_FORM)
    for mode in sorted(_occupied(spec)):
        p = mode_density(spec, model, mode, sector)
        total = total + relative_entropy_quadrature(p, GaussianDensity(p.variance))
    return total

