"""Monte-Carlo cross-checks of the per-mode densities.

Samples come from numpy's PCG64 generator seeded by the caller, so a seed
fully determines every batch. Hermite-weighted densities are drawn by
rejection against a Gaussian envelope of variance ``(1 + 2n) s^2``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import optimize

from .entropy import EntropyValue, Method
from .states import GaussianDensity, HermiteDensity, ModeDensity

ENVELOPE_WINDOW = 10.0
ENVELOPE_ATOL = 1e-12


class EnvelopeError(RuntimeError):
    """The rejection envelope failed to dominate the target density."""


@dataclass(frozen=True, eq=False)
class SampleBatch:
    values: np.ndarray
    seed: int
    acceptance_rate: float = 1.0

    def __len__(self):
        return self.values.shape[0]


class Moments(NamedTuple):
    mean: float
    variance: float
    stderr_mean: float
    stderr_var: float


def _log_ratio(n: int, z):
    """``log(p_n(z) / envelope(z))`` in standardized units (``s = 1``)."""
    z = np.asarray(z, dtype=float)
    p = HermiteDensity(n, 1.0).logpdf(z)
    q = GaussianDensity(1.0 + 2.0 * n).logpdf(z)
    return p - q


@functools.lru_cache(maxsize=None)
def envelope_constant(n: int) -> float:
    """``max_z p_n(z) / envelope(z)``, independent of the base variance.

    A coarse grid over the window locates each lobe, then a bounded scalar
    maximization refines the best few.
    """
    if n == 0:
        return 1.0
    half = ENVELOPE_WINDOW * math.sqrt(1.0 + 2.0 * n)
    grid = np.linspace(0.0, half, 20001)  # even in z
    vals = _log_ratio(n, grid)
    step = grid[1] - grid[0]
    best = -np.inf
    for i in np.argsort(vals)[-4:]:
        lo, hi = max(grid[i] - step, 0.0), min(grid[i] + step, half)
        res = optimize.minimize_scalar(
            lambda z: -float(_log_ratio(n, z)), bounds=(lo, hi), method="bounded",
            options={"xatol": 1e-12},
        )
        best = max(best, -res.fun, float(vals[i]))
    return math.exp(best)


def sample_mode(density: ModeDensity, count: int, seed: int) -> SampleBatch:
    """Draw ``count`` samples from a mode density."""
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    if isinstance(density, GaussianDensity):
        x = rng.normal(density.mean, math.sqrt(density.variance), size=count)
        return SampleBatch(x, seed, 1.0)
    n = density.n
    c = envelope_constant(n)
    s = math.sqrt(density.base_variance)
    env_sd = math.sqrt(1.0 + 2.0 * n)
    out = []
    have = drawn = 0
    rate = 1.0 / c
    while have < count:
        m = int(math.ceil((count - have) / rate * 1.05)) + 16
        z = rng.normal(0.0, env_sd, size=m)
        u = rng.random(m)
        accept_prob = np.exp(_log_ratio(n, z)) / c
        if np.any(accept_prob > 1.0 + ENVELOPE_ATOL):
            raise EnvelopeError(
                f"envelope constant {c:.12g} violated (max ratio {accept_prob.max():.12g})"
            )
        keep = z[u < accept_prob]
        out.append(keep)
        have += keep.shape[0]
        drawn += m
    values = np.concatenate(out)[:count] * s
    return SampleBatch(values, seed, have / drawn)


def empirical_moments(batch: SampleBatch | np.ndarray) -> Moments:
    """Unbiased mean and variance with delete-one jackknife standard errors."""
    x = np.asarray(batch.values if isinstance(batch, SampleBatch) else batch, dtype=float)
    n = x.shape[0]
    if n == 0:
        raise ValueError("empty batch")
    mean = float(x.mean())
    if n == 1:
        return Moments(mean, 0.0, 0.0, 0.0)
    d = x - mean
    s1 = d.sum()
    s2 = (d * d).sum()
    var = float(s2 / (n - 1))
    # leave-one-out means and variances, in closed form
    loo_mean = (s1 - d) / (n - 1)
    se_mean = math.sqrt((n - 1) / n * float(((loo_mean - loo_mean.mean()) ** 2).sum()))
    if n < 3:
        return Moments(mean, var, se_mean, 0.0)
    loo_var = (s2 - d * d - (s1 - d) ** 2 / (n - 1)) / (n - 2)
    se_var = math.sqrt((n - 1) / n * float(((loo_var - loo_var.mean()) ** 2).sum()))
    return Moments(mean, var, se_mean, se_var)


def mc_relative_entropy(
    p: ModeDensity, q: ModeDensity, count: int, seed: int
) -> EntropyValue:
    """Estimate ``S(p || q)`` as the sample mean of ``ln p - ln q`` under ``p``."""
    if not isinstance(q, GaussianDensity):
        raise TypeError("the reference density must be Gaussian")
    x = sample_mode(p, count, seed).values
    terms = p.logpdf(x) - q.logpdf(x)
    value = float(terms.mean())
    stderr = float(terms.std(ddof=1) / math.sqrt(count)) if count > 1 else 0.0
    return EntropyValue(value, Method.MONTE_CARLO, stderr, count=count, seed=seed)
