"""Periodic one-dimensional lattice regularization of a free scalar field.

The lattice carries ``N`` sites with spacing ``eps``; its normal modes are
labelled by the integers ``-N/2 <= l < N/2`` and oscillate with the lattice
dispersion ``omega_l = sqrt(4/eps^2 sin^2(dk*l*eps/2) + m^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class LatticeModel:
    """Discretized theory with precomputed mode and dispersion tables.

    Use :func:`build_lattice` or :meth:`LatticeModel.single_mode` rather than
    calling the constructor directly; both validate their inputs.
    """

    n_modes: int
    spacing: float
    mass: float
    massless: bool = False
    length: float = field(init=False, compare=False)
    dk: float = field(init=False, compare=False)
    modes: np.ndarray = field(init=False, repr=False, compare=False)
    omegas: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be positive")
        if self.n_modes != 1 and self.n_modes % 2:
            raise ValueError(f"n_modes must be even, got {self.n_modes}")
        if not self.spacing > 0:
            raise ValueError("spacing must be positive")
        if self.mass < 0:
            raise ValueError("mass must be non-negative")
        if self.mass == 0 and not self.massless:
            raise ValueError(
                "mass = 0 makes the zero mode singular; pass massless=True to opt in"
            )
        length = self.n_modes * self.spacing
        dk = 2.0 * math.pi / length
        modes = np.arange(-(self.n_modes // 2), self.n_modes - self.n_modes // 2)
        omegas = lattice_dispersion(modes, dk, self.spacing, self.mass)
        modes.setflags(write=False)
        omegas.setflags(write=False)
        object.__setattr__(self, "length", length)
        object.__setattr__(self, "dk", dk)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "omegas", omegas)

    @classmethod
    def single_mode(cls, omega: float) -> "LatticeModel":
        """One oscillator with frequency ``omega`` (N = L = eps = 1, dk = 2 pi)."""
        if not omega > 0:
            raise ValueError("omega must be positive")
        return cls(n_modes=1, spacing=1.0, mass=float(omega))

    def index(self, mode: int) -> int:
        """Array position of mode ``mode`` in :attr:`modes` / :attr:`omegas`."""
        pos = int(mode) + self.n_modes // 2
        if not 0 <= pos < self.n_modes or int(mode) != mode:
            raise ValueError(
                f"mode {mode} outside [{self.modes[0]}, {self.modes[-1]}]"
            )
        return pos

    def omega(self, mode: int) -> float:
        return float(self.omegas[self.index(mode)])

    @property
    def regular(self) -> np.ndarray:
        """Boolean mask of modes with a non-degenerate vacuum (omega > 0)."""
        return self.omegas > 0

    def to_dict(self) -> dict:
        data = {"n_modes": self.n_modes, "spacing": self.spacing, "mass": self.mass}
        if self.massless:
            data["massless"] = True
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "LatticeModel":
        if "omega" in data:
            return cls.single_mode(float(data["omega"]))
        n_modes = int(data["n_modes"])
        if n_modes == 1:
            return cls(1, float(data.get("spacing", 1.0)), float(data["mass"]))
        return build_lattice(
            n_modes,
            float(data["spacing"]),
            float(data["mass"]),
            massless=bool(data.get("massless", False)),
        )


def lattice_dispersion(modes, dk, spacing, mass):
    modes = np.asarray(modes)
    s = np.sin(dk * modes * spacing / 2.0)
    return np.sqrt(4.0 / spacing**2 * s * s + mass * mass)


def build_lattice(
    n_modes: int, spacing: float, mass: float, massless: bool = False
) -> LatticeModel:
    """Build the lattice model for ``n_modes`` sites.

    Parameters
    ----------
    n_modes : int
        Number of sites, even and at least 2.
    spacing : float
        Lattice constant (length units).
    mass : float
        Field mass (inverse length). ``0`` requires ``massless=True``.
    massless : bool
        Opt into the massless theory, whose zero mode has ``omega_0 = 0`` and
        is excluded from every vacuum-covariance inversion downstream.
    """
    if n_modes < 2 or n_modes % 2:
        raise ValueError(f"n_modes must be even and >= 2, got {n_modes}")
    return LatticeModel(int(n_modes), float(spacing), float(mass), massless=massless)


def dispersion_continuum(p, mass):
    """Relativistic dispersion ``sqrt(p^2 + m^2)``."""
    return np.hypot(p, mass)


def vacuum_energy(model: LatticeModel) -> float:
    """Zero-point energy ``(1/2) sum_l omega_l``; diverges as N grows."""
    return 0.5 * math.fsum(model.omegas)


def real_mode_basis(n_modes: int) -> np.ndarray:
    """Orthogonal matrix ``B`` with ``phi_j = sum_l B[j, l] u_l``.

    Columns follow :attr:`LatticeModel.modes` order. Combining the complex
    Fourier modes ``+l`` and ``-l`` into real coordinates gives the Hartley
    kernel ``cos(x) - sin(x)`` at phase ``x = 2 pi l j / N``; the modes
    ``l = 0`` and ``l = -N/2`` are real already and reduce to ``1`` and
    ``(-1)^j``.
    """
    modes = np.arange(-(n_modes // 2), n_modes - n_modes // 2)
    sites = np.arange(n_modes)
    phase = 2.0 * np.pi * np.outer(sites, modes) / n_modes
    return (np.cos(phase) - np.sin(phase)) / math.sqrt(n_modes)


def position_space_covariance(
    model: LatticeModel, mode_variances: Iterable[float]
) -> np.ndarray:
    """Site-basis covariance ``<phi_j phi_j'>`` from diagonal mode variances.

    The result is ``B diag(v) B^T`` with ``B`` from :func:`real_mode_basis`, so
    its spectrum is exactly ``mode_variances``. Equal variances on each ``+-l``
    pair (any state built from the dispersion alone) give a circulant matrix.
    """
    v = np.asarray(list(mode_variances), dtype=float)
    if v.shape != (model.n_modes,):
        raise ValueError(
            f"expected {model.n_modes} mode variances, got {v.shape[0] if v.ndim else 0}"
        )
    if np.any(v < 0):
        raise ValueError("mode variances must be non-negative")
    basis = real_mode_basis(model.n_modes)
    cov = (basis * v) @ basis.T
    return 0.5 * (cov + cov.T)
