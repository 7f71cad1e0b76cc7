"""Cross-checks of every closed form against quadrature and Monte-Carlo oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .entropy import (
    entropy_quadrature,
    functional_entropy,
    gaussian_entropy,
    gaussian_relative_entropy,
    relative_entropy_quadrature,
)
from .lattice import LatticeModel, build_lattice, position_space_covariance
from .oracle import mc_relative_entropy
from .quadrature import integrate
from .reur import (
    ReurViolation,
    check_reur,
    heisenberg_chain_check,
    reur_bound,
    reur_report,
    thermal_bound_density_sweep,
    thermal_closed_forms,
    thermal_density_limit,
)
from .smearing import WavePacket, smeared_one_particle_bound
from .states import (
    GaussianDensity,
    HermiteDensity,
    bose_einstein,
    excited_state,
    hermite,
    hermite_explicit,
    thermal_state,
    vacuum_state,
    vacuum_variances,
)

EULER_GAMMA = float(np.euler_gamma)
SINGLE_EXCITATION_LHS = 4.0 - math.log(4.0) - 2.0 * EULER_GAMMA


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "value": self.value,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


def _check(name, value, tol, detail=""):
    return CheckResult(name, bool(value <= tol), float(value), float(tol), detail)


def check_single_excitation(perturb_lhs: float = 0.0) -> list[CheckResult]:
    model = LatticeModel.single_mode(1.0)
    rep = reur_report(excited_state(model, {0: 1}), model).perturbed(perturb_lhs)
    out = [
        _check("single_excitation_lhs", abs(rep.lhs - SINGLE_EXCITATION_LHS), 1e-6),
        _check("single_excitation_rhs", abs(rep.rhs - 2.0), 0.0),
    ]
    try:
        check_reur(rep)
        out.append(CheckResult("reur_holds_excited", True, rep.deficit, 0.0))
    except ReurViolation as exc:
        out.append(CheckResult("reur_holds_excited", False, rep.deficit, 0.0, str(exc)))
    return out


def check_monte_carlo(samples: int, seed: int) -> list[CheckResult]:
    out = []
    s2 = 0.5
    cases = [
        ("mc_excited_n1", HermiteDensity(1, s2), GaussianDensity(s2),
         2.0 - EULER_GAMMA - math.log(2.0)),
        ("mc_thermal_ratio", GaussianDensity(2.5 * s2), GaussianDensity(s2),
         gaussian_relative_entropy(2.5)),
        ("mc_identical", GaussianDensity(s2), GaussianDensity(s2), 0.0),
    ]
    for i, (name, p, q, exact) in enumerate(cases):
        est = mc_relative_entropy(p, q, samples, seed + i)
        z = abs(est.value - exact) / est.error_estimate if est.error_estimate else abs(est.value - exact)
        out.append(_check(name, z, 5.0, f"estimate {est.value:.6f} vs {exact:.6f} (z)"))
    return out


def check_quadrature_vs_closed_form() -> list[CheckResult]:
    worst_rel = 0.0
    for r in (0.3, 1.0, 2.1639534137386, 5.0):
        for s in (0.0, 0.4):
            p = GaussianDensity(r * 0.7, s)
            q = GaussianDensity(0.7)
            quad = relative_entropy_quadrature(p, q).value
            worst_rel = max(worst_rel, abs(quad - gaussian_relative_entropy(r, s * s / 0.7)))
    worst_ent = max(
        abs(entropy_quadrature(GaussianDensity(v)).value - gaussian_entropy(v))
        for v in (0.05, 0.5, 3.0)
    )
    return [
        _check("quadrature_gaussian_relative_entropy", worst_rel, 1e-8),
        _check("quadrature_gaussian_entropy", worst_ent, 1e-8),
    ]


def check_hermite() -> list[CheckResult]:
    x = np.linspace(-5, 5, 101)
    worst = 0.0
    for n in range(13):
        a, b = hermite(n, x), hermite_explicit(n, x)
        worst = max(worst, float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b)))))
    orth = 0.0
    for a in range(7):
        for b in range(7):
            val = integrate(
                lambda t: hermite(a, t) * hermite(b, t) * np.exp(-0.5 * t * t), -40.0, 40.0,
            ).value
            exact = math.sqrt(2 * math.pi) * math.factorial(a) if a == b else 0.0
            orth = max(orth, abs(val - exact))
    return [
        _check("hermite_recurrence_vs_explicit", worst, 1e-9),
        _check("hermite_orthogonality", orth, 1e-7),
    ]


def check_covariance_spectrum() -> list[CheckResult]:
    model = build_lattice(16, 1.0, 1.0)
    v = vacuum_variances(model) * thermal_state(model, 0.7).ratio_phi
    ev = np.sort(np.linalg.eigvalsh(position_space_covariance(model, v)))
    return [_check("covariance_spectrum", float(np.max(np.abs(ev - np.sort(v)) / np.sort(v))), 1e-10)]


def check_bounds() -> list[CheckResult]:
    out = []
    rhs = []
    for n in (8, 64, 512, 4096):
        model = build_lattice(n, 1.0, 1.0)
        rhs.append(reur_bound(excited_state(model, {1: 2, -3: 3}), model))
    out.append(_check("excited_bound_n_independent", max(abs(r - 10.0) for r in rhs), 0.0))

    single = LatticeModel.single_mode(1.0)
    worst = 0.0
    for beta in np.linspace(0.05, 10.0, 50):
        n = bose_einstein(1.0, beta)
        lhs, rhs1 = thermal_closed_forms(single, beta)
        worst = max(worst, abs(lhs - (2 * n - math.log1p(2 * n))), abs(rhs1 - 2 * n))
    out.append(_check("fig1_closed_forms", worst, 1e-12))

    worst = 0.0
    for n in (1, 10, 100, 10_000):
        model = LatticeModel.single_mode(1.0) if n == 1 else build_lattice(n, 1.0, 1.0)
        s = functional_entropy(vacuum_state(model), model).value
        worst = max(worst, abs(s - n * (1 + math.log(math.pi))) / n)
    out.append(_check("bbm_vacuum_saturation", worst, 1e-10))

    limit, _ = thermal_density_limit(1.0, 1.0)
    errs = [abs(d - limit) for _, d in thermal_bound_density_sweep(10.0, 1.0, 1.0, (64, 256, 1024))]
    monotone = errs[0] > errs[1] > errs[2]
    out.append(CheckResult("thermal_continuum_limit", monotone and errs[-1] < 1e-4, errs[-1], 1e-4))

    worst = max(
        abs(smeared_one_particle_bound(WavePacket(k, s), 1.0) - 1.0)
        for k, s in ((0.0, 1.0), (2.0, 0.5), (5.0, 0.1))
    )
    out.append(_check("smeared_one_particle_bound", worst, 1e-7))
    return out


def check_heisenberg_chain(seed: int, count: int = 40) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    failures = 0
    for i in range(count):
        model = build_lattice(int(rng.choice([2, 4, 8])), 1.0, float(rng.uniform(0.3, 2.0)))
        if i % 2:
            spec = thermal_state(model, float(rng.uniform(0.1, 5.0)))
        else:
            modes = rng.choice(model.modes, size=int(rng.integers(1, 3)), replace=False)
            spec = excited_state(model, {int(k): int(rng.integers(1, 5)) for k in modes})
        if not heisenberg_chain_check(spec, model).holds:
            failures += 1
    return [_check("heisenberg_chain", failures, 0, f"{count} random specs")]


def run_checks(
    seed: int = 0, mc_samples: int = 1_000_000, perturb_lhs: float = 0.0
) -> list[CheckResult]:
    suites: list[Callable[[], list[CheckResult]]] = [
        lambda: check_single_excitation(perturb_lhs),
        lambda: check_monte_carlo(mc_samples, seed),
        check_quadrature_vs_closed_form,
        check_hermite,
        check_covariance_spectrum,
        check_bounds,
        lambda: check_heisenberg_chain(seed),
    ]
    results = []
    for suite in suites:
        results.extend(suite())
    return results
