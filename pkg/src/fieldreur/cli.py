"""Command-line front end.

Every invocation is turned into a :class:`RunConfig` (from flags or from a
JSON file given with ``--config``) and then executed, so a config written
with ``--dump-config`` reproduces the run exactly.

Exit status: 0 on success, 1 when a check fails or the REUR is violated,
2 on invalid input, 3 when a quadrature does not converge.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .entropy import EntropyValue, Method
from .lattice import LatticeModel
from .oracle import mc_relative_entropy
from .quadrature import QuadratureError
from .reur import (
    ReurViolation,
    check_reur,
    n_sweep,
    reur_report,
    thermal_beta_sweep,
)
from .smearing import WavePacket, smeared_one_particle_reur
from .states import (
    SECTORS,
    GaussianDensity,
    StateKind,
    StateSpec,
    mode_density,
    vacuum_variances,
)
from .svg import line_chart
from .verify import run_checks

COMMANDS = ("report", "thermal-sweep", "n-sweep", "smeared", "fig1", "verify")
FORMATS = ("csv", "json", "svg")
CSV_HEADER = ("param", "lhs", "rhs", "deficit")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICS = 3


@dataclass
class RunConfig:
    command: str = "report"
    lattice: dict = field(default_factory=lambda: {"omega": 1.0})
    state: dict = field(default_factory=lambda: {"kind": "vacuum"})
    packet: dict | None = None
    sweep: dict = field(default_factory=dict)
    output: dict = field(default_factory=lambda: {"path": None, "format": None})
    mc: dict = field(default_factory=lambda: {"samples": 0, "seed": 0})
    perturb_lhs: float = 0.0

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        fmt = self.output.get("format")
        if fmt is not None and fmt not in FORMATS:
            raise ValueError(f"unknown format {fmt!r}")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        return cls(**json.loads(text))

    def model(self) -> LatticeModel:
        return LatticeModel.from_dict(self.lattice)

    def spec(self, model: LatticeModel) -> StateSpec:
        return StateSpec.from_dict(self.state, model)


def _parse_excitations(text: str) -> list[dict]:
    out = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        k, n = item.split(":")
        out.append({"mode": int(k), "n": int(n)})
    return out


def _parse_ints(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fieldreur",
        description="Relative entropic uncertainty of a lattice-regularized free scalar field.",
    )
    parser.add_argument("--config", type=Path, help="JSON RunConfig; overrides all other flags")
    parser.add_argument(
        "--dump-config", action="store_true", help="print the resolved RunConfig and exit"
    )
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("lattice")
    g.add_argument("--modes", type=int, help="number of lattice modes N")
    g.add_argument("--spacing", type=float, default=1.0, help="lattice spacing")
    g.add_argument("--mass", type=float, default=1.0, help="field mass")
    g.add_argument("--massless", action="store_true", help="allow mass 0")
    g.add_argument("--omega", type=float, help="single oscillator of this frequency")
    s = common.add_argument_group("state")
    s.add_argument("--vacuum", action="store_true")
    s.add_argument("--thermal", action="store_true")
    s.add_argument("--beta", type=float, help="inverse temperature")
    s.add_argument("--excite", help="occupations k:n[,k:n...]")
    s.add_argument("--coherent-means", type=Path, help="JSON file of reduced means")
    s.add_argument("--packet", help="wave packet center,width")
    o = common.add_argument_group("output")
    o.add_argument("--mc-samples", type=int, default=0)
    o.add_argument("--seed", type=int, default=0)
    o.add_argument("--out", help="output path")
    o.add_argument("--format", choices=FORMATS)
    o.add_argument(
        "--perturb-lhs", type=float, default=0.0,
        help="shift the excited-state lhs (negative control for the violation detector)",
    )
    w = common.add_argument_group("sweeps")
    w.add_argument("--beta-min", type=float, default=0.05)
    w.add_argument("--beta-max", type=float, default=10.0)
    w.add_argument("--points", type=int, default=50)
    w.add_argument("--n-list", default="8,64,512,4096")
    w.add_argument("--length", type=float, help="fixed system length for n-sweep")

    sub = parser.add_subparsers(dest="command")
    helps = {
        "report": "both sides of the REUR for one state",
        "thermal-sweep": "thermal lhs/rhs over a beta grid",
        "n-sweep": "bound versus number of modes",
        "smeared": "wave-packet one-particle state",
        "fig1": "single-mode thermal curves as CSV and SVG",
        "verify": "run every oracle cross-check",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    if args.omega is not None:
        if args.modes not in (None, 1):
            raise ValueError("--omega describes a single mode; drop --modes or set it to 1")
        lattice = {"omega": args.omega}
    elif args.modes is not None:
        lattice = {"n_modes": args.modes, "spacing": args.spacing, "mass": args.mass}
        if args.massless:
            lattice["massless"] = True
    elif args.command == "smeared":
        lattice = {"mass": args.mass}
    else:
        lattice = {"omega": 1.0}

    chosen = [args.vacuum, args.thermal, bool(args.excite), args.coherent_means is not None]
    if sum(chosen) > 1:
        raise ValueError("choose one of --vacuum, --thermal, --excite, --coherent-means")
    if args.thermal or (args.command in ("thermal-sweep", "fig1")):
        state = {"kind": "thermal", "beta": args.beta if args.beta is not None else 1.0}
        if args.thermal and args.beta is None:
            raise ValueError("--thermal needs --beta")
    elif args.excite:
        state = {"kind": "excited", "occupations": _parse_excitations(args.excite)}
    elif args.coherent_means is not None:
        state = {"kind": "coherent", "means": json.loads(args.coherent_means.read_text())}
    else:
        state = {"kind": "vacuum"}

    sweep: dict = {}
    if args.command in ("thermal-sweep", "fig1"):
        sweep = {"beta_min": args.beta_min, "beta_max": args.beta_max, "points": args.points}
    elif args.command == "n-sweep":
        sweep = {"n_list": _parse_ints(args.n_list), "length": args.length}

    packet = WavePacket.parse(args.packet).to_dict() if args.packet else None
    if args.command == "smeared" and packet is None:
        raise ValueError("smeared needs --packet k,sigma")

    return RunConfig(
        command=args.command,
        lattice=lattice,
        state=state,
        packet=packet,
        sweep=sweep,
        output={"path": args.out, "format": args.format},
        mc={"samples": args.mc_samples, "seed": args.seed},
        perturb_lhs=args.perturb_lhs,
    )


def _rows_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in rows:
        writer.writerow([repr(float(v)) for v in r.as_tuple()])
    return buf.getvalue()


def _emit(text: str, path: str | None, stdout) -> None:
    if path:
        Path(path).write_text(text, newline="\n")
    else:
        stdout.write(text)


def _mc_lhs(spec: StateSpec, model: LatticeModel, samples: int, seed: int) -> EntropyValue:
    """Monte-Carlo estimate of the lhs over every mode that differs from vacuum."""
    total = var = 0.0
    k = 0
    for pos, mode in enumerate(model.modes):
        if not model.regular[pos]:
            continue
        for sector in SECTORS:
            p = mode_density(spec, model, int(mode), sector)
            q = GaussianDensity(float(vacuum_variances(model, sector)[pos]))
            if p == GaussianDensity(q.variance, p.mean):
                continue
            est = mc_relative_entropy(p, GaussianDensity(q.variance, p.mean), samples, seed + k)
            k += 1
            total += est.value
            var += est.error_estimate**2
    return EntropyValue(total, Method.MONTE_CARLO, math.sqrt(var), count=samples, seed=seed)


def _table(pairs) -> str:
    width = max(len(k) for k, _ in pairs)
    return "".join(f"{k:<{width}}  {v}\n" for k, v in pairs)


def cmd_report(cfg: RunConfig, stdout, stderr) -> int:
    model = cfg.model()
    spec = cfg.spec(model)
    rep = reur_report(spec, model)
    if cfg.perturb_lhs:
        rep = rep.perturbed(cfg.perturb_lhs)
    data = {"model": model.to_dict(), "state": spec.to_dict(), "report": rep.to_dict()}
    if cfg.mc.get("samples"):
        data["mc"] = _mc_lhs(spec, model, int(cfg.mc["samples"]), int(cfg.mc["seed"])).to_dict()
    fmt = cfg.output.get("format") or "json"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        keys = list(rep.to_dict())
        w.writerow(keys)
        w.writerow([rep.to_dict()[k] for k in keys])
        text = buf.getvalue()
    else:
        text = json.dumps(data, indent=2) + "\n"
    _emit(text, cfg.output.get("path"), stdout)
    stderr.write(_table([(k, v) for k, v in rep.to_dict().items()]))
    check_reur(rep)
    return EXIT_OK


def _beta_grid(sweep: dict) -> np.ndarray:
    return np.linspace(
        float(sweep.get("beta_min", 0.05)), float(sweep.get("beta_max", 10.0)),
        int(sweep.get("points", 50)),
    )


def _emit_rows(cfg: RunConfig, rows, stdout, title: str, xlabel: str) -> None:
    fmt = cfg.output.get("format") or "csv"
    if fmt == "json":
        text = json.dumps([dict(zip(CSV_HEADER, r.as_tuple())) for r in rows], indent=2) + "\n"
    elif fmt == "svg":
        xs = [r.param for r in rows]
        text = line_chart(
            {"rhs (bound)": (xs, [r.rhs for r in rows]), "lhs": (xs, [r.lhs for r in rows])},
            title=title, xlabel=xlabel, ylabel="nats",
        )
    else:
        text = _rows_csv(rows)
    _emit(text, cfg.output.get("path"), stdout)


def cmd_thermal_sweep(cfg: RunConfig, stdout, stderr) -> int:
    rows = thermal_beta_sweep(cfg.model(), _beta_grid(cfg.sweep))
    _emit_rows(cfg, rows, stdout, "Thermal REUR", "beta")
    if any(r.deficit < 0 for r in rows):
        raise ReurViolation("negative thermal deficit")
    return EXIT_OK


def cmd_n_sweep(cfg: RunConfig, stdout, stderr) -> int:
    state = cfg.state
    kind = StateKind(state.get("kind", "vacuum"))
    occ = {int(e["mode"]): int(e["n"]) for e in state.get("occupations", [])}
    lat = cfg.lattice
    rows = n_sweep(
        kind,
        cfg.sweep.get("n_list", [8, 64, 512, 4096]),
        spacing=float(lat.get("spacing", 1.0)),
        mass=float(lat.get("mass", lat.get("omega", 1.0))),
        occupations=occ,
        beta=state.get("beta"),
        length=cfg.sweep.get("length"),
    )
    _emit_rows(cfg, rows, stdout, "REUR versus mode count", "N")
    return EXIT_OK


def cmd_smeared(cfg: RunConfig, stdout, stderr) -> int:
    wp = WavePacket.from_dict(cfg.packet)
    mass = float(cfg.lattice.get("mass", cfg.lattice.get("omega", 1.0)))
    rep = smeared_one_particle_reur(wp, mass)
    data = {"packet": wp.to_dict(), "mass": mass, "report": rep.to_dict()}
    _emit(json.dumps(data, indent=2) + "\n", cfg.output.get("path"), stdout)
    stderr.write(_table(list(rep.to_dict().items())))
    check_reur(rep)
    return EXIT_OK


def cmd_fig1(cfg: RunConfig, stdout, stderr) -> int:
    model = cfg.model()
    rows = thermal_beta_sweep(model, _beta_grid(cfg.sweep))
    csv_text = _rows_csv(rows)
    xs = [r.param for r in rows]
    svg_text = line_chart(
        {"bound 2n_BE": (xs, [r.rhs for r in rows]),
         "2n_BE - ln(1+2n_BE)": (xs, [r.lhs for r in rows])},
        title=f"Thermal single mode, omega = {model.mass:g}", xlabel="beta", ylabel="nats",
    )
    path = cfg.output.get("path")
    if path:
        base = Path(path)
        base.with_suffix(".csv").write_text(csv_text, newline="\n")
        base.with_suffix(".svg").write_text(svg_text, newline="\n")
    else:
        stdout.write(csv_text)
    if any(r.deficit < 0 for r in rows):
        raise ReurViolation("negative thermal deficit")
    return EXIT_OK


def cmd_verify(cfg: RunConfig, stdout, stderr) -> int:
    samples = int(cfg.mc.get("samples") or 1_000_000)
    results = run_checks(int(cfg.mc.get("seed", 0)), samples, cfg.perturb_lhs)
    ok = all(r.passed for r in results)
    data = {
        "passed": ok,
        "seed": int(cfg.mc.get("seed", 0)),
        "mc_samples": samples,
        "checks": [r.to_dict() for r in results],
    }
    _emit(json.dumps(data, indent=2) + "\n", cfg.output.get("path"), stdout)
    stderr.write(
        _table([(r.name, f"{'PASS' if r.passed else 'FAIL'}  {r.value:.3g} (tol {r.tolerance:.3g})")
                for r in results])
    )
    return EXIT_OK if ok else EXIT_FAILED


HANDLERS = {
    "report": cmd_report,
    "thermal-sweep": cmd_thermal_sweep,
    "n-sweep": cmd_n_sweep,
    "smeared": cmd_smeared,
    "fig1": cmd_fig1,
    "verify": cmd_verify,
}


def execute(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        return HANDLERS[cfg.command](cfg, stdout, stderr)
    except ReurViolation as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_FAILED
    except QuadratureError as exc:
        stderr.write(f"error: quadrature failed: {exc}\n")
        return EXIT_NUMERICS
    except (ValueError, KeyError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.config is not None:
            cfg = RunConfig.from_json(args.config.read_text())
        elif args.command is None:
            parser.error("a command or --config is required")
        else:
            cfg = config_from_args(args)
    except (ValueError, KeyError, TypeError) as exc:
        parser.error(str(exc))
    if args.dump_config:
        (stdout or sys.stdout).write(cfg.to_json() + "\n")
        return EXIT_OK
    return execute(cfg, stdout, stderr)


if __name__ == "__main__":
    sys.exit(main())
