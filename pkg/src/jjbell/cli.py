"""Command-line front end.

Examples::

    jjbell chsh-sweep --B 1 --J 1 --t 0:6.28:200 --theta 0:6.28:200 -o gamma.csv
    jjbell entanglement-sweep --B 1 --J 1 --t 0:6.28:200 --theta 0:6.28:200
    jjbell evolve --B 0.8660254 --J 1 --t 1.5707963
    jjbell protocol --B 1 --J 1 --t 0.9
    jjbell shots --B 1 --J 1 --t 0.9 --theta 1.2 --shots 100000 --seed 7

Grids are ``start:stop:steps`` with both endpoints included. Sweep times are
in units of 1/alpha unless ``--time-unit raw``; single-point commands take
raw times by default. Exit status: 0 ok, 2 invalid input, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .chsh import COMPONENT_NAMES, ChshSetting, chsh_gamma, sweep_gamma
from .entanglement import (
    ALL_BRANCHES,
    BRANCHES,
    PROB_FIELDS,
    calibrate_branch,
    concurrence_direct,
    concurrence_protocol,
    family_branch,
    probabilities_from_state,
    sweep_entanglement,
)
from .errors import JJBellError, NumericalError, UsageError
from .evolution import BlochDirection, closed_form_amplitudes, propagate_many, rotate_state
from .linalg import PureState
from .measurement import estimate_concurrence, estimate_gamma, write_trial_log
from .model import QubitCircuitParams, TwoQubitParams, two_qubit_hamiltonian

COMMANDS = ("evolve", "chsh-sweep", "entanglement-sweep", "protocol", "shots")
SWEEPS = ("chsh-sweep", "entanglement-sweep")
OUTPUT_DIR_ENV = "JJBELL_OUTPUT_DIR"


@dataclass
class RunConfig:
    command: str
    B: float = 1.0
    J: float = 1.0
    circuit: dict | None = None
    t: str = "0"
    theta: str = "0"
    phi1: float = 0.0
    phi2: float = 0.0
    time_unit: str | None = None
    method: str = "closed-form"
    shots: int = 10000
    seed: int = 0
    epsilon: float = 0.0
    branch: str = "resolved"
    resamples: int = 200
    output: str | None = None
    trial_log: str | None = None
    format: str = "csv"
    workers: int | None = None
    extra: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        parse_grid(self.t)
        parse_grid(self.theta)
        if self.command in ("shots",) and self.shots < 1:
            raise UsageError("--shots must be at least 1")
        if self.branch not in ALL_BRANCHES:
            raise UsageError(f"--branch must be one of {ALL_BRANCHES}")
        if self.format not in ("csv", "json"):
            raise UsageError("--format must be csv or json")
        if self.unit not in ("alpha", "raw"):
            raise UsageError("--time-unit must be alpha or raw")
        if self.method not in ("closed-form", "dense"):
            raise UsageError("--method must be closed-form or dense")
        if self.workers is not None and self.workers < 1:
            raise UsageError("--workers must be positive")

    @property
    def unit(self) -> str:
        if self.time_unit is not None:
            return self.time_unit
        return "alpha" if self.command in SWEEPS else "raw"

    def params(self) -> TwoQubitParams:
        if self.circuit:
            return TwoQubitParams.from_circuit(QubitCircuitParams(**self.circuit))
        return TwoQubitParams(float(self.B), float(self.J))

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> RunConfig:
        data = json.loads(text)
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)


def parse_grid(spec) -> np.ndarray:
    """``start:stop:steps`` (inclusive, ``steps`` points) or a single number."""
    text = str(spec).strip()
    parts = text.split(":")
    if len(parts) not in (1, 3):
        raise UsageError(f"grid {text!r} must be a number or start:stop:steps")
    try:
        values = [float(x) for x in parts[:2]]
        steps = int(parts[2]) if len(parts) == 3 else 1
    except ValueError as exc:
        raise UsageError(f"cannot parse grid {text!r}") from exc
    if not all(math.isfinite(v) for v in values):
        raise UsageError(f"grid {text!r} has non-finite bounds")
    if steps < 1:
        raise UsageError(f"grid {text!r} needs at least one step")
    if steps == 1:
        return np.array(values[:1])
    return np.linspace(values[0], values[1], steps)


def _single(spec, name: str) -> float:
    g = parse_grid(spec)
    if g.size != 1:
        raise UsageError(f"--{name} must be a single value for this command")
    return float(g[0])


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _json_value(x):
    if isinstance(x, (float, np.floating)):
        return float(x) if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    return x


@dataclass
class Table:
    columns: list
    rows: list
    meta: dict = field(default_factory=dict)


def _raw_time(p: TwoQubitParams, t: float, unit: str) -> float:
    if unit == "raw":
        return t
    if p.alpha == 0:
        raise UsageError("time in units of 1/alpha is undefined for B = J = 0")
    return t / p.alpha


def cmd_evolve(cfg: RunConfig) -> Table:
    p = cfg.params()
    t_in = parse_grid(cfg.t)
    times = t_in if cfg.unit == "raw" else t_in / (p.alpha or math.nan)
    if not np.all(np.isfinite(times)):
        raise UsageError("time in units of 1/alpha is undefined for B = J = 0")
    if cfg.method == "dense":
        amps = propagate_many(two_qubit_hamiltonian(p), PureState.basis("00"), times)
    else:
        amps = closed_form_amplitudes(p.B, p.J, times)
    cols = ["t"] + [f"a{k}_{part}" for k in range(4) for part in ("re", "im")]
    rows = []
    for t, a in zip(t_in, amps):
        rows.append([t] + [v for z in a for v in (z.real, z.imag)])
    return Table(cols, rows, {"alpha": p.alpha, "method": cfg.method, "time_unit": cfg.unit})


def cmd_chsh_sweep(cfg: RunConfig) -> Table:
    p = cfg.params()
    sw = sweep_gamma(
        p,
        parse_grid(cfg.t),
        parse_grid(cfg.theta),
        cfg.phi1,
        cfg.phi2,
        time_unit=cfg.unit,
        workers=cfg.workers,
    )
    g = sw.gamma
    meta = {
        "alpha": p.alpha,
        "time_unit": cfg.unit,
        "gamma_min": float(g.min()),
        "gamma_max": float(g.max()),
        "violations_low": int((g < -1).sum()),
        "violations_high": int((g > 0).sum()),
    }
    return Table(["t", "theta", "gamma", *COMPONENT_NAMES], list(sw.rows()), meta)


def cmd_entanglement_sweep(cfg: RunConfig) -> Table:
    p = cfg.params()
    sw = sweep_entanglement(
        p,
        parse_grid(cfg.t),
        parse_grid(cfg.theta),
        cfg.phi1,
        cfg.phi2,
        branch=cfg.branch,
        time_unit=cfg.unit,
        workers=cfg.workers,
    )
    e = sw.entanglement
    meta = {
        "alpha": p.alpha,
        "time_unit": cfg.unit,
        "branch": cfg.branch,
        "max_theta_spread_E": float(np.max(e.max(axis=1) - e.min(axis=1))),
    }
    cols = ["t", "theta", "c2_direct", "c2_analytic", "c2_protocol", "E"]
    return Table(cols, list(sw.rows()), meta)


def _point_state(cfg: RunConfig) -> tuple[TwoQubitParams, float, PureState]:
    p = cfg.params()
    t = _raw_time(p, _single(cfg.t, "t"), cfg.unit)
    amps = closed_form_amplitudes(p.B, p.J, t)
    return p, t, PureState(amps)


def cmd_protocol(cfg: RunConfig) -> Table:
    p, t, psi = _point_state(cfg)
    theta = _single(cfg.theta, "theta")
    if theta:
        psi = rotate_state(psi, BlochDirection(theta, cfg.phi1), BlochDirection(theta, cfg.phi2))
    ps = probabilities_from_state(psi)
    direct = concurrence_direct(psi).c_squared
    rows = [[name, getattr(ps, name)] for name in PROB_FIELDS]
    for b in ALL_BRANCHES:
        rows.append([f"c2_{b}", concurrence_protocol(ps, b).c_squared])
    rows.append(["c2_direct", direct])
    calib = calibrate_branch(ps.as_array(), [direct])
    meta = {
        "alpha": p.alpha,
        "t": t,
        "calibrated_branches": [b for b, ok in zip(BRANCHES, calib.matches[0]) if ok],
        "family_branch": family_branch(p, t) if not theta else None,
    }
    return Table(["quantity", "value"], rows, meta)


def cmd_shots(cfg: RunConfig) -> Table:
    p, t, psi = _point_state(cfg)
    theta = _single(cfg.theta, "theta")
    setting = ChshSetting(BlochDirection(theta, cfg.phi1), BlochDirection(theta, cfg.phi2))
    exact = chsh_gamma(psi, setting)
    g = estimate_gamma(
        psi, setting, cfg.shots, cfg.seed, epsilon=cfg.epsilon, workers=cfg.workers
    )
    meta = {"alpha": p.alpha, "t": t, "branch": cfg.branch, "epsilon": cfg.epsilon}
    c = estimate_concurrence(
        psi,
        cfg.shots,
        cfg.seed,
        cfg.branch,
        epsilon=cfg.epsilon,
        resamples=cfg.resamples,
        workers=cfg.workers,
    )
    meta["c2_cos_excursion"] = c.components["cos_excursion"]
    meta["c2_bootstrap_excursions"] = c.components["bootstrap_excursions"]
    rows = [["gamma", g.mean, g.std_error, exact.gamma, cfg.shots]]
    exact_q = dict(zip(COMPONENT_NAMES, exact.components))
    for name, val in g.components.items():
        rows.append([name, val, math.sqrt(val * (1 - val) / cfg.shots), exact_q[name], cfg.shots])
    rows.append(["c2", c.mean, c.std_error, concurrence_direct(psi).c_squared, cfg.shots])
    table = Table(["quantity", "estimate", "std_error", "exact", "shots"], rows, meta)
    table.meta["_logs"] = g.logs + c.logs
    return table


HANDLERS = {
    "evolve": cmd_evolve,
    "chsh-sweep": cmd_chsh_sweep,
    "entanglement-sweep": cmd_entanglement_sweep,
    "protocol": cmd_protocol,
    "shots": cmd_shots,
}


def render(table: Table, fmt: str) -> str:
    if fmt == "json":
        meta = {k: v for k, v in table.meta.items() if not k.startswith("_")}
        rows = [dict(zip(table.columns, map(_json_value, r))) for r in table.rows]
        return json.dumps({"columns": table.columns, "rows": rows, "meta": meta}, indent=1) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    w.writerows([_fmt(v) for v in r] for r in table.rows)
    return buf.getvalue()


def _output_path(cfg: RunConfig) -> str | None:
    if cfg.output:
        return cfg.output
    out_dir = os.environ.get(OUTPUT_DIR_ENV)
    if out_dir:
        return os.path.join(out_dir, f"{cfg.command}.{cfg.format}")
    return None


def run(cfg: RunConfig, stdout=None) -> int:
    """Execute one configuration; returns the process exit status."""
    stdout = sys.stdout if stdout is None else stdout
    cfg.validate()
    table = HANDLERS[cfg.command](cfg)
    text = render(table, cfg.format)
    path = _output_path(cfg)
    if path:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    logs = table.meta.get("_logs")
    if logs:
        log_path = cfg.trial_log or (f"{os.path.splitext(path)[0]}.trials.csv" if path else None)
        if log_path:
            with open(log_path, "w", newline="") as fh:
                write_trial_log(logs, fh)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jjbell", description=__doc__.split("\n\n")[0])
    ap.add_argument("--config", help="run a JSON RunConfig instead of a subcommand")
    ap.add_argument("--dump-config", metavar="PATH", help="write the resolved config as JSON")
    sub = ap.add_subparsers(dest="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--B", type=float, default=1.0, help="transverse field B")
    common.add_argument("--J", type=float, default=1.0, help="sy-sy coupling J")
    common.add_argument("--EJ0", type=float, help="derive B, J from circuit parameters")
    common.add_argument("--phi-x", type=float, default=0.0, help="flux / flux quantum")
    common.add_argument("--n-x", type=float, default=0.5, help="gate charge")
    common.add_argument("--E-ch", type=float, default=1.0, help="charging energy")
    common.add_argument("--E-L", type=float, default=1.0, help="inductive energy scale")
    common.add_argument("--t", default="0", help="time or start:stop:steps")
    common.add_argument("--time-unit", choices=("alpha", "raw"))
    common.add_argument("--theta", default="0", help="polar angle or start:stop:steps")
    common.add_argument("--phi1", type=float, default=0.0)
    common.add_argument("--phi2", type=float, default=0.0)
    common.add_argument("-o", "--output", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--workers", type=int, help="worker threads (default: all cores)")

    sub.add_parser("evolve", parents=[common], help="amplitudes of the evolved |00>").add_argument(
        "--method", choices=("closed-form", "dense"), default="closed-form"
    )
    sub.add_parser("chsh-sweep", parents=[common], help="Gamma over a (t, theta) grid")
    for name, helptext in (
        ("entanglement-sweep", "C^2 and E over a (t, theta) grid"),
        ("protocol", "the eight probabilities and C^2 per sign branch"),
        ("shots", "finite-shot estimates of Gamma and C^2"),
    ):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("--branch", choices=ALL_BRANCHES, default="resolved")
        if name == "shots":
            sp.add_argument("--shots", type=int, default=10000)
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--epsilon", type=float, default=0.0, help="readout flip probability")
            sp.add_argument("--resamples", type=int, default=200)
            sp.add_argument("--trial-log", help="CSV path for the per-trial log")
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    circuit = None
    if ns.EJ0 is not None:
        circuit = {"E_J0": ns.EJ0, "phi_x": ns.phi_x, "n_x": ns.n_x, "E_ch": ns.E_ch, "E_L": ns.E_L}
    kw = dict(
        command=ns.command,
        B=ns.B,
        J=ns.J,
        circuit=circuit,
        t=ns.t,
        theta=ns.theta,
        phi1=ns.phi1,
        phi2=ns.phi2,
        time_unit=ns.time_unit,
        output=ns.output,
        format=ns.format,
        workers=ns.workers,
    )
    for name in ("method", "shots", "seed", "epsilon", "branch", "resamples", "trial_log"):
        if hasattr(ns, name):
            kw[name] = getattr(ns, name)
    return RunConfig(**kw)


def main(argv=None) -> int:
    ap = build_parser()
    ns = ap.parse_args(argv)
    try:
        if ns.config:
            with open(ns.config) as fh:
                cfg = RunConfig.from_json(fh.read())
        elif ns.command:
            cfg = config_from_args(ns)
        else:
            ap.print_usage(sys.stderr)
            print("jjbell: error: a subcommand or --config is required", file=sys.stderr)
            return 2
        if ns.dump_config:
            with open(ns.dump_config, "w") as fh:
                fh.write(cfg.to_json())
        return run(cfg)
    except NumericalError as exc:
        print(f"jjbell: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (JJBellError, ValueError, TypeError, OSError) as exc:
        print(f"jjbell: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
