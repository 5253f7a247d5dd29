"""Command-line front end: ``hyperlane {classify,solve,sweep,verify}``.

Command-line flags override the optional ``--config`` file, which in turn
overrides the built-in defaults.  The config file holds ``key = value``
lines; a previous ``report.json`` also works, and its config echo is reused.

Exit codes: 0 success, 1 usage or configuration error, 2 a diagnostic
check failed, 3 the solver did not converge.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from . import diagnostics as dg
from .errors import (BracketError, HyperlaneError, IntegrationError,
                     NoBracketError, PreconditionError, StructureError)
from .ode import ExponentPair, IntegratorControls, integrate
from .regimes import classify_exponents
from .shooting import SEED_HI, SEED_LO, find_ground_state

EXIT_OK, EXIT_CONFIG, EXIT_DIAGNOSTICS, EXIT_NO_CONVERGENCE = 0, 1, 2, 3
SCHEMA_VERSION = 1

log = logging.getLogger("hyperlane")


class ConfigError(Exception):
    """Bad configuration value; the message names the key."""


@dataclass
class RunConfig:
    N: int = 3
    p: float = 3.0
    q: float = 3.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    t0: float = 1e-3
    T_max: float = 60.0
    seed_lo: float = SEED_LO
    seed_hi: float = SEED_HI
    jobs: int = 1
    out_dir: str = "."
    override_regime: bool = False
    p_grid: str = ""
    q_grid: str = ""
    a_grid: str = ""
    b_grid: str = ""

    def controls(self):
        return IntegratorControls(rel_tol=self.rel_tol, abs_tol=self.abs_tol,
                                  t0=self.t0, T_max=self.T_max)

    def echo(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key, raw):
    kind = _TYPES[key]
    try:
        if kind == "bool":
            if isinstance(raw, bool):
                return raw
            text = str(raw).strip().lower()
            if text in ("1", "true", "yes", "on"):
                return True
            if text in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if kind == "int":
            val = float(raw)
            if val != int(val):
                raise ValueError(raw)
            return int(val)
        if kind == "float":
            val = float(raw)
            if not math.isfinite(val):
                raise ValueError(raw)
            return val
        return str(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot read {raw!r} as {kind}") from None


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment.

    A JSON file produced by ``solve`` is accepted too, and its ``config``
    block is used.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from None
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: {path} is not valid JSON ({exc.msg})") from None
        return dict(data.get("config", data))
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def _validate(cfg):
    checks = (
        ("N", cfg.N >= 3, "must be an integer >= 3"),
        ("p", cfg.p > 1, "must be > 1"),
        ("q", cfg.q > 1, "must be > 1"),
        ("rel_tol", 0 < cfg.rel_tol < 1, "must lie in (0, 1)"),
        ("abs_tol", cfg.abs_tol > 0, "must be positive"),
        ("t0", 0 < cfg.t0 <= 0.1, "must lie in (0, 0.1]"),
        ("T_max", cfg.T_max > max(cfg.t0, 1.0), "must exceed 1 and t0"),
        ("seed_lo", cfg.seed_lo > 0, "must be positive"),
        ("seed_hi", cfg.seed_hi > cfg.seed_lo, "must exceed seed_lo"),
        ("jobs", cfg.jobs >= 1, "must be >= 1"),
    )
    for key, ok, msg in checks:
        if not ok:
            raise ConfigError(f"{key}: {msg}, got {getattr(cfg, key)!r}")


def build_config(args):
    """Layer the config file and then explicit flags over the defaults."""
    values = {}
    if args.config:
        for key, raw in read_config_file(args.config).items():
            if key not in _TYPES:
                raise ConfigError(f"{key}: unknown configuration key")
            values[key] = _convert(key, raw)
    for key in _TYPES:
        raw = getattr(args, key, None)
        if raw is not None:
            values[key] = _convert(key, raw)
    cfg = RunConfig(**values)
    _validate(cfg)
    return cfg


def parse_grid(key, text):
    """``lo:hi:n`` into ``n`` evenly spaced values; ``n`` must be >= 2."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{key}: expected lo:hi:n, got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError(f"{key}: grid bounds {text!r} are not numbers") from None
    try:
        n = int(parts[2])
    except ValueError:
        raise ConfigError(f"{key}: grid size {parts[2]!r} is not an integer") from None
    if n < 2:
        raise ConfigError(f"{key}: grid needs at least 2 points per axis, got {n}")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ConfigError(f"{key}: grid needs lo < hi, got {lo} and {hi}")
    return np.linspace(lo, hi, n)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="ascii", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([f"{x:.17g}" if isinstance(x, float) else x for x in row])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        val = float(obj)
        return val if math.isfinite(val) else str(val)
    return obj


# --------------------------------------------------------------------------
# commands


def run_classify(cfg, out=None):
    out = out or sys.stdout
    regime = classify_exponents(cfg.N, cfg.p, cfg.q)
    json.dump(_jsonable(regime.as_dict()), out, indent=2)
    out.write("\n")
    return EXIT_OK


def run_solve(cfg, out=None):
    out = out or sys.stdout
    pq = ExponentPair(cfg.p, cfg.q)
    regime = classify_exponents(cfg.N, cfg.p, cfg.q)
    if not regime.above_hyperbola and not cfg.override_regime:
        raise ConfigError(
            f"p, q: (N, p, q) = ({cfg.N}, {cfg.p:g}, {cfg.q:g}) fails the strict "
            f"critical hyperbola check 1/(p+1) + 1/(q+1) > (N-2)/N "
            f"(margin {regime.hyperbola_margin:.6g}); pass --override-regime to try anyway")
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        gs = find_ground_state(cfg.N, pq, cfg.controls(),
                               seed=(cfg.seed_lo, cfg.seed_hi),
                               override_regime=cfg.override_regime)
    except (NoBracketError, BracketError, StructureError, IntegrationError,
            PreconditionError) as exc:
        print(f"no ground state: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    gs.trajectory.to_csv(out_dir / "ground_state.csv")
    bundle = dg.run_all(gs.trajectory, cfg.N, pq, t0=cfg.t0)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "a": gs.a, "b": gs.b,
        "residual": gs.residual,
        "polished": gs.polished,
        "T_match": gs.T_match,
        "diagnostics": bundle.as_dict(),
        "regime": regime.as_dict(),
        "backend": gs.trajectory.meta.get("backend"),
        "config": cfg.echo(),
    }
    with open(out_dir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(_jsonable(report), fh, indent=2)
        fh.write("\n")
    print(f"a = {float(gs.a)!r}\nb = {float(gs.b)!r}\nresidual = {gs.residual:.3e}\n"
          f"diagnostics {'pass' if bundle.passed else 'FAIL'}", file=out)
    if not gs.polished:
        return EXIT_NO_CONVERGENCE
    return EXIT_OK if bundle.passed else EXIT_DIAGNOSTICS


def _classify_cell(job):
    a, b, N, p, q, ctl = job
    try:
        _, res = integrate(a, b, N, ExponentPair(p, q), ctl, record=False)
        return res.kind.value, res.t
    except IntegrationError as exc:
        return "failed", float("nan") if exc.trajectory is None else float(exc.trajectory.t[-1])


def run_sweep(cfg, out=None):
    out = out or sys.stdout
    pq_mode = bool(cfg.p_grid or cfg.q_grid)
    ab_mode = bool(cfg.a_grid or cfg.b_grid)
    if pq_mode == ab_mode:
        raise ConfigError("p_grid/q_grid or a_grid/b_grid: give exactly one pair of grids")
    out_dir = Path(cfg.out_dir)
    if pq_mode:
        ps = parse_grid("p_grid", cfg.p_grid)
        qs = parse_grid("q_grid", cfg.q_grid)
        rows = []
        for p in ps:
            for q in qs:
                r = classify_exponents(cfg.N, float(p), float(q))
                lo, hi = r.sobolev_interval or ("", "")
                rows.append((float(p), float(q), r.hyperbola_margin,
                             int(r.slack_p >= 0), int(r.slack_q >= 0), lo, hi))
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_csv(out_dir / "regime.csv",
                   ["p", "q", "hyperbola_margin", "subcritical_p",
                    "subcritical_q", "s_lo", "s_hi"], rows)
        print(f"wrote {len(rows)} rows to {out_dir / 'regime.csv'}", file=out)
        return EXIT_OK
    a_vals = parse_grid("a_grid", cfg.a_grid)
    b_vals = parse_grid("b_grid", cfg.b_grid)
    if a_vals[0] <= 0 or b_vals[0] <= 0:
        raise ConfigError("a_grid/b_grid: initial values must be positive")
    ExponentPair(cfg.p, cfg.q)
    ctl = cfg.controls()
    jobs = [(float(a), float(b), cfg.N, cfg.p, cfg.q, ctl)
            for a in a_vals for b in b_vals]
    if cfg.jobs == 1:
        results = [_classify_cell(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_classify_cell, jobs, chunksize=4))
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(out_dir / "outcomes.csv", ["a", "b", "outcome", "event_t"],
               [(j[0], j[1], kind, t) for j, (kind, t) in zip(jobs, results)])
    print(f"wrote {len(jobs)} rows to {out_dir / 'outcomes.csv'}", file=out)
    return EXIT_OK


def run_verify(cfg, out=None):
    out = out or sys.stdout
    from . import acceptance
    results = acceptance.run_all()
    for r in results:
        print(r.line(), file=out)
    n_pass = sum(r.passed for r in results)
    print(f"{n_pass}/{len(results)} criteria pass", file=out)
    return EXIT_OK if n_pass == len(results) else EXIT_DIAGNOSTICS


COMMANDS = {"classify": run_classify, "solve": run_solve,
            "sweep": run_sweep, "verify": run_verify}


def make_parser():
    parser = argparse.ArgumentParser(
        prog="hyperlane",
        description="Positive radial ground states of a Lane-Emden type "
                    "system on hyperbolic space.")
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("problem and integrator")
    g.add_argument("--config", help="key = value file (or a report.json)")
    g.add_argument("--N", type=str, help="dimension, integer >= 3")
    g.add_argument("--p", type=str, help="exponent on v in the u equation")
    g.add_argument("--q", type=str, help="exponent on u in the v equation")
    g.add_argument("--rel-tol", dest="rel_tol", type=str)
    g.add_argument("--abs-tol", dest="abs_tol", type=str)
    g.add_argument("--t0", type=str, help="series start distance")
    g.add_argument("--T-max", dest="T_max", type=str)
    g.add_argument("--seed-lo", dest="seed_lo", type=str)
    g.add_argument("--seed-hi", dest="seed_hi", type=str)
    g.add_argument("--jobs", type=str, help="worker processes for sweeps")
    g.add_argument("--out-dir", dest="out_dir", type=str)
    g.add_argument("--override-regime", dest="override_regime",
                   action="store_const", const=True, default=None)
    g.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("classify", parents=[common], help="exponent regime as JSON")
    sub.add_parser("solve", parents=[common], help="find a ground state")
    sw = sub.add_parser("sweep", parents=[common], help="grid over (p, q) or (a, b)")
    for name in ("p", "q", "a", "b"):
        sw.add_argument(f"--{name}-grid", dest=f"{name}_grid", metavar="LO:HI:N")
    sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    return parser


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HyperlaneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
