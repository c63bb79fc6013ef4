"""Command-line driver: ``sinfty <command> <action> [options]``.

Every artifact starts with a ``#`` header recording the package version, the
full configuration as JSON and the seed, followed by CSV rows. Exit codes:
0 pass, 1 check failure, 2 configuration error, 3 resource cap.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from . import __version__
from .arith import EXACT, FLOAT, MODES, parse_z, z_parts
from .errors import DomainError, NumericalError, ResourceCapError

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_CAP = 3

#: Config keys left out of artifact headers; they do not influence results.
_VOLATILE_KEYS = ("out", "threads", "config")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated configuration of one CLI run."""

    command: str
    action: str
    seed: int = 0
    mode: str = FLOAT
    out: Optional[str] = None
    threads: int = 1
    z: Optional[str] = None
    t: Optional[str] = None
    xi: Optional[str] = None
    n: Optional[int] = None
    count: Optional[int] = None
    params: dict = field(default_factory=dict)

    def header(self) -> dict:
        d = asdict(self)
        for k in _VOLATILE_KEYS:
            d.pop(k, None)
        return d


# -- formatting ---------------------------------------------------------------------


def fmt(v: Any) -> str:
    """Shortest round-trip text for numbers; ``p/q`` for rationals."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_artifact(cfg: ExperimentConfig, columns: Sequence[str], rows: Iterable[Sequence[Any]], stream=None) -> None:
    buf = io.StringIO()
    buf.write(f"# sinfty {__version__}\n")
    buf.write(f"# config {json.dumps(cfg.header(), sort_keys=True)}\n")
    buf.write(f"# seed {cfg.seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    text = buf.getvalue()
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        (stream or sys.stdout).write(text)


# -- parsing helpers -----------------------------------------------------------------


def _z(cfg: ExperimentConfig) -> str:
    if cfg.z is None:
        raise ConfigError(f"{cfg.command} {cfg.action} needs --z")
    return cfg.z


def _need(cfg: ExperimentConfig, name: str):
    v = getattr(cfg, name)
    if v is None:
        raise ConfigError(f"{cfg.command} {cfg.action} needs --{name}")
    return v


def _param(cfg: ExperimentConfig, name: str):
    if name not in cfg.params:
        raise ConfigError(f"{cfg.command} {cfg.action} needs --{name.replace('_', '-')}")
    return cfg.params[name]


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def _points(text: str) -> list[Fraction]:
    return [_rational(p.strip()) for p in text.split(",") if p.strip()]


def _t_param(cfg: ExperimentConfig):
    t = _need(cfg, "t")
    return _rational(t) if cfg.mode == EXACT else float(_rational(t))


# -- command handlers ------------------------------------------------------------------
# Each handler returns (columns, rows, passed).


def cmd_verify(cfg: ExperimentConfig):
    from .verify import SUITES

    suites = list(SUITES) if cfg.action == "all" else [cfg.action]
    rows = []
    for name in suites:
        kwargs: dict = {}
        if name == "exact" and cfg.n is not None:
            kwargs["max_n"] = cfg.n
        if name == "cocycle":
            kwargs["seed"] = cfg.seed
            if cfg.count is not None:
                kwargs["count"] = cfg.count
        if name in ("characters", "kernel"):
            kwargs["seed"] = cfg.seed
        for r in SUITES[name](**kwargs):
            rows.append((r.suite, r.name, r.params, r.passed, r.detail))
    return ("suite", "check", "params", "passed", "detail"), rows, all(r[3] for r in rows)


def cmd_partitions(cfg: ExperimentConfig):
    from .partitions import dimension, enumerate_partitions, frobenius, from_string

    if cfg.action == "enumerate":
        n = _need(cfg, "n")
        rows = []
        for lam in enumerate_partitions(n, cap=cfg.params.get("cap", 60)):
            fc = frobenius(lam)
            rows.append((lam, dimension(lam), " ".join(fmt(a) for a in fc.a), " ".join(fmt(b) for b in fc.b)))
        return ("partition", "dimension", "frobenius_a", "frobenius_b"), rows, True
    lam = from_string(_param(cfg, "lam"))
    fc = frobenius(lam)
    return ("partition", "dimension", "frobenius_a", "frobenius_b"), [
        (lam, dimension(lam), " ".join(fmt(a) for a in fc.a), " ".join(fmt(b) for b in fc.b))
    ], True


def cmd_ewens(cfg: ExperimentConfig):
    from .ewens import num_cycles_marginal, sample_ewens_coords
    from .rng import make_rng

    n = _need(cfg, "n")
    if cfg.action == "law":
        law = num_cycles_marginal(_t_param(cfg), n, cfg.mode)
        return ("cycles", "probability"), [(k, p) for k, p in enumerate(law) if k], True
    from .permutations import num_cycles, perm_from_coords

    count = _need(cfg, "count")
    coords = sample_ewens_coords(float(_rational(_need(cfg, "t"))), n, count, make_rng(cfg.seed))
    rows = [
        (cfg.seed, n, " ".join(str(int(v)) for v in row), num_cycles(perm_from_coords(tuple(int(v) for v in row))))
        for row in coords
    ]
    return ("seed", "level", "coords", "num_cycles"), rows, True


def cmd_zmeasure(cfg: ExperimentConfig):
    from . import zmeasure as zm
    from .partitions import Partition
    from .rng import make_rng

    z = _z(cfg)
    if cfg.action == "law":
        law = zm.zmeasure_law(z, _need(cfg, "n"), cfg.mode)
        return ("partition", "probability"), [(lam, p) for lam, p in law.items()], True
    if cfg.action == "sample":
        n = _need(cfg, "n")
        count = _need(cfg, "count")
        s = zm.sample_growth_batch(z, n, count, make_rng(cfg.seed))
        uniq, counts = np.unique(s.rows, axis=0, return_counts=True)
        exact = zm.zmeasure_law(z, n, FLOAT) if n <= zm.BRUTE_FORCE_MAX_N else {}
        rows = []
        for r, c in sorted(zip(uniq.tolist(), counts.tolist()), key=lambda rc: (-rc[1], rc[0])):
            lam = Partition(tuple(v for v in r if v))
            rows.append((lam, c, c / count, exact.get(lam, "")))
        return ("partition", "count", "frequency", "probability"), rows, True
    if cfg.action == "dump":
        n = _need(cfg, "n")
        s = zm.sample_growth_batch(z, n, _need(cfg, "count"), make_rng(cfg.seed))
        rows = []
        for i in range(len(s)):
            lam = s.partition(i)
            rows.append((cfg.seed, n, lam, " ".join(fmt(p) for p in zm.lattice_config(lam).points)))
        return ("seed", "n", "lambda", "config"), rows, True
    if cfg.action == "mixed":
        xi = float(_rational(_need(cfg, "xi")))
        count = _need(cfg, "count")
        s = zm.sample_mixed_batch(z, xi, count, make_rng(cfg.seed), keep_rows=True)
        uniq, counts = np.unique(s.rows, axis=0, return_counts=True) if s.rows.size else (np.zeros((1, 0), int), np.array([count]))
        rows = []
        for r, c in sorted(zip(uniq.tolist(), counts.tolist()), key=lambda rc: (-rc[1], rc[0])):
            lam = Partition(tuple(v for v in r if v))
            rows.append((lam, c, c / count, zm.mixed_prob(z, xi, lam)))
        return ("partition", "count", "frequency", "probability"), rows, True
    # correlation
    xi = _rational(_need(cfg, "xi"))
    pts = _points(_param(cfg, "points"))
    v = zm.brute_force_correlation(z, xi, pts, tail_eps=cfg.params.get("tail", 1e-12))
    return ("points", "value", "tail_bound"), [(" ".join(fmt(p) for p in pts), v.value, v.tail_bound)], True


def cmd_characters(cfg: ExperimentConfig):
    from . import characters as ch

    if cfg.action == "table":
        return ("partition", "class", "value"), [
            (lam, ",".join(map(str, rho)), v) for lam, rho, v in ch.character_table(_need(cfg, "n"))
        ], True
    rho = tuple(int(v) for v in _param(cfg, "rho").split(","))
    v = ch.chi_z(_z(cfg), rho, cfg.n, cfg.mode)
    return ("class", "chi_z"), [(",".join(map(str, rho)), v)], True


def _grid_points(path: str) -> list[tuple[float, float]]:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        xs, ys = data.get("x"), data.get("y", data.get("x"))
        if xs is None:
            raise ConfigError("points JSON needs an 'x' list (and optionally 'y')")
        return [(float(x), float(y)) for x in xs for y in ys]
    return [(float(x), float(y)) for x, y in data]


def cmd_kernel(cfg: ExperimentConfig):
    from . import special

    z = _z(cfg)
    if cfg.action == "table":
        kern = special.WhittakerKernel(z)
        pairs = _grid_points(_param(cfg, "points"))
        return ("x", "y", "K"), [(x, y, kern(x, y)) for x, y in pairs], True
    if cfg.action == "q":
        q = special.q_of_z(z)
        return ("q", "sum_form", "cot_form", "discrepancy"), [
            (q.value, q.sum_form, "" if q.cot_form is None else q.cot_form, "" if q.discrepancy is None else q.discrepancy)
        ], q.discrepancy is None or q.discrepancy < 1e-10
    grid_spec = special.GridSpec(
        nodes=cfg.params.get("nodes", 400), upper=cfg.params.get("upper", 40.0),
        order=cfg.params.get("order", 8), eps=cfg.params.get("eps"),
    )
    r = special.resolvent_check(z, grid_spec)
    tol = cfg.params.get("tol", 1e-2)
    return ("nodes", "cutoff", "max_deviation", "condition", "pairs"), [
        (r.nodes, r.cutoff, r.max_deviation, r.condition, r.pairs)
    ], r.max_deviation < tol


def cmd_pointproc(cfg: ExperimentConfig):
    from . import pointproc as pp
    from .rng import make_rng
    from .zmeasure import brute_force_correlation

    if cfg.action == "witness":
        z = _z(cfg)
        xi = _rational(_need(cfg, "xi"))
        tail = cfg.params.get("tail", 1e-12)
        pts = _points(cfg.params.get("points", "-5/2,-3/2,-1/2,1/2,3/2,5/2"))
        rep = pp.det_necessary_conditions(lambda p: brute_force_correlation(z, xi, p, tail), pts)
        return ("pairs", "triples", "sign_violations", "worst_sign", "triple_residual", "tol", "ok"), [
            (rep.pairs, rep.triples, rep.sign_violations, rep.worst_sign, rep.triple_max_residual, rep.tol, rep.ok)
        ], rep.ok
    # poisson
    density = float(cfg.params.get("density", 1.0))
    lo, hi = (float(v) for v in cfg.params.get("window", "0,1").split(","))
    rng = make_rng(cfg.seed)
    count = _need(cfg, "count")
    rows = [(i, len(pp.poisson_sample(density, (lo, hi), rng))) for i in range(count)]
    return ("sample", "points"), rows, True


def cmd_experiment(cfg: ExperimentConfig):
    from . import experiment as ex

    z = complex(*(float(v) for v in z_parts(_z(cfg), FLOAT)))
    if cfg.action == "lln":
        r = ex.lln_check(z, cfg.n or 5000, cfg.count or 200, cfg.params.get("k", 8), cfg.seed)
        return ("k", "median", "q", "zero_fraction", "passed"), [(r.k, r.median, r.q, r.zero_fraction, r.passed)], r.passed
    mc = ex.MainTheoremConfig(
        z=z, n=cfg.n or 2000, samples=cfg.count or 20_000,
        xi=float(_rational(cfg.xi)) if cfg.xi is not None else 0.995,
        seed=cfg.seed, replicas=cfg.params.get("replicas", 8), threads=cfg.threads,
    )
    rep = ex.main_theorem_experiment(mc, mixed=not cfg.params.get("no_mixed", False))
    rows = []
    for route in (rep.growth, rep.mixed):
        if route is None:
            continue
        for b in route.rows:
            rows.append((route.route, b.lo, b.hi, b.estimate, b.stderr, b.hits, b.predicted, b.se_units, b.rel_error, b.ok))
    rows.append(("p2", "", "", rep.p2.mean, rep.p2.stderr, "", rep.p2.target, rep.p2.se_units, "", rep.p2.passed))
    return ("route", "bin_lo", "bin_hi", "estimate", "stderr", "hits", "predicted", "se_units", "rel_error", "ok"), rows, rep.passed


HANDLERS = {
    "verify": (cmd_verify, ("exact", "cocycle", "characters", "kernel", "all")),
    "partitions": (cmd_partitions, ("enumerate", "show")),
    "ewens": (cmd_ewens, ("law", "sample")),
    "zmeasure": (cmd_zmeasure, ("law", "sample", "dump", "mixed", "correlation")),
    "characters": (cmd_characters, ("table", "chi-z")),
    "kernel": (cmd_kernel, ("table", "resolvent", "q")),
    "pointproc": (cmd_pointproc, ("witness", "poisson")),
    "experiment": (cmd_experiment, ("main", "lln")),
}

# command-specific options: name -> (type, help)
_EXTRA = {
    "max_n": (int, "largest n for enumeration-based suites"),
    "lam": (str, "partition, e.g. 3,1"),
    "points": (str, "comma-separated points, or a JSON file for kernel table"),
    "rho": (str, "cycle type, e.g. 2,1"),
    "tail": (float, "tail bound for lattice correlations"),
    "nodes": (int, "grid nodes (both half-lines)"),
    "upper": (float, "outer grid cutoff"),
    "order": (int, "Gauss-Legendre panel order"),
    "eps": (float, "inner grid cutoff (default: tied to nodes)"),
    "tol": (float, "pass tolerance"),
    "density": (float, "Poisson density"),
    "window": (str, "Poisson window lo,hi"),
    "k": (int, "coordinate index for the LLN check"),
    "replicas": (int, "independent replica streams"),
    "cap": (int, "enumeration cap on n"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--mode", choices=MODES, default=None)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--threads", type=int, default=None)
    common.add_argument("--config", default=None, help="JSON file with option defaults")
    common.add_argument("--z")
    common.add_argument("--t")
    common.add_argument("--xi")
    common.add_argument("--n", type=int)
    common.add_argument("--max-n", dest="n", type=int)
    common.add_argument("--count", type=int)
    for name, (typ, hlp) in _EXTRA.items():
        if name == "max_n":
            continue
        common.add_argument(f"--{name.replace('_', '-')}", dest=name, type=typ, help=hlp)
    common.add_argument("--no-mixed", dest="no_mixed", action="store_true", default=None)

    parser = argparse.ArgumentParser(prog="sinfty", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"sinfty {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, (_, actions) in HANDLERS.items():
        p = sub.add_parser(cmd, parents=[common])
        p.add_argument("action", choices=actions)
    return parser


_TOP_KEYS = ("seed", "mode", "out", "threads", "z", "t", "xi", "n", "count")


def make_config(ns: argparse.Namespace) -> ExperimentConfig:
    values: dict = {}
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                values.update(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc}") from exc
        if "max_n" in values:
            values.setdefault("n", values.pop("max_n"))
    for k, v in vars(ns).items():
        if k in ("command", "action", "config") or v is None:
            continue
        values[k] = v
    known = set(_TOP_KEYS) | set(_EXTRA) | {"no_mixed"}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    top = {k: values.pop(k) for k in _TOP_KEYS if k in values}
    for k in ("z", "t", "xi"):
        if k in top:
            top[k] = str(top[k])
    cfg = ExperimentConfig(command=ns.command, action=ns.action, params=values, **top)
    validate(cfg)
    return cfg


def validate(cfg: ExperimentConfig) -> None:
    if cfg.mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}")
    if cfg.threads < 1:
        raise ConfigError("--threads must be positive")
    for k in ("n", "count"):
        v = getattr(cfg, k)
        if v is not None and v < 0:
            raise ConfigError(f"--{k} must be nonnegative")
    if cfg.z is not None:
        try:
            zr, zi = parse_z(cfg.z)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if cfg.t is not None and abs(_rational(cfg.t) - (zr * zr + zi * zi)) > Fraction(1, 10**12):
            raise ConfigError(f"t={cfg.t} is inconsistent with |z|^2 = {zr * zr + zi * zi}")
    if cfg.t is not None and _rational(cfg.t) < 0:
        raise ConfigError("t must be nonnegative")
    if cfg.xi is not None and not 0 < _rational(cfg.xi) < 1:
        raise ConfigError("xi must lie in (0, 1)")


def run(cfg: ExperimentConfig, stream=None) -> int:
    handler = HANDLERS[cfg.command][0]
    try:
        columns, rows, passed = handler(cfg)
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (ConfigError, DomainError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    write_artifact(cfg, columns, rows, stream)
    return EXIT_OK if passed else EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        cfg = make_config(ns)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
