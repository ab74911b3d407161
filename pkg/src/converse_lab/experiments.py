"""Config-driven experiments: schemas, runners and deterministic CSV rows.

A config file is a flat list of ``key = value`` lines. Values are JSON
literals (numbers, ``[1, 2]`` lists, nested lists for matrices, quoted
strings); a bare word is read as a string. ``#`` starts a comment.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import applications as apps
from . import bounds
from .errors import PreconditionViolated, SchemaViolation, UnknownExperiment
from .infocalc import divergence_stats
from .measures import FiniteChannel, GaussianPair, density_ratio_bound, validate_and_build
from .oracles import Type1AtMost, dp_impossibility_experiment, np_frontier
from .rng import make_generator
from .smoothing import rhc_check_batch, rhc_time_threshold

__all__ = ["ExperimentConfig", "EXPERIMENTS", "parse_config", "load_config", "validate_config", "run_experiment", "thread_count"]

RESERVED = ("experiment", "output_path", "seed")


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    parameters: dict
    output_path: str
    seed: int = 0


def _parse_value(raw: str):
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw.strip("'\"")


def parse_config(text: str) -> dict:
    """Raw ``key -> value`` map of a config file."""
    out: dict[str, Any] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SchemaViolation(f"line {lineno}", "expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if not key:
            raise SchemaViolation(f"line {lineno}", "empty key")
        if key in out:
            raise SchemaViolation(key, "duplicate key")
        out[key] = _parse_value(raw)
    return out


# schema field kinds -> checker
def _is_real(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


_KINDS: dict[str, Callable[[Any], bool]] = {
    "real": _is_real,
    "int": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "str": lambda v: isinstance(v, str),
    "reals": lambda v: isinstance(v, list) and len(v) > 0 and all(_is_real(x) for x in v),
    "ints": lambda v: isinstance(v, list) and len(v) > 0 and all(isinstance(x, int) and not isinstance(x, bool) for x in v),
    "matrix": lambda v: isinstance(v, list) and len(v) > 0 and all(isinstance(r, list) and r and all(_is_real(x) for x in r) for r in v),
}

_REQUIRED = object()


class PreconditionLog(list):
    """Ordered record of ``{"condition", "passed"}`` entries for the run log."""

    def require(self, condition: str, ok: bool) -> None:
        self.append({"condition": condition, "passed": bool(ok)})
        if not ok:
            raise PreconditionViolated(condition)

    def note(self, condition: str, ok: bool) -> None:
        """Record a condition whose failure only disables part of the output."""
        self.append({"condition": condition, "passed": bool(ok)})


def _require_eps(checked, eps):
    checked.require("0 < eps < 1", 0.0 < eps < 1.0)


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    schema: dict
    runner: Callable
    columns: tuple = field(default=())


EXPERIMENTS: dict[str, Experiment] = {}


def _register(name: str, description: str, columns: tuple, **schema):
    def wrap(fn):
        EXPERIMENTS[name] = Experiment(name, description, schema, fn, columns)
        return fn

    return wrap


def thread_count() -> int:
    raw = os.environ.get("CONVERSE_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _ordered_map(fn, items):
    items = list(items)
    workers = min(thread_count(), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _n_values(params) -> list[int]:
    if "n_list" in params:
        return [int(n) for n in params["n_list"]]
    if "n_min" in params and "n_max" in params:
        return list(range(int(params["n_min"]), int(params["n_max"]) + 1))
    raise SchemaViolation("n_list", "give n_list or both n_min and n_max")


@_register(
    "bht-suite",
    "weak, blow-up and smoothing converses for testing P^n against Q^n, with the exact optimum",
    ("n", "weak", "blowup", "smoothing", "strassen_ref", "np_exact"),
    p=("reals", _REQUIRED), q=("reals", _REQUIRED), eps=("real", _REQUIRED),
    n_list=("ints", None), n_min=("int", None), n_max=("int", None),
)
def _bht_suite(params, seed, checked):
    p, q, eps = params["p"], params["q"], params["eps"]
    _require_eps(checked, eps)
    checked.note("dP/dQ bounded (smoothing bound available)", np.isfinite(divergence_stats(p, q).max_ratio))

    def row(n):
        suite = bounds.bht_converse_suite(p, q, n, eps)
        exact = -np_frontier(p, q, n, Type1AtMost(eps)).log_type2
        return [n] + [suite[k].total for k in ("weak", "blowup", "smoothing", "strassen_ref")] + [exact]

    return _ordered_map(row, _n_values(params))


@_register(
    "blowup-vs-smoothing-sweep",
    "second-order terms of the blow-up and smoothing converses on their natural scales",
    ("n", "n_divergence", "blowup", "smoothing", "blowup_scaled", "smoothing_scaled", "r_star", "t_star"),
    p=("reals", _REQUIRED), q=("reals", _REQUIRED), eps=("real", _REQUIRED),
    n_list=("ints", None), n_min=("int", None), n_max=("int", None),
)
def _sweep(params, seed, checked):
    p, q, eps = params["p"], params["q"], params["eps"]
    _require_eps(checked, eps)
    checked.require("Q has no zero atom", min(q) > 0)
    checked.require("dP/dQ bounded", np.isfinite(divergence_stats(p, q).max_ratio))
    d = divergence_stats(p, q).divergence

    def row(n):
        suite = bounds.bht_converse_suite(p, q, n, eps)
        b, s = suite["blowup"], suite["smoothing"]
        return [
            n, n * d, b.total, s.total,
            (b.total - n * d) / (np.sqrt(n) * np.log(n) ** 1.5),
            (s.total - n * d) / np.sqrt(n),
            b.params.get("r_star", -1), s.params.get("t_star", np.nan),
        ]

    return _ordered_map(row, _n_values(params))


@_register(
    "rhc-certify",
    "reverse hypercontractivity of the simple semigroup for random functions on {0,1}^n",
    ("p", "q", "t", "trials", "violations", "min_ratio"),
    trials=("int", _REQUIRED), n=("int", 6), p_list=("reals", [0.3, 0.6, 0.9]),
    q_list=("reals", [0.0, 0.1, 0.2]), t_offsets=("reals", [0.0, 0.25, 1.0]),
)
def _rhc(params, seed, checked):
    n, trials = params["n"], params["trials"]
    grid = [(p, q, off) for p in params["p_list"] for q in params["q_list"] if q < p for off in params["t_offsets"]]
    checked.require("some grid pair has 0 <= q < p < 1", bool(grid) and all(0.0 < p < 1.0 and q >= 0.0 for p, q, _ in grid))
    checked.require("t >= ln((1-q)/(1-p)) on every grid point", min(params["t_offsets"]) >= 0.0)

    def row(item):
        index, (p, q, off) = item
        rng = make_generator(seed, index)
        t = rhc_time_threshold(p, q) + off
        f = rng.uniform(size=(trials,) + (2,) * n) ** rng.uniform(0.5, 8.0)
        laws = [np.array([b, 1 - b]) for b in rng.uniform(0.05, 0.95, size=n)]
        lhs, rhs, holds = rhc_check_batch(f, laws, p, q, t)
        return [p, q, t, trials, int((~holds).sum()), float(np.min(lhs / rhs))]

    return _ordered_map(row, list(enumerate(grid)))


@_register(
    "image-size-certify",
    "randomized certification of the discrete image-size bound on X^n",
    ("n", "c", "trials", "informative", "violations", "max_excess"),
    channel=("matrix", _REQUIRED), nu=("reals", _REQUIRED), c=("real", _REQUIRED),
    n_list=("ints", [1, 2]), trials=("int", 1000), eta=("real", None),
)
def _image_size(params, seed, checked):
    channel = FiniteChannel(np.array(params["channel"]))
    checked.require("channel rows dominated by nu", density_ratio_bound(channel, params["nu"]).finite)
    checked.require("n <= 3 for the exhaustive n-letter solve", max(params["n_list"]) <= 3)

    def row(item):
        index, n = item
        rep = bounds.soundness_check_image_size(
            channel, params["nu"], params["c"], n, eta=params.get("eta"), trials=params["trials"], seed=seed + 7919 * index
        )
        return [n, params["c"], rep.trials, rep.informative, rep.violations, rep.max_excess]

    return _ordered_map(row, list(enumerate(params["n_list"])))


@_register(
    "fano-bounds",
    "weak, discrete smoothing and Gaussian Fano-type bounds on ln M",
    ("n", "mutual_info", "weak", "discrete_smoothing", "gaussian"),
    info_per_letter=("real", _REQUIRED), eps=("real", _REQUIRED), alpha=("real", _REQUIRED),
    n_list=("ints", None), n_min=("int", None), n_max=("int", None),
)
def _fano(params, seed, checked):
    _require_eps(checked, params["eps"])
    checked.require("alpha >= 1", params["alpha"] >= 1.0)
    out = []
    for n in _n_values(params):
        info = n * params["info_per_letter"]
        vals = [bounds.fano_bound(info, n, params["eps"], v, alpha=params["alpha"]).total for v in bounds.FanoVariant]
        out.append([n, info] + vals)
    return out


@_register(
    "broadcast-region",
    "outer bound for the two-receiver Gaussian broadcast channel",
    ("power_split", "rate1", "rate2"),
    s1=("real", _REQUIRED), s2=("real", _REQUIRED), n=("int", _REQUIRED), eps=("real", _REQUIRED), grid=("int", 101),
)
def _broadcast(params, seed, checked):
    _require_eps(checked, params["eps"])
    checked.require("S1, S2 > 0", params["s1"] > 0 and params["s2"] > 0)
    pts = apps.gaussian_broadcast_region(params["s1"], params["s2"], params["n"], params["eps"], params["grid"])
    return [[pt.parameter, pt.rate1, pt.rate2] for pt in pts]


@_register(
    "ht-comm",
    "hypothesis testing under a communication constraint: lower bound on ln pi_{0|1}",
    ("ln_m", "theta", "first_order", "total", "alpha_minus_one_total"),
    q_x=("reals", _REQUIRED), channel=("matrix", _REQUIRED), n=("int", _REQUIRED), eps=("real", _REQUIRED),
    ln_m_list=("reals", _REQUIRED),
)
def _ht(params, seed, checked):
    channel = FiniteChannel(np.array(params["channel"]))
    _require_eps(checked, params["eps"])
    q_x = validate_and_build(params["q_x"]).probs
    need = 3.0 / q_x.min() * np.log(4.0 * q_x.size / (1.0 - params["eps"])) if q_x.min() > 0 else np.inf
    checked.require("n > 3 beta ln(4|X|/(1-eps))", params["n"] > need)

    def row(ln_m):
        rep = apps.ht_communication_converse(params["q_x"], channel, ln_m, params["n"], params["eps"])
        return [ln_m, rep.params["theta"], rep.first_order, rep.total, rep.params["alpha_minus_one_total"]]

    return _ordered_map(row, params["ln_m_list"])


@_register(
    "side-info",
    "source coding with a helper: lower bound on ln M2 against ln M1",
    ("ln_m1", "first_order", "dual_first_order", "total"),
    kind=("str", "gaussian"), n=("int", _REQUIRED), eps=("real", _REQUIRED), ln_m1_list=("reals", _REQUIRED),
    rho=("real", None), distortion=("real", None), q_x=("reals", None), channel=("matrix", None),
)
def _side_info(params, seed, checked):
    n, eps = params["n"], params["eps"]
    kind = params["kind"]
    _require_eps(checked, eps)
    if kind == "gaussian":
        for key in ("rho", "distortion"):
            if key not in params:
                raise SchemaViolation(key, "required for kind = gaussian")
        checked.require("|rho| < 1", abs(params["rho"]) < 1.0)
        checked.require("distortion > 0", params["distortion"] > 0)
        checked.require("n >= 20 ln(8/(1-eps))", n >= 20.0 * np.log(8.0 / (1.0 - eps)))
        pair = GaussianPair(params["rho"])

        def row(ln_m1):
            rep = apps.side_info_converse_gaussian(pair, params["distortion"], ln_m1, n, eps)
            return [ln_m1, rep.first_order, rep.params["dual_first_order"], rep.total]

    elif kind == "discrete":
        for key in ("q_x", "channel"):
            if key not in params:
                raise SchemaViolation(key, "required for kind = discrete")
        channel = FiniteChannel(np.array(params["channel"]))
        q_x = validate_and_build(params["q_x"]).probs
        need = 3.0 / q_x.min() * np.log(4.0 * q_x.size / (1.0 - eps)) if q_x.min() > 0 else np.inf
        checked.require("n >= 3 beta ln(4|X|/(1-eps))", n >= need)

        # no dual route for the discrete case; the column is left empty
        def row(ln_m1):
            rep = apps.side_info_converse_discrete(params["q_x"], channel, ln_m1, n, eps)
            return [ln_m1, rep.first_order, np.nan, rep.total]

    else:
        raise SchemaViolation("kind", "must be 'gaussian' or 'discrete'")
    return _ordered_map(row, params["ln_m1_list"])


@_register(
    "dp-impossibility",
    "exact minimal Q-mass of sets with P-mass 1 - n^{-delta}, normalized by sqrt(n ln n)",
    ("n", "min_ln_q_mass", "n_divergence", "normalized_gap", "reference"),
    p=("reals", _REQUIRED), q=("reals", _REQUIRED), delta=("real", 1.0), n_list=("ints", _REQUIRED),
)
def _dp(params, seed, checked):
    checked.require("delta > 0", params["delta"] > 0)
    checked.require("P and Q have full support", min(params["p"]) > 0 and min(params["q"]) > 0)
    checked.require("every n >= 2", min(params["n_list"]) >= 2)
    _, v, _ = divergence_stats(params["p"], params["q"])
    ref = float(np.sqrt(params["delta"] * v / 4.0))
    rows = dp_impossibility_experiment(params["p"], params["q"], params["delta"], params["n_list"])
    return [[r.n, r.min_ln_q_mass, r.n_divergence, r.normalized_gap, ref] for r in rows]


def validate_config(raw: dict) -> ExperimentConfig:
    """Check a raw config against its experiment schema and fill defaults."""
    if "experiment" not in raw:
        raise SchemaViolation("experiment", "missing")
    name = raw["experiment"]
    if name not in EXPERIMENTS:
        raise UnknownExperiment(name)
    exp = EXPERIMENTS[name]
    seed = raw.get("seed", 0)
    if not _KINDS["int"](seed):
        raise SchemaViolation("seed", "must be an integer")
    output = raw.get("output_path", f"{name}.csv")
    if not isinstance(output, str):
        raise SchemaViolation("output_path", "must be a string")
    params = {}
    for key, value in raw.items():
        if key in RESERVED:
            continue
        if key not in exp.schema:
            raise SchemaViolation(key, f"unknown parameter for {name}")
        kind = exp.schema[key][0]
        if not _KINDS[kind](value):
            raise SchemaViolation(key, f"expected {kind}, got {value!r}")
        params[key] = float(value) if kind == "real" else value
    for key, (kind, default) in exp.schema.items():
        if key in params:
            continue
        if default is _REQUIRED:
            raise SchemaViolation(key, "missing")
        if default is not None:
            params[key] = default
    for key in ("p", "q", "q_x", "nu"):
        if key in params:
            try:
                validate_and_build(params[key])
            except ValueError as exc:
                raise SchemaViolation(key, str(exc)) from exc
    return ExperimentConfig(name, params, output, seed)


def load_config(path) -> ExperimentConfig:
    return validate_config(parse_config(Path(path).read_text()))


def _format(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def run_experiment(config: ExperimentConfig, base_dir=None) -> tuple[Path, dict]:
    """Run an experiment, write its CSV and append one line to the run log.

    Returns the CSV path and the log record. The CSV depends only on the
    config (including the seed); timing goes to the log alone.
    """
    import time

    from . import __version__

    exp = EXPERIMENTS[config.experiment]
    checked = PreconditionLog()
    out = Path(config.output_path)
    if base_dir is not None and not out.is_absolute():
        out = Path(base_dir) / out
    out.parent.mkdir(parents=True, exist_ok=True)
    log_path = out.with_suffix(out.suffix + ".log.jsonl")
    record = {"experiment": config.experiment, "inputs": config.parameters, "seed": config.seed, "version": __version__}
    start = time.perf_counter()
    try:
        rows = exp.runner(config.parameters, config.seed, checked)
    except PreconditionViolated as exc:
        record.update(status="precondition_violated", error=str(exc), preconditions_checked=list(checked))
        with open(log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(record, sort_keys=True) + "\n")
        raise
    elapsed = time.perf_counter() - start
    lines = [",".join(exp.columns)] + [",".join(_format(v) for v in row) for row in rows]
    with open(out, "w", newline="\n", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    record.update(
        status="ok",
        wall_time_s=elapsed,
        preconditions_checked=list(checked),
        rows=len(rows),
        output=str(out),
    )
    with open(log_path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(record, sort_keys=True) + "\n")
    return out, record
