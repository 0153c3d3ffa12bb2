"""Config-driven sweeps: per-pair time series and computational-basis ensembles.

A config is a YAML (or JSON) mapping; a file may hold several documents, each
run independently. Numbers may be written as expressions such as ``pi/4`` or
``pi/(4*sqrt(6))``.

Row ordering is ``(B, phi, initial state, t, pair)``. For ensemble runs the
initial-state level collapses into the mean/std columns.
"""
import ast
from concurrent.futures import ThreadPoolExecutor
import csv
from dataclasses import dataclass, field
from enum import Enum
import io
import json
import math
import operator
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .errors import ConfigError, DomainError, NumericalError, ResourceError
from .evolution import NORM_DRIFT_TOL, diagonalize
from .hamiltonians import (
    CouplingGraph,
    FieldSpec,
    HamiltonianSpec,
    Model,
    build_hamiltonian,
    ring_graph,
    star_graph,
    triple_ring,
)
from .metrics import METRIC_NAMES, pair_metrics
from .register import basis_state, product_state

MAX_ENSEMBLE_SITES = 12
MEMORY_BUDGET_BYTES = 1 << 30

ALL_METRICS = ("overlap_abs",) + METRIC_NAMES
BASE_COLUMNS = ("B", "phi", "t", "init_id", "site_i", "site_j")
ENSEMBLE = "ensemble"


class InitialKind(Enum):
    BASIS_INDEX = "basis_index"
    ALL_ROTATED = "all_rotated"
    CENTER_ROTATED = "center_rotated"
    SINGLE_FLIP = "single_flip"


@dataclass(frozen=True)
class InitialStateSpec:
    """``theta`` is read by the rotated kinds, ``index`` by BASIS_INDEX, ``site`` by SINGLE_FLIP.

    Fields a kind does not use are ignored.
    """

    kind: InitialKind
    theta: float = 0.0
    index: int = 0
    site: int = 0

    @property
    def init_id(self):
        if self.kind is InitialKind.BASIS_INDEX:
            return f"basis:{self.index}"
        if self.kind is InitialKind.SINGLE_FLIP:
            return f"single_flip:{self.site}"
        return f"{self.kind.value}:{_fmt(self.theta)}"


@dataclass(frozen=True)
class SweepConfig:
    hamiltonian: HamiltonianSpec
    initials: tuple  # of InitialStateSpec, or the string ENSEMBLE
    times: tuple  # (start, stop, steps)
    pairs: tuple
    metrics: tuple = ALL_METRICS
    field_grid: tuple = ()  # of (B, phi); empty means the Hamiltonian's own field
    output_path: str = "result.csv"
    output_format: str = "csv"
    seed: int = 0
    raw: dict = field(default_factory=dict, compare=False)

    @property
    def is_ensemble(self):
        return self.initials == ENSEMBLE

    @property
    def time_grid(self):
        start, stop, steps = self.times
        return np.linspace(start, stop, steps)

    def field_points(self):
        if self.field_grid:
            return self.field_grid
        f = self.hamiltonian.field
        return ((f.B, f.phi),)


@dataclass
class SweepResult:
    columns: tuple
    rows: list
    provenance: dict

    def column(self, name):
        k = self.columns.index(name)
        return np.array([r[k] for r in self.rows])


# ---------------------------------------------------------------------------
# initial states


def make_initial(spec, n_sites):
    kind = spec.kind
    if kind is InitialKind.BASIS_INDEX:
        return basis_state(n_sites, spec.index)
    if kind is InitialKind.SINGLE_FLIP:
        if not 0 <= spec.site < n_sites:
            raise DomainError(f"flip site {spec.site} out of range for {n_sites} sites")
        return basis_state(n_sites, 1 << (n_sites - 1 - spec.site))
    rotated = (math.cos(spec.theta / 2), math.sin(spec.theta / 2))
    if kind is InitialKind.ALL_ROTATED:
        return product_state([rotated] * n_sites)
    return product_state([rotated] + [(1.0, 0.0)] * (n_sites - 1))


# ---------------------------------------------------------------------------
# sweeps


def _evolve_columns(prop, columns, t):
    # U(0) is the identity; skipping it keeps product inputs exact
    if t == 0:
        return columns.copy()
    out, drift = prop.evolve_many(columns, t)
    if drift >= NORM_DRIFT_TOL:
        raise NumericalError(f"evolution: norm drift {drift:.3e} at t={t}")
    return out / np.linalg.norm(out, axis=0)


def _trajectory(prop, psi0, times):
    """(len(times), dim) array of the state at every time."""
    v, e = prop.eigenvectors, prop.eigenvalues
    coeffs = v.conj().T @ psi0
    out = v @ (np.exp(-1j * np.outer(e, times)) * coeffs[:, None])
    norms = np.linalg.norm(out, axis=0)
    drift = float(np.max(np.abs(norms - np.linalg.norm(psi0))))
    if drift >= NORM_DRIFT_TOL:
        raise NumericalError(f"evolution: norm drift {drift:.3e}")
    out = out / norms
    out[:, times == 0] = psi0[:, None]
    return out.T


def _metric_block(states, initial, pairs, metrics):
    """metrics for a (k, dim) batch of states; returns {pair: {name: array}}."""
    wanted = [m for m in metrics if m != "overlap_abs"]
    out = {}
    for pair in pairs:
        vals = pair_metrics(states, pair, wanted) if wanted else {}
        if "overlap_abs" in metrics:
            vals["overlap_abs"] = np.abs(np.sum(initial.conj() * states, axis=1))
        out[pair] = vals
    return out


def _field_spec(config, B, phi):
    h = config.hamiltonian
    return HamiltonianSpec(h.model, h.graph, FieldSpec(B, phi))


def _time_series_point(config, B, phi):
    prop = diagonalize(build_hamiltonian(_field_spec(config, B, phi)))
    n = config.hamiltonian.graph.n_sites
    times = config.time_grid
    metrics = [m for m in ALL_METRICS if m in config.metrics]
    rows = []
    for init in config.initials:
        psi0 = make_initial(init, n)
        states = _trajectory(prop, psi0, times)
        block = _metric_block(states, psi0, config.pairs, metrics)
        for ti, t in enumerate(times):
            for pair in config.pairs:
                vals = block[pair]
                rows.append(
                    (B, phi, float(t), init.init_id, pair[0], pair[1])
                    + tuple(float(vals[m][ti]) for m in metrics)
                )
    return rows


def _ensemble_point(config, B, phi):
    prop = diagonalize(build_hamiltonian(_field_spec(config, B, phi)))
    n = config.hamiltonian.graph.n_sites
    dim = 2 ** n
    basis = np.eye(dim, dtype=complex)
    metrics = [m for m in ALL_METRICS if m in config.metrics]
    rows = []
    for t in config.time_grid:
        states = _evolve_columns(prop, basis, float(t)).T  # row k evolved from |e_k>
        block = _metric_block(states, basis, config.pairs, metrics)
        for pair in config.pairs:
            stats = []
            for m in metrics:
                mean, std = _mean_std(block[pair][m])
                stats += [mean, std]
            rows.append((B, phi, float(t), ENSEMBLE, pair[0], pair[1]) + tuple(stats))
    return rows


def _mean_std(x):
    x = np.asarray(x, dtype=float)
    mean = float(np.mean(x))
    var = float(np.mean(x * x)) - mean * mean
    if var < 0:
        if var < -1e-12:
            raise NumericalError(f"runner: negative variance {var:.3e}")
        var = 0.0
    return mean, math.sqrt(var)


def _run_points(config, point_fn, workers):
    points = config.field_points()
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(lambda bp: point_fn(config, *bp), points))
    else:
        chunks = [point_fn(config, B, phi) for B, phi in points]
    # field points are already listed in (B, phi) order by the parser
    return [row for chunk in chunks for row in chunk]


def _provenance(config):
    return {
        "tool": "spinentangle",
        "version": __version__,
        "seed": config.seed,
        "config": config.raw,
    }


def metric_columns(config):
    metrics = [m for m in ALL_METRICS if m in config.metrics]
    if config.is_ensemble:
        return tuple(f"{p}_{m}" for m in metrics for p in ("mean", "std"))
    return tuple(metrics)


def time_series(config, workers=1):
    if config.is_ensemble:
        raise DomainError("time_series needs explicit initial states; use ensemble_stats")
    rows = _run_points(config, _time_series_point, workers)
    return SweepResult(BASE_COLUMNS + metric_columns(config), rows, _provenance(config))


def check_ensemble_budget(n_sites):
    if n_sites > MAX_ENSEMBLE_SITES:
        raise ResourceError(f"ensemble over 2^{n_sites} states exceeds the {MAX_ENSEMBLE_SITES}-site limit")
    need = 16 * 4 ** n_sites * 3
    if need > MEMORY_BUDGET_BYTES:
        raise ResourceError(f"ensemble needs ~{need / 2**20:.0f} MiB, budget is {MEMORY_BUDGET_BYTES / 2**20:.0f} MiB")


def ensemble_stats(config, workers=1):
    if not config.is_ensemble:
        raise DomainError("ensemble_stats needs initial: ensemble")
    check_ensemble_budget(config.hamiltonian.graph.n_sites)
    rows = _run_points(config, _ensemble_point, workers)
    return SweepResult(BASE_COLUMNS + metric_columns(config), rows, _provenance(config))


def run_sweep(config, workers=1):
    if config.is_ensemble:
        return ensemble_stats(config, workers)
    return time_series(config, workers)


# ---------------------------------------------------------------------------
# serialization


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return format(float(x) + 0.0, ".17g")
    return str(x)


def to_csv(result):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def to_json(result):
    doc = {
        "provenance": result.provenance,
        "columns": list(result.columns),
        "rows": [[float(v) + 0.0 if isinstance(v, float) else v for v in row] for row in result.rows],
    }
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def write_result(result, path, fmt):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path.write_text(to_csv(result), newline="")
        side = path.with_name(path.name + ".provenance.json")
        side.write_text(json.dumps(result.provenance, indent=1) + "\n", newline="")
        return [path, side]
    path.write_text(to_json(result), newline="")
    return [path]


# ---------------------------------------------------------------------------
# config parsing

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul,
           ast.Div: operator.truediv, ast.Pow: operator.pow}
_NAMES = {"pi": math.pi, "e": math.e}
_FUNCS = {"sqrt": math.sqrt}


def _eval_expr(node):
    if isinstance(node, ast.Expression):
        return _eval_expr(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name) and node.id in _NAMES:
        return _NAMES[node.id]
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_expr(node.left), _eval_expr(node.right))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_expr(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS and len(node.args) == 1 and not node.keywords):
        return _FUNCS[node.func.id](_eval_expr(node.args[0]))
    raise ValueError("unsupported expression")


def _number(value, key):
    if isinstance(value, bool):
        raise ConfigError(key, "expected a number")
    if isinstance(value, (int, float)):
        v = float(value)
    elif isinstance(value, str):
        try:
            v = _eval_expr(ast.parse(value, mode="eval"))
        except (SyntaxError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(key, f"cannot evaluate {value!r}") from exc
    else:
        raise ConfigError(key, f"expected a number, got {type(value).__name__}")
    if not math.isfinite(v):
        raise ConfigError(key, "must be finite")
    return v


def _integer(value, key):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(key, "expected an integer")
    return value


def _require(doc, key, where=""):
    if key not in doc:
        raise ConfigError(where + key, "missing")
    return doc[key]


def _number_list(value, key):
    if isinstance(value, dict):
        start = _number(_require(value, "start", key + "."), key + ".start")
        stop = _number(_require(value, "stop", key + "."), key + ".stop")
        steps = _integer(_require(value, "steps", key + "."), key + ".steps")
        if steps < 1:
            raise ConfigError(key + ".steps", "must be positive")
        return [float(v) for v in np.linspace(start, stop, steps)]
    if not isinstance(value, list) or not value:
        raise ConfigError(key, "expected a non-empty list or {start, stop, steps}")
    return [_number(v, f"{key}[{k}]") for k, v in enumerate(value)]


def _parse_graph(doc, model):
    topology = _require(doc, "topology")
    if topology == "ring":
        n = _integer(_require(doc, "n_spins"), "n_spins")
        try:
            return triple_ring(n) if model is Model.THREE_BODY_XYX else ring_graph(n)
        except DomainError as exc:
            raise ConfigError("n_spins", str(exc)) from exc
    if topology == "star":
        if model is Model.THREE_BODY_XYX:
            raise ConfigError("topology", "three-body model has no star topology")
        n_outer = _integer(_require(doc, "n_outer"), "n_outer")
        try:
            return star_graph(n_outer)
        except DomainError as exc:
            raise ConfigError("n_outer", str(exc)) from exc
    if topology == "custom":
        n = _integer(_require(doc, "n_spins"), "n_spins")
        try:
            return CouplingGraph(n, tuple(doc.get("edges", ())), tuple(doc.get("triples", ())))
        except (DomainError, TypeError) as exc:
            raise ConfigError("edges" if doc.get("edges") else "triples", str(exc)) from exc
    raise ConfigError("topology", f"unknown topology {topology!r}")


def _parse_initial(value, n_sites):
    if value == ENSEMBLE:
        return ENSEMBLE
    if not isinstance(value, dict):
        raise ConfigError("initial", "expected a mapping or 'ensemble'")
    name = _require(value, "kind", "initial.")
    try:
        kind = InitialKind(name)
    except ValueError as exc:
        raise ConfigError("initial.kind", f"unknown kind {name!r}") from exc
    if kind in (InitialKind.ALL_ROTATED, InitialKind.CENTER_ROTATED):
        if "theta_grid" in value:
            thetas = _number_list(value["theta_grid"], "initial.theta_grid")
        else:
            thetas = [_number(value.get("theta", 0.0), "initial.theta")]
        return tuple(InitialStateSpec(kind, theta=th) for th in thetas)
    if kind is InitialKind.BASIS_INDEX:
        index = _integer(_require(value, "index", "initial."), "initial.index")
        if not 0 <= index < 2 ** n_sites:
            raise ConfigError("initial.index", f"out of range for {n_sites} sites")
        return (InitialStateSpec(kind, index=index),)
    site = _integer(_require(value, "site", "initial."), "initial.site")
    if not 0 <= site < n_sites:
        raise ConfigError("initial.site", f"out of range for {n_sites} sites")
    return (InitialStateSpec(kind, site=site),)


def parse_config(doc):
    """Validate a config mapping and build a SweepConfig; errors name the offending key."""
    if not isinstance(doc, dict):
        raise ConfigError("<root>", "config must be a mapping")
    name = _require(doc, "model")
    try:
        model = Model(name)
    except ValueError as exc:
        raise ConfigError("model", f"unknown model {name!r}") from exc
    graph = _parse_graph(doc, model)
    n = graph.n_sites

    grid = ()
    if "field_grid" in doc:
        if "field" in doc:
            raise ConfigError("field_grid", "give either field or field_grid, not both")
        fg = doc["field_grid"]
        if not isinstance(fg, dict):
            raise ConfigError("field_grid", "expected a mapping with B and phi lists")
        bs = _number_list(fg.get("B", [0.0]), "field_grid.B")
        phis = _number_list(fg.get("phi", [0.0]), "field_grid.phi")
        grid = tuple((b, p) for b in bs for p in phis)
        base = FieldSpec(*grid[0])
    else:
        f = doc.get("field", {}) or {}
        if not isinstance(f, dict):
            raise ConfigError("field", "expected a mapping {B, phi}")
        base = FieldSpec(_number(f.get("B", 0.0), "field.B"), _number(f.get("phi", 0.0), "field.phi"))
    try:
        ham = HamiltonianSpec(model, graph, base)
        for b, p in grid:
            HamiltonianSpec(model, graph, FieldSpec(b, p))
    except DomainError as exc:
        raise ConfigError("field_grid" if grid else "field", str(exc)) from exc

    initials = _parse_initial(_require(doc, "initial"), n)

    times = _require(doc, "times")
    if not isinstance(times, dict):
        raise ConfigError("times", "expected {start, stop, steps}")
    start = _number(_require(times, "start", "times."), "times.start")
    stop = _number(_require(times, "stop", "times."), "times.stop")
    steps = _integer(_require(times, "steps", "times."), "times.steps")
    if steps < 2:
        raise ConfigError("times.steps", "must be at least 2")
    if not start < stop:
        raise ConfigError("times", "start must be below stop")

    raw_pairs = _require(doc, "pairs")
    if not isinstance(raw_pairs, list) or not raw_pairs:
        raise ConfigError("pairs", "expected a non-empty list of [i, j]")
    pairs = []
    for k, p in enumerate(raw_pairs):
        if (not isinstance(p, list) or len(p) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in p)):
            raise ConfigError(f"pairs[{k}]", "expected [i, j] integers")
        i, j = p
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise ConfigError(f"pairs[{k}]", f"invalid pair for {n} sites")
        pairs.append((i, j))

    metrics = doc.get("metrics", list(ALL_METRICS))
    if not isinstance(metrics, list) or not metrics:
        raise ConfigError("metrics", "expected a non-empty list")
    unknown = [m for m in metrics if m not in ALL_METRICS]
    if unknown:
        raise ConfigError("metrics", f"unknown {unknown}; choose from {list(ALL_METRICS)}")
    if "le_lower_bound" in metrics and n < 3:
        raise ConfigError("metrics", "le_lower_bound needs at least 3 sites")

    out = doc.get("output", {}) or {}
    if not isinstance(out, dict):
        raise ConfigError("output", "expected {path, format}")
    fmt = out.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError("output.format", f"unknown format {fmt!r}")
    path = out.get("path", f"result.{fmt}")
    if not isinstance(path, str):
        raise ConfigError("output.path", "expected a string")
    seed = _integer(doc.get("seed", 0), "seed")

    return SweepConfig(
        hamiltonian=ham,
        initials=initials,
        times=(start, stop, steps),
        pairs=tuple(pairs),
        metrics=tuple(m for m in ALL_METRICS if m in metrics),
        field_grid=grid,
        output_path=path,
        output_format=fmt,
        seed=seed,
        raw=doc,
    )


def load_configs(path):
    """All documents of a config file, parsed."""
    text = Path(path).read_text()
    try:
        docs = [d for d in yaml.safe_load_all(text) if d is not None]
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"parse error: {exc}") from exc
    if not docs:
        raise ConfigError("<file>", "no config documents found")
    return [parse_config(d) for d in docs]


def run_config(path, output=None, workers=1, log=None):
    """Run every document in a config file and write its result.

    Returns ``(exit_status, written_paths)``. ``output`` is a directory when it
    already exists as one or the file holds several documents; otherwise it
    replaces the output path of the single document.
    """
    try:
        configs = load_configs(path)
    except (ConfigError, OSError) as exc:
        if log:
            log(f"error: {exc}")
        return 2, []
    written = []
    for k, config in enumerate(configs):
        target = Path(config.output_path)
        if output is not None:
            out = Path(output)
            target = out / target.name if len(configs) > 1 or out.is_dir() else out
        try:
            result = run_sweep(config, workers)
        except (DomainError, NumericalError, ResourceError) as exc:
            if log:
                log(f"error in document {k}: {type(exc).__name__}: {exc}")
            return 1, written
        written += write_result(result, target, config.output_format)
        if log:
            log(json.dumps({"document": k, "rows": len(result.rows), "output": str(target),
                            "provenance": result.provenance}, default=str))
    return 0, written

