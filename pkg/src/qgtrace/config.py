"""TOML job files.

Example::

    [graph]
    edges = [[0, 1, 1.0], [0, 2, 1.3], [0, 3, 0.7]]   # left, right, length

    [[potential]]
    edge = 0
    atoms = [{ type = "cosine", coeff = 1, freq = "2*pi" }]

    [[potential]]
    edge = 2
    atoms = [{ type = "piecewise", breakpoints = [0.3], values = [2.0, -1.0] }]

    [scheme]
    kind = "delta"
    alphas = [0.5, -1.0, 0.0, 2.0]     # or: alpha = 0.5 (uniform)

    [params]
    lambda_max = 200.0
    order = 2
    tau_grid = [10, 20, 40, 80]

Edges without a ``[[potential]]`` entry carry ``q = 0``.  Numeric
coefficients may be given as strings (``"2*pi"``, ``"1/3"``) to keep them
exact in the symbolic pipeline.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .graph import MetricGraph
from .mmatrix import MatchingScheme
from .potentials import Cosine, EdgePotential, Exponential, PiecewiseConstant, Polynomial
from .spectrum import Spectrum

_ATOMS = {
    "polynomial": (Polynomial, ("coeff", "power")),
    "constant": (Polynomial, ("coeff",)),
    "cosine": (Cosine, ("coeff", "freq", "phase")),
    "exponential": (Exponential, ("coeff", "rate")),
    "piecewise": (PiecewiseConstant, ("breakpoints", "values")),
}


@dataclass
class JobConfig:
    graph: MetricGraph
    potentials: list[EdgePotential]
    scheme: MatchingScheme | None
    scheme_b: MatchingScheme | None = None
    params: dict[str, Any] = field(default_factory=dict)
    target: dict[str, Any] = field(default_factory=dict)

    def param(self, name: str, default=None):
        return self.params.get(name, default)


def _table(doc: dict, name: str, required: bool = False) -> dict:
    value = doc.get(name)
    if value is None:
        if required:
            raise ConfigError(f"missing [{name}] section")
        return {}
    if not isinstance(value, dict):
        raise ConfigError(f"[{name}] must be a table")
    return value


def _number(value, what: str):
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise ConfigError(f"{what} must be a number or numeric string")
    return value


def parse_graph(section: dict) -> MetricGraph:
    edges = section.get("edges")
    if not isinstance(edges, list) or not edges:
        raise ConfigError("[graph] needs a nonempty 'edges' list of [left, right, length]")
    parsed = []
    for t, e in enumerate(edges):
        if not isinstance(e, list) or len(e) != 3:
            raise ConfigError(f"edge {t} must be [left, right, length]")
        left, right, length = e
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (left, right)):
            raise ConfigError(f"edge {t}: vertex ids must be integers")
        if isinstance(length, bool) or not isinstance(length, (int, float)):
            raise ConfigError(f"edge {t}: length must be a number")
        parsed.append((float(length), left, right))
    vertices = section.get("vertices")
    if vertices is not None and (not isinstance(vertices, int) or isinstance(vertices, bool)):
        raise ConfigError("[graph] vertices must be an integer")
    return MetricGraph(parsed, vertices)


def parse_atom(spec: dict, where: str):
    if not isinstance(spec, dict) or "type" not in spec:
        raise ConfigError(f"{where}: atom needs a 'type'")
    kind = str(spec["type"]).lower()
    if kind not in _ATOMS:
        raise ConfigError(f"{where}: unknown atom type {spec['type']!r}")
    cls, names = _ATOMS[kind]
    extra = set(spec) - set(names) - {"type"}
    if extra:
        raise ConfigError(f"{where}: unexpected keys {sorted(extra)}")
    kwargs = {}
    for n in names:
        if n in spec:
            v = spec[n]
            if n in ("breakpoints", "values"):
                if not isinstance(v, list):
                    raise ConfigError(f"{where}: '{n}' must be a list")
                v = [float(_number(x, f"{where}.{n}")) for x in v]
            else:
                v = _number(v, f"{where}.{n}")
            kwargs[n] = v
    if kind == "cosine":
        kwargs.setdefault("freq", "2*pi")
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def parse_potentials(entries, graph: MetricGraph) -> list[EdgePotential]:
    if entries is None:
        entries = []
    if not isinstance(entries, list):
        raise ConfigError("[[potential]] must be an array of tables")
    if len(entries) > graph.n_edges:
        raise ConfigError(f"{len(entries)} potentials for {graph.n_edges} edges")
    atoms: dict[int, list] = {}
    smooth: dict[int, int | None] = {}
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise ConfigError(f"potential {i} must be a table")
        t = entry.get("edge", i)
        if not isinstance(t, int) or not 0 <= t < graph.n_edges:
            raise ConfigError(f"potential {i} refers to edge {t!r}, graph has {graph.n_edges}")
        if t in atoms:
            raise ConfigError(f"edge {t} has two potential entries")
        raw = entry.get("atoms", [])
        if not isinstance(raw, list):
            raise ConfigError(f"potential {i}: 'atoms' must be a list")
        atoms[t] = [parse_atom(a, f"potential {i} atom {k}") for k, a in enumerate(raw)]
        smooth[t] = entry.get("smoothness")
    return [EdgePotential(e.length, atoms.get(t, ()), smooth.get(t))
            for t, e in enumerate(graph.edges)]


def parse_scheme(section: dict, n_vertices: int, name: str = "scheme") -> MatchingScheme | None:
    if not section:
        return None
    kind = section.get("kind", "delta")
    if "alphas" in section and "alpha" in section:
        raise ConfigError(f"[{name}] gives both 'alpha' and 'alphas'")
    if "alphas" in section:
        alphas = section["alphas"]
        if not isinstance(alphas, list):
            raise ConfigError(f"[{name}] alphas must be a list")
        if len(alphas) != n_vertices:
            raise ConfigError(f"[{name}] has {len(alphas)} alphas for {n_vertices} vertices")
    else:
        alphas = [section.get("alpha", 0.0)] * n_vertices
    try:
        return MatchingScheme(kind, tuple(float(_number(a, f"[{name}] alpha")) for a in alphas))
    except ValueError as exc:
        raise ConfigError(f"[{name}]: {exc}") from None


def _params(section: dict) -> dict:
    out = dict(section)
    for key in ("lambda_max", "tolerance"):
        if key in out:
            v = float(_number(out[key], key))
            if key == "tolerance" and not v > 0:
                raise ConfigError("tolerance must be positive")
            out[key] = v
    if "order" in out:
        if not isinstance(out["order"], int) or out["order"] < 0:
            raise ConfigError("order must be a nonnegative integer")
    if "tau_grid" in out:
        out["tau_grid"] = parse_float_list(out["tau_grid"], "tau_grid")
        if any(t <= 0 for t in out["tau_grid"]):
            raise ConfigError("tau_grid entries must be positive")
    if "lambdas" in out:
        out["lambdas"] = parse_float_list(out["lambdas"], "lambdas")
    if "search_interval" in out:
        si = parse_float_list(out["search_interval"], "search_interval")
        if len(si) != 2 or not si[0] < si[1]:
            raise ConfigError("search_interval must be [a, b] with a < b")
        out["search_interval"] = tuple(si)
    return out


def parse_float_list(value, what: str) -> list[float]:
    if isinstance(value, str):
        value = [v for v in value.split(",") if v.strip()]
    if not isinstance(value, list):
        raise ConfigError(f"{what} must be a list of numbers")
    try:
        return [float(_number(v, what)) for v in value]
    except ValueError:
        raise ConfigError(f"{what} must be a list of numbers") from None


def load_config(source: str | Path | dict) -> JobConfig:
    """Parse and validate a job file (path, TOML text via ``Path``, or parsed dict).

    Raises ``ConfigError`` for syntax and schema problems and graph
    validation errors for structurally invalid graphs.
    """
    if isinstance(source, dict):
        doc = source
    else:
        try:
            with open(source, "rb") as fh:
                doc = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read {source}: {exc.strerror}") from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{source}: {exc}") from None
    graph = parse_graph(_table(doc, "graph", required=True))
    pots = parse_potentials(doc.get("potential"), graph)
    scheme = parse_scheme(_table(doc, "scheme"), graph.n_vertices)
    scheme_b = parse_scheme(_table(doc, "scheme_b"), graph.n_vertices, "scheme_b")
    target = dict(_table(doc, "target"))
    if "eigenvalues" in target:
        target["eigenvalues"] = parse_float_list(target["eigenvalues"], "target eigenvalues")
    return JobConfig(graph, pots, scheme, scheme_b, _params(_table(doc, "params")), target)


def target_spectrum(values: list[float]) -> Spectrum:
    vals = sorted(values)
    return Spectrum.from_values(vals, vals[-1] if vals else 0.0)
