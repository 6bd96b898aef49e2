"""Run configuration and machine-readable reports.

Report schema (JSON, ``schema = "qdehelix-report/1"``)::

    {
      "schema": "qdehelix-report/1",
      "command": "monodromy" | "verify" | "orbit" | "grassmannian",
      "status": "ok" | "fail" | "error",
      "exit_code": int,
      "config": {...},                 # echo of RunConfig
      "basis_labels": [str, ...],
      "matrices": {name: [[[re, im], ...], ...]},
      "integer_matrices": {name: [[int, ...], ...]},
      "residuals": {name: float},
      "match": {...} | null,
      "diagnostics": {...},
      "error": {"type", "message", "exit_code", ...} | null,
      "versions": {...},
      "timing": {...}                  # only with --timing
    }

Floats are written with 17 significant digits, which round-trips binary64
exactly; non-finite floats are written as the strings "inf", "-inf", "nan".
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from math import comb

import numpy as np

from .errors import ArgumentError

SCHEMA = "qdehelix-report/1"
MAX_N = 8
MAX_G_DIM = 70


@dataclass
class RunConfig:
    space: str = "P"
    n: int = 3
    k: int = 1
    t: complex = 0j
    phi: float | None = None
    tol: float = 1e-8
    q_order: int | None = None
    z_order: int | None = None
    formal_order: int | None = None
    orbit_depth: int = 6
    output_path: str | None = None
    format: str = "json"
    signs: tuple | None = None
    helix_range: tuple = (-2, 2)
    permutations: bool = False

    def __post_init__(self):
        self.space = str(self.space).upper()
        self.t = complex(self.t)
        if self.space not in ("P", "G"):
            raise ArgumentError(f"space must be P or G, got {self.space!r}")
        if not 1 <= self.n <= MAX_N:
            raise ArgumentError(f"n must be in 1..{MAX_N}, got {self.n}")
        if self.space == "G":
            if not 1 <= self.k < self.n:
                raise ArgumentError(f"need 1 <= k < n for G(k, n), got k={self.k}, n={self.n}")
            if comb(self.n, self.k) > MAX_G_DIM:
                raise ArgumentError(f"binomial(n, k) = {comb(self.n, self.k)} exceeds {MAX_G_DIM}")
        if not self.tol > 0:
            raise ArgumentError("tol must be positive")
        if self.orbit_depth < 0:
            raise ArgumentError("orbit depth must be non-negative")
        if self.format not in ("json", "csv"):
            raise ArgumentError(f"format must be json or csv, got {self.format!r}")
        for name in ("q_order", "z_order", "formal_order"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ArgumentError(f"{name} must be >= 1")
        if self.signs is not None:
            self.signs = tuple(int(s) for s in self.signs)
            if len(self.signs) != self.n or any(s not in (1, -1) for s in self.signs):
                raise ArgumentError(f"signs must be {self.n} values in {{+1, -1}}")

    def echo(self) -> dict:
        d = asdict(self)
        d["t"] = [self.t.real, self.t.imag]
        d["signs"] = None if self.signs is None else list(self.signs)
        d["helix_range"] = list(self.helix_range)
        d.pop("output_path")
        return d


@dataclass
class Report:
    command: str
    config: dict
    status: str = "ok"
    exit_code: int = 0
    basis_labels: list = field(default_factory=list)
    matrices: dict = field(default_factory=dict)
    integer_matrices: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    match: dict | None = None
    diagnostics: dict = field(default_factory=dict)
    error: dict | None = None
    versions: dict = field(default_factory=dict)
    timing: dict | None = None

    def add_matrix(self, name: str, M):
        self.matrices[name] = complex_matrix_to_list(M)

    def add_integer_matrix(self, name: str, M):
        self.integer_matrices[name] = integer_matrix_to_list(M)

    def matrix(self, name: str) -> np.ndarray:
        return list_to_complex_matrix(self.matrices[name])

    def integer_matrix(self, name: str) -> np.ndarray:
        return np.array(self.integer_matrices[name], dtype=object)

    def to_dict(self) -> dict:
        d = {
            "schema": SCHEMA,
            "command": self.command,
            "status": self.status,
            "exit_code": self.exit_code,
            "config": self.config,
            "basis_labels": self.basis_labels,
            "matrices": self.matrices,
            "integer_matrices": self.integer_matrices,
            "residuals": self.residuals,
            "match": self.match,
            "diagnostics": self.diagnostics,
            "error": self.error,
            "versions": self.versions,
        }
        if self.timing is not None:
            d["timing"] = self.timing
        return d

    def to_json(self) -> str:
        return dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        if d.get("schema") != SCHEMA:
            raise ArgumentError(f"unknown report schema {d.get('schema')!r}")
        d = {k: v for k, v in d.items() if k != "schema"}
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(loads(text))

    def to_csv(self) -> str:
        """All matrices, row-major, one block per matrix with a label header."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        labels = self.basis_labels
        for name, M in self.matrices.items():
            cols = labels if len(labels) == len(M[0]) else [str(j + 1) for j in range(len(M[0]))]
            w.writerow([f"# {name}"])
            w.writerow(["row"] + [f"{c}:{part}" for c in cols for part in ("re", "im")])
            rows = labels if len(labels) == len(M) else [str(i + 1) for i in range(len(M))]
            for lab, row in zip(rows, M):
                w.writerow([lab] + [_fmt(x) for pair in row for x in pair])
        for name, M in self.integer_matrices.items():
            cols = labels if len(labels) == len(M[0]) else [str(j + 1) for j in range(len(M[0]))]
            w.writerow([f"# {name}"])
            w.writerow(["row"] + list(cols))
            rows = labels if len(labels) == len(M) else [str(i + 1) for i in range(len(M))]
            for lab, row in zip(rows, M):
                w.writerow([lab] + [str(int(x)) for x in row])
        if self.residuals:
            w.writerow(["# residuals"])
            w.writerow(["name", "value"])
            for k, v in self.residuals.items():
                w.writerow([k, _fmt(v)])
        return buf.getvalue()


def complex_matrix_to_list(M) -> list:
    M = np.asarray(M)
    return [[[float(complex(x).real), float(complex(x).imag)] for x in row] for row in M]


def list_to_complex_matrix(L) -> np.ndarray:
    return np.array([[complex(_num(a), _num(b)) for a, b in row] for row in L], dtype=complex)


def integer_matrix_to_list(M) -> list:
    out = []
    for row in np.asarray(M, dtype=object):
        r = []
        for x in row:
            if hasattr(x, "denominator") and x.denominator != 1:
                raise ArgumentError(f"non-integer entry {x} in an integer matrix")
            r.append(int(x))
        out.append(r)
    return out


def _num(x):
    if isinstance(x, str):
        return float(x)
    return float(x)


def _fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0.0" if math.copysign(1, x) > 0 else "-0.0"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "inf" not in s:
        s += ".0"
    return s


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        s = _fmt(obj)
        return json.dumps(s) if s in ("nan", "inf", "-inf") else s
    if isinstance(obj, complex):
        return _encode([obj.real, obj.imag], indent, level)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_encode(v, indent, level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(x, (list, tuple, dict, np.ndarray)) for x in seq):
            return "[" + ", ".join(_encode(x, indent, level + 1) for x in seq) + "]"
        if all(isinstance(x, (list, tuple)) and all(not isinstance(y, (list, tuple, dict)) for y in x) for x in seq):
            # innermost pairs / integer rows on one line each
            return "[" + ", ".join(_encode(x, indent, level + 1) for x in seq) + "]"
        items = [pad + _encode(x, indent, level + 1) for x in seq]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """Deterministic JSON with 17-significant-digit floats."""
    return _encode(obj, indent, 0) + "\n"


def _revive(obj):
    if isinstance(obj, dict):
        return {k: _revive(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_revive(v) for v in obj]
    if obj in ("nan", "inf", "-inf"):
        return float(obj)
    return obj


def loads(text: str):
    return _revive(json.loads(text))


def error_object(exc: BaseException) -> dict:
    d = {"type": type(exc).__name__, "message": str(exc), "exit_code": int(getattr(exc, "exit_code", 5))}
    for attr in ("suggested_orders", "best_residual", "last_point", "offending"):
        if getattr(exc, attr, None) is not None:
            v = getattr(exc, attr)
            d[attr] = [v.real, v.imag] if isinstance(v, complex) else v
    if getattr(exc, "best_word", None) is not None:
        d["best_word"] = str(exc.best_word)
    ray = getattr(exc, "ray", None)
    if ray is not None:
        d["ray"] = {"phi": ray.phi, "pair": list(ray.pair)} if hasattr(ray, "phi") else list(ray)
    return d


def versions() -> dict:
    import mpmath

    from . import __version__
    return {"qdehelix": __version__, "numpy": np.__version__, "mpmath": mpmath.__version__}
