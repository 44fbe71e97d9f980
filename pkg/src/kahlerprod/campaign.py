"""Configuration-driven verification campaigns.

A campaign runs a selection of checks against one gallery instance and
produces a JSON report plus a flat CSV with one row per (check, sample).

Config schema (JSON object; only ``instance`` is required)::

    {
      "instance": "sphere:1,2",
      "checks": ["j-squared", "nijenhuis"],      # or "all"
      "samples": 100,                            # or {"nijenhuis": 200, ...}
      "seed": 42,                                # 64-bit unsigned integer
      "tolerances": {"nijenhuis": 1e-5},         # overrides of DEFAULT_TOLERANCES
      "mixing": [[1, 1], [1, -1]],               # Ψ mixing for holomorphy/lattice/charts
      "claim": [0, 0],                           # lattice claim denominators, [0, 0] = |det A|
      "truncation_probe": false,                 # calabi-eckmann only
      "workers": 1,
      "output": {"dir": "out", "report": "report.json", "csv": "residuals.csv"}
    }

Each check draws from its own generator seeded by ``(seed, check index)``, so
results do not depend on which other checks run or on ``workers``.
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product as iproduct
from pathlib import Path
from typing import Any

import numpy as np

from . import charts, gallery, groups
from . import nijenhuis as nj
from . import torus
from .errors import ConfigError, GeometryError
from .moment import check_equivariance
from .product import ProductPoint, ProductTangent, j_squared_residuals

CHECKS = ("j-squared", "nijenhuis", "holomorphy", "equivariance", "lattice", "charts")
OUT_ENV = "KAHLERPROD_OUT"
DEFAULT_OUT = "kahlerprod-out"

DEFAULT_SAMPLES = {
    "j-squared": 100,
    "nijenhuis": 200,
    "holomorphy": 20,
    "equivariance": 100,
    "lattice": 10,
    "charts": 10,
}

DEFAULT_TOLERANCES = {
    "j-squared": 1e-9,
    "nijenhuis": 1e-5,
    "nijenhuis-floor": 0.1,
    "nijenhuis-oracle": 1e-5,
    "holomorphy": 1e-8,
    "equivariance": 1e-12,
    "lattice": 1e-12,
    "charts-min-sv": 1e-3,
    "charts-complex-linear": 1e-5,
    "charts-roundtrip": 1e-8,
}

_CONFIG_KEYS = {"instance", "checks", "samples", "seed", "tolerances", "mixing", "claim",
                "truncation_probe", "workers", "output"}


# --- config ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OutputPaths:
    dir: str | None = None
    report: str = "report.json"
    csv: str = "residuals.csv"

    def resolve(self) -> tuple[Path, Path]:
        base = Path(self.dir or os.environ.get(OUT_ENV) or DEFAULT_OUT)
        return base / self.report, base / self.csv


@dataclass(frozen=True)
class CampaignConfig:
    instance: str
    checks: tuple[str, ...] = ("all",)
    samples: dict[str, int] = field(default_factory=dict)
    seed: int = 0
    tolerances: dict[str, float] = field(default_factory=dict)
    mixing: tuple[tuple[int, int], tuple[int, int]] = torus.DEFAULT_MIXING
    claim: tuple[int, int] = (0, 0)
    truncation_probe: bool = False
    workers: int = 1
    output: OutputPaths = field(default_factory=OutputPaths)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> CampaignConfig:
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(data) - _CONFIG_KEYS
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "instance" not in data or not isinstance(data["instance"], str):
            raise ConfigError("config needs an 'instance' name string")

        checks = data.get("checks", ["all"])
        if isinstance(checks, str):
            checks = [checks]
        if not isinstance(checks, list) or not all(isinstance(c, str) for c in checks):
            raise ConfigError("'checks' must be a check name or a list of names")
        for c in checks:
            if c != "all" and c not in CHECKS:
                raise ConfigError(f"unknown check {c!r}; choose from {', '.join(CHECKS)} or all")
        if len(set(checks)) != len(checks):
            raise ConfigError("'checks' lists a check more than once")
        if "all" in checks and len(checks) > 1:
            raise ConfigError("'all' cannot be combined with other check names")

        samples = data.get("samples", {})
        if isinstance(samples, int) and not isinstance(samples, bool):
            samples = {c: samples for c in CHECKS}
        if not isinstance(samples, dict):
            raise ConfigError("'samples' must be an integer or an object of per-check integers")
        for k, v in samples.items():
            if k not in CHECKS:
                raise ConfigError(f"'samples' names unknown check {k!r}")
            if not isinstance(v, int) or isinstance(v, bool) or v < 1:
                raise ConfigError(f"sample count for {k!r} must be a positive integer")

        seed = data.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
            raise ConfigError("'seed' must be a 64-bit unsigned integer")

        tolerances = data.get("tolerances", {})
        if not isinstance(tolerances, dict):
            raise ConfigError("'tolerances' must be an object")
        for k, v in tolerances.items():
            if k not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance {k!r}; choose from {', '.join(DEFAULT_TOLERANCES)}")
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
                raise ConfigError(f"tolerance {k!r} must be positive")

        try:
            mixing = torus._mixing(data.get("mixing", torus.DEFAULT_MIXING))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"'mixing': {exc}") from None
        claim = data.get("claim", [0, 0])
        if (not isinstance(claim, (list, tuple)) or len(claim) != 2
                or not all(isinstance(x, int) and x >= 0 for x in claim)
                or (0 in claim and tuple(claim) != (0, 0))):
            raise ConfigError("'claim' must be two positive integers, or [0, 0] for |det A|")

        workers = data.get("workers", 1)
        if not isinstance(workers, int) or workers < 1:
            raise ConfigError("'workers' must be a positive integer")

        out = data.get("output", {})
        if not isinstance(out, dict) or set(out) - {"dir", "report", "csv"}:
            raise ConfigError("'output' must be an object with keys dir, report, csv")

        return cls(
            instance=data["instance"],
            checks=tuple(checks),
            samples=dict(samples),
            seed=seed,
            tolerances={k: float(v) for k, v in tolerances.items()},
            mixing=mixing,
            claim=tuple(claim),
            truncation_probe=bool(data.get("truncation_probe", False)),
            workers=workers,
            output=OutputPaths(**out),
        )

    @classmethod
    def load(cls, path: str | os.PathLike) -> CampaignConfig:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {path} is not valid JSON: {exc}") from None

    def to_dict(self) -> dict[str, Any]:
        return {
            "instance": self.instance,
            "checks": list(self.checks),
            "samples": dict(sorted(self.samples.items())),
            "seed": self.seed,
            "tolerances": dict(sorted(self.tolerances.items())),
            "mixing": [list(r) for r in self.mixing],
            "claim": list(self.claim),
            "truncation_probe": self.truncation_probe,
            "workers": self.workers,
            "output": {"dir": self.output.dir, "report": self.output.report, "csv": self.output.csv},
        }

    def n_samples(self, check: str) -> int:
        return self.samples.get(check, DEFAULT_SAMPLES[check])

    def tol(self, key: str) -> float:
        return self.tolerances.get(key, DEFAULT_TOLERANCES[key])


# --- results --------------------------------------------------------------------------

@dataclass
class Row:
    part: str
    index: int
    residual: float
    threshold: float
    expect_above: bool = False
    witness: dict[str, Any] | None = None

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.residual):
            return False
        return self.residual >= self.threshold if self.expect_above else self.residual <= self.threshold


@dataclass
class CheckResult:
    name: str
    rows: list[Row] = field(default_factory=list)
    mode: str = "vanishing"
    extra: dict[str, Any] = field(default_factory=dict)
    error: str | None = None
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return self.error is None and bool(self.rows) and all(r.passed for r in self.rows)

    def summary(self) -> dict[str, Any]:
        parts = {}
        for r in self.rows:
            p = parts.setdefault(r.part, {"threshold": r.threshold,
                                          "comparison": ">=" if r.expect_above else "<=",
                                          "samples": 0, "max_residual": 0.0, "min_residual": np.inf,
                                          "passed": True})
            p["samples"] += 1
            p["max_residual"] = max(p["max_residual"], r.residual)
            p["min_residual"] = min(p["min_residual"], r.residual)
            p["passed"] = p["passed"] and r.passed
        out = {
            "status": "pass" if self.passed else "fail",
            "mode": self.mode,
            "max_residual": max((r.residual for r in self.rows), default=None),
            "samples": len(self.rows),
            "wall_time": round(self.wall_time, 4),
            "parts": parts,
        }
        failing = [r for r in self.rows if not r.passed]
        if failing:
            worst = max(failing, key=lambda r: r.residual if not r.expect_above else -r.residual)
            out["witness"] = {"part": worst.part, "sample_index": worst.index,
                              "residual": worst.residual, **(worst.witness or {})}
        if self.error is not None:
            out["error"] = self.error
        out.update(self.extra)
        return out


@dataclass
class Report:
    config: CampaignConfig
    instance: str
    results: list[CheckResult]
    probe: dict[str, Any] | None = None

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_dict(self) -> dict[str, Any]:
        out = {
            "instance": self.instance,
            "seed": self.config.seed,
            "passed": self.passed,
            "checks": {r.name: r.summary() for r in self.results},
            "config": self.config.to_dict(),
        }
        if self.probe is not None:
            out["truncation_probe"] = self.probe
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=_json_default) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["check", "instance", "sample_index", "residual", "threshold", "pass"])
        for res in self.results:
            for r in res.rows:
                name = res.name if r.part == res.name else f"{res.name}:{r.part}"
                w.writerow([name, self.instance, r.index, f"{r.residual:.12e}", f"{r.threshold:.6e}",
                            "true" if r.passed else "false"])
        return buf.getvalue()


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, complex):
        return [o.real, o.imag]
    if isinstance(o, Fraction):
        return str(o)
    if o == np.inf:
        return None
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def _cplx(a) -> list:
    """Complex array as nested [re, im] pairs for JSON witnesses."""
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def _point_witness(q: ProductPoint) -> dict[str, Any]:
    return {"p1": _cplx(q.p1), "p2": _cplx(q.p2)}


# --- applicability --------------------------------------------------------------------

def applicable(inst: gallery.GalleryInstance, check: str, mixing=torus.DEFAULT_MIXING) -> str | None:
    """None if ``check`` can run on ``inst``, else the reason it cannot."""
    if check in ("holomorphy", "charts"):
        acs = inst.acs
        circle = inst.circle()
        for N in acs.factors:
            try:
                groups.circle_weights(N.group, circle, N.ambient.complex_dim)
            except GeometryError as exc:
                return f"no scalar circle action: {exc}"
        if check == "charts":
            try:
                charts._check_chartable(acs.n1, circle)
                charts._check_chartable(acs.n2, circle)
            except GeometryError as exc:
                return str(exc)
    if check in ("holomorphy", "lattice", "charts") and torus.det2(mixing) == 0:
        return "mixing matrix is singular"
    return None


def resolve_checks(cfg: CampaignConfig, inst: gallery.GalleryInstance) -> tuple[str, ...]:
    if "all" in cfg.checks:
        return tuple(c for c in CHECKS if applicable(inst, c, cfg.mixing) is None)
    for c in cfg.checks:
        reason = applicable(inst, c, cfg.mixing)
        if reason is not None:
            raise ConfigError(f"check {c!r} does not apply to {inst.name}: {reason}")
    return cfg.checks


# --- checks ---------------------------------------------------------------------------

def run_j_squared(inst, cfg, rng) -> CheckResult:
    acs = inst.acs
    res = CheckResult("j-squared")
    tol = cfg.tol("j-squared")
    for i in range(cfg.n_samples("j-squared")):
        q = acs.sample_point(rng)
        (r, w), = j_squared_residuals(acs, q, 1, rng)
        res.rows.append(Row("j-squared", i, r, tol,
                            witness={**_point_witness(q), "tangent": {"v1": _cplx(w.v1), "v2": _cplx(w.v2)}}))
    return res


def designated_pair(k: int) -> tuple[np.ndarray, np.ndarray]:
    """ξ = [[0,1],[-1,0]], η = [[0,i],[i,0]] in the top-left block of u(k)."""
    xi = np.zeros((k, k), dtype=complex)
    eta = np.zeros((k, k), dtype=complex)
    xi[:2, :2] = [[0, 1], [-1, 0]]
    eta[:2, :2] = [[0, 1j], [1j, 0]]
    return xi, eta


def _unit(v: np.ndarray) -> np.ndarray:
    return v / np.linalg.norm(v)


def horizontal_field(acs, q: ProductPoint, factor: int, rng) -> nj.ProjectedConstant:
    """A field whose value at q is a unit horizontal vector on ``factor`` (1 or 2)."""
    N = acs.factors[factor - 1]
    p = (q.p1, q.p2)[factor - 1]
    s = acs.split(q)[factor - 1]
    shape = N.ambient.shape
    h = s.horizontal_part(N.project(p, rng.standard_normal(shape) + 1j * rng.standard_normal(shape)))
    return nj.ProjectedConstant(_unit(h), factor)


def vertical_field(acs, q: ProductPoint, factor: int, rng) -> nj.GeneratorField:
    """Generator field of a random algebra element, scaled to unit length at q."""
    xi = groups.random_algebra(acs.group, rng)
    p = (q.p1, q.p2)[factor - 1]
    n = np.linalg.norm(groups.generator(acs.factors[factor - 1].group, xi, p))
    return nj.GeneratorField(xi / n, factor)


def _field_witness(f) -> dict[str, Any]:
    if isinstance(f, nj.GeneratorField):
        return {"kind": "generator", "factor": f.factor, "xi": _cplx(f.xi)}
    if isinstance(f, nj.ProjectedConstant):
        return {"kind": "projected", "factor": f.factor, "u": _cplx(f.u)}
    if isinstance(f, nj.SumField):
        return {"kind": "sum", "terms": [_field_witness(t) for t in f.terms]}
    return {"kind": type(f).__name__}


ABELIAN_CASES = ("horizontal", "vertical", "mixed", "combined")
NONABELIAN_CASES = ("vertical-pair", "horizontal", "mixed")


def _draw_pair(acs, q, case: str, rng):
    f1, f2 = (int(x) for x in rng.integers(1, 3, 2))
    if case == "horizontal":
        return horizontal_field(acs, q, f1, rng), horizontal_field(acs, q, f2, rng)
    if case == "vertical":
        return vertical_field(acs, q, f1, rng), vertical_field(acs, q, f2, rng)
    if case == "mixed":
        return horizontal_field(acs, q, f1, rng), vertical_field(acs, q, f2, rng)
    # combined: each field has horizontal and vertical parts on both factors
    X = nj.SumField(tuple(g(acs, q, f, rng) for g in (horizontal_field, vertical_field) for f in (1, 2)))
    Y = nj.SumField(tuple(g(acs, q, f, rng) for g in (horizontal_field, vertical_field) for f in (1, 2)))
    return X, Y


def run_nijenhuis(inst, cfg, rng) -> CheckResult:
    """Abelian G: N_J vanishes on every draw.  Nonabelian G: the designated
    vertical pair must reach the floor and match the exact formula, while the
    horizontal and horizontal-vertical cases still vanish."""
    acs = inst.acs
    tol = cfg.tol("nijenhuis")
    if inst.abelian:
        res = CheckResult("nijenhuis", mode="vanishing")
        cases = ABELIAN_CASES
    else:
        res = CheckResult("nijenhuis", mode="expected-nonvanishing")
        cases = NONABELIAN_CASES
        xi, eta = designated_pair(acs.group.k)
        res.extra["designated_pair"] = {"xi": _cplx(xi), "eta": _cplx(eta)}
    for i in range(cfg.n_samples("nijenhuis")):
        q = acs.sample_point(rng)
        case = cases[i % len(cases)]
        if case == "vertical-pair":
            X, Y = nj.GeneratorField(xi, 1), nj.GeneratorField(eta, 2)
            N = nj.nijenhuis_tensor(acs, X, Y, q)
            oracle = nj.vertical_oracle(acs, xi, eta, q)
            wit = {**_point_witness(q), "X": _field_witness(X), "Y": _field_witness(Y)}
            res.rows.append(Row("vertical-pair", i, N.norm(), cfg.tol("nijenhuis-floor"), True, wit))
            res.rows.append(Row("oracle", i, (N - oracle).norm(), cfg.tol("nijenhuis-oracle"), False, wit))
            continue
        X, Y = _draw_pair(acs, q, case, rng)
        N = nj.nijenhuis_tensor(acs, X, Y, q)
        res.rows.append(Row(case, i, N.norm(), tol,
                            witness={**_point_witness(q), "X": _field_witness(X), "Y": _field_witness(Y)}))
    return res


def run_holomorphy(inst, cfg, rng) -> CheckResult:
    act = torus.PsiAction(inst.acs, cfg.mixing, inst.circle())
    res = CheckResult("holomorphy")
    res.extra["mixing"] = [list(r) for r in cfg.mixing]
    res.extra["holomorphic_mixing"] = torus.is_holomorphic_mixing(cfg.mixing)
    tol = cfg.tol("holomorphy")
    for i in range(cfg.n_samples("holomorphy")):
        q = inst.acs.sample_point(rng)
        z = complex(*rng.uniform(-1, 1, 2))
        wit = {**_point_witness(q), "z": [z.real, z.imag]}
        res.rows.append(Row("orbit", i, torus.check_orbit_holomorphy(act, q, z), tol, witness=wit))
        res.rows.append(Row("translation", i, torus.check_translation_holomorphy(act, z, q, 5, rng), tol,
                            witness=wit))
    return res


def run_equivariance(inst, cfg, rng) -> CheckResult:
    res = CheckResult("equivariance")
    tol = cfg.tol("equivariance")
    idx = 0
    for _ in range(cfg.n_samples("equivariance")):
        for N in inst.acs.factors:
            shape = N.ambient.shape
            a = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            a /= np.linalg.norm(a) / np.sqrt(a.shape[-1] if a.ndim == 2 else 1)
            u = groups.random_element(N.group, rng)
            r = check_equivariance(N.moment, a, u)
            res.rows.append(Row("equivariance", idx, r, tol, witness={"point": _cplx(a), "g": _cplx(u)}))
            idx += 1
    return res


def brute_force_stabilizer(A, denom: int = 24) -> set[tuple[Fraction, Fraction]]:
    """Points of (ℤ/D)² ∩ [0,1)² fixed by Ψ, with D = lcm(denom, |det A|)."""
    (a11, a12), (a21, a22) = torus._mixing(A)
    d = abs(a11 * a22 - a12 * a21)
    D = math.lcm(denom, d) if d else denom
    out = set()
    for i, j in iproduct(range(D), repeat=2):
        if (a11 * i + a21 * j) % D == 0 and (a12 * i + a22 * j) % D == 0:
            out.add((Fraction(i, D), Fraction(j, D)))
    return out


def lattice_points_in_cell(lat: torus.Lattice2D) -> set[tuple[Fraction, Fraction]]:
    """Λ ∩ [0,1)², enumerated exactly from the reduced generators."""
    out = set()
    R = int(np.ceil(2 / float(lat.covolume))) + 2
    for m, n in iproduct(range(-R, R + 1), repeat=2):
        x = (m * lat.v1[0] + n * lat.v2[0], m * lat.v1[1] + n * lat.v2[1])
        if 0 <= x[0] < 1 and 0 <= x[1] < 1:
            out.add(x)
    return out


def run_lattice(inst, cfg, rng) -> CheckResult:
    A = cfg.mixing
    res = CheckResult("lattice", mode="exact")
    lat = torus.period_lattice(A)
    det = torus.det2(A)
    report = torus.check_lattice_claim(A, cfg.claim)
    oracle_ok = brute_force_stabilizer(A) == lattice_points_in_cell(lat)
    res.extra.update({
        "mixing": [list(r) for r in A],
        "generators": [torus.format_vec(lat.v1), torus.format_vec(lat.v2)],
        "covolume": str(lat.covolume),
        "covolume_times_det": str(lat.covolume * abs(det)),
        "brute_force_agrees": oracle_ok,
        "claim": [torus.format_vec(g) for g in report.claim],
        "containment": report.verdict,
        "witness_element": None if report.witness is None else torus.format_vec(report.witness),
    })
    exact = float(lat.covolume * abs(det) != 1) + float(not oracle_ok)
    res.rows.append(Row("exact", 0, exact, 0.5))
    act = torus.PsiAction(inst.acs, A, inst.circle())
    tol = cfg.tol("lattice")
    for i in range(cfg.n_samples("lattice")):
        q = inst.acs.sample_point(rng)
        res.rows.append(Row("generator-action", i, torus.lattice_residual(act, lat, q), tol,
                            witness=_point_witness(q)))
    return res


def run_charts(inst, cfg, rng) -> CheckResult:
    act = torus.PsiAction(inst.acs, cfg.mixing, inst.circle())
    q = inst.acs.sample_point(rng)
    c = charts.make_chart(act, q)
    res = CheckResult("charts")
    res.extra["mixing"] = [list(r) for r in cfg.mixing]
    base = _point_witness(q)
    d = charts.check_local_diffeo(c, samples=3, rng=rng)
    res.extra.update({"rank_at_base": d.rank_at_base, "expected_rank": d.expected_rank,
                      "collisions": d.collisions})
    full_rank = d.rank_at_base == d.expected_rank and d.collisions == 0
    res.rows.append(Row("min-sv", 0, d.min_sv_at_base if full_rank else 0.0, cfg.tol("charts-min-sv"), True, base))
    for i in range(cfg.n_samples("charts")):
        r = charts.check_phi_complex_linear(c, samples=1, rng=rng)
        res.rows.append(Row("complex-linear", i, r, cfg.tol("charts-complex-linear"), witness=base))
    tr = charts.transition_function(c, charts.shifted_chart(c), rng=rng)
    res.extra["transition_continuous"] = tr.continuous
    for i, s in enumerate(tr.samples):
        wit = {**base, "t1": s.t1.tolist(), "t2": s.t2.tolist(), "h": [s.h.real, s.h.imag]}
        res.rows.append(Row("roundtrip", i, max(s.roundtrip, s.g_residual), cfg.tol("charts-roundtrip"),
                            witness=wit))
    res.rows.append(Row("continuity", 0, tr.max_jump, 10 * tr.grid_spacing * max(tr.lipschitz, 1e-12)))
    return res


RUNNERS = {
    "j-squared": run_j_squared,
    "nijenhuis": run_nijenhuis,
    "holomorphy": run_holomorphy,
    "equivariance": run_equivariance,
    "lattice": run_lattice,
    "charts": run_charts,
}

_MODULE_OF = {
    "j-squared": "product",
    "nijenhuis": "nijenhuis",
    "holomorphy": "torus",
    "equivariance": "moment",
    "lattice": "torus",
    "charts": "charts",
}


def check_rng(seed: int, check: str) -> np.random.Generator:
    return np.random.default_rng([seed, CHECKS.index(check)])


def _run_one(inst, cfg: CampaignConfig, check: str) -> CheckResult:
    t0 = time.perf_counter()
    try:
        res = RUNNERS[check](inst, cfg, check_rng(cfg.seed, check))
    except GeometryError as exc:
        res = CheckResult(check, error=f"{_MODULE_OF[check]}: {type(exc).__name__}: {exc}")
    res.wall_time = time.perf_counter() - t0
    return res


def truncation_probe(n: int, d: int, seed: int, samples: int = 20) -> dict[str, Any]:
    """Max J² and abelian N_J residuals at truncation d and 2d."""
    out = {}
    for dim in (d, 2 * d):
        inst = gallery.make_calabi_eckmann(n, dim)
        cfg = CampaignConfig(inst.name, samples={"j-squared": samples, "nijenhuis": samples}, seed=seed)
        js = run_j_squared(inst, cfg, check_rng(seed, "j-squared"))
        nij = run_nijenhuis(inst, cfg, check_rng(seed, "nijenhuis"))
        out[str(dim)] = {"j-squared": max(r.residual for r in js.rows),
                         "nijenhuis": max(r.residual for r in nij.rows)}
    return out


def build_instance(name: str) -> gallery.GalleryInstance:
    try:
        return gallery.parse_instance(name)
    except ConfigError:
        raise
    except (GeometryError, ValueError) as exc:
        raise ConfigError(f"gallery: cannot build {name!r}: {exc}") from exc


def run_campaign(cfg: CampaignConfig) -> Report:
    """Run the configured checks; no files are written (see :func:`write_report`)."""
    inst = build_instance(cfg.instance)
    checks = resolve_checks(cfg, inst)
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(lambda c: _run_one(inst, cfg, c), checks))
    else:
        results = [_run_one(inst, cfg, c) for c in checks]
    probe = None
    if cfg.truncation_probe:
        kind, _, args = inst.name.partition(":")
        if kind != "calabi-eckmann":
            raise ConfigError("'truncation_probe' applies to calabi-eckmann instances only")
        n, d = (int(x) for x in args.split(","))
        probe = truncation_probe(n, d, cfg.seed)
    return Report(cfg, inst.name, results, probe)


def prepare_output(cfg: CampaignConfig) -> tuple[Path, Path]:
    report_path, csv_path = cfg.output.resolve()
    for p in {report_path.parent, csv_path.parent}:
        try:
            p.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"cannot create output directory {p}: {exc}") from None
        if not os.access(p, os.W_OK):
            raise ConfigError(f"output directory {p} is not writable")
    return report_path, csv_path


def write_report(report: Report, paths: tuple[Path, Path]) -> None:
    report_path, csv_path = paths
    report_path.write_text(report.to_json())
    csv_path.write_text(report.to_csv())
