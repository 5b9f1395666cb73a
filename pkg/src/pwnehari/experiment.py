"""The Nehari-ratio experiment and the classification verdict.

For a domain with infinitely many exposed points one can pick k certified
bump placements whose interaction regions are pairwise disjoint; the
ratio ||phi_hat||_2^2 / (||phi||_1 ||H_phi||) of the resulting bump sums
then grows without bound, which is incompatible with every bounded Hankel
operator having a bounded symbol.  At desk scale the deliverable is the
growth of that measured ratio over a k sweep together with its analytic
lower bound, every row backed by certificates.
"""

import csv
import io
import json
import math
import os
import tempfile

import numpy as np
from dataclasses import dataclass, field

from . import classify as cmod
from .bodies import Ball, body_from_dict
from .bumps import (BumpSpec, bump_norms, default_profile, phi_time_from_hat,
                    assemble_phi_hat, unit_ball_volume)
from .hankel import build_hankel, op_norm
from .regions import FOUND, interaction_region, select_separated_points

SCHEMA_VERSION = 1

NEHARI_FAILS = "NEHARI_FAILS"
OPEN_POLYTOPE = "OPEN_POLYTOPE"
OPEN_POLYHEDRON = "OPEN_POLYHEDRON"
UNKNOWN = "UNKNOWN"

COMPLETED = "COMPLETED"
BLOCKED = "BLOCKED"

CSV_COLUMNS = ["k", "r", "l2sq_hat", "l1_time", "hankel_norm", "ratio",
               "analytic_bound", "certificates_ok"]


class ConfigError(ValueError):
    """Configuration violates the schema; the message names the field."""


@dataclass
class ExperimentConfig:
    """Reproducible description of a ratio sweep (see docs/config_schema.md)."""
    omega: dict = None
    k_sweep: tuple = (1, 2, 4, 8)
    samples_per_bump: int = 24          # assembly samples across a bump radius
    time_pad_extent: float = 32.0       # padded Fourier extent; sets the time rate
    max_grid: int = 8192                # per-axis cap for the padded transform
    hankel_samples_per_bump: int = 8    # lattice steps across a bump radius
    hankel_row_cap: int = 4096
    norm_resolutions: tuple = (256, 512)
    norm_pad: int = 8
    r_sweep: tuple = (0.125, 16.0, 32)  # (lo, hi, count), log spaced
    n_directions: int = 256
    select_r_floor: float = 1e-4
    seed: int = 0
    out_csv: str = None
    out_json: str = None

    def resolved(self):
        d = dict(self.__dict__)
        d["schema_version"] = SCHEMA_VERSION
        return d


_CONFIG_FIELDS = {
    "omega": dict, "k_sweep": list, "samples_per_bump": int,
    "time_pad_extent": (int, float), "max_grid": int,
    "hankel_samples_per_bump": int, "hankel_row_cap": int,
    "norm_resolutions": list, "norm_pad": int, "r_sweep": list,
    "n_directions": int, "select_r_floor": (int, float), "seed": int,
    "out_csv": str, "out_json": str, "schema_version": int,
}


def config_from_dict(d):
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    version = d.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: unsupported value {version}")
    cfg = ExperimentConfig()
    for key, val in d.items():
        if key == "schema_version":
            continue
        if key not in _CONFIG_FIELDS:
            raise ConfigError(f"{key}: unknown field")
        want = _CONFIG_FIELDS[key]
        if val is not None and not isinstance(val, want):
            raise ConfigError(f"{key}: expected {want}, got {type(val).__name__}")
        if key in ("k_sweep", "norm_resolutions", "r_sweep"):
            val = tuple(val)
        setattr(cfg, key, val)
    if cfg.omega is None:
        raise ConfigError("omega: required")
    ks = cfg.k_sweep
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ConfigError("k_sweep: must be strictly increasing")
    if len(cfg.r_sweep) != 3 or cfg.r_sweep[0] <= 0 or cfg.r_sweep[1] <= cfg.r_sweep[0]:
        raise ConfigError("r_sweep: expected (lo, hi, count) with 0 < lo < hi")
    return cfg


def load_config(path):
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from None
    return config_from_dict(data)


def analytic_bound(norms, n, k, R):
    """The closed-form lower bound on the Nehari ratio of a k-bump sum.

    k L2q / (L1 (c_n R^{n/2} sqrt(k ||b||_2^2) + (k/R) |||x| b||_1)) with
    c_n the square root of the unit ball volume.  The bump radius cancels.
    """
    norms.require_reliable()
    if k < 1:
        raise ValueError("k must be >= 1")
    if R <= 0:
        raise ValueError("R must be > 0")
    c_n = math.sqrt(unit_ball_volume(n))
    denom = norms.l1_hat * (c_n * R ** (n / 2.0) * math.sqrt(k * norms.l2sq_time)
                            + (k / R) * norms.l1_weighted)
    return k * norms.l2sq_hat / denom


def analytic_bound_limit(norms, n, R):
    """k -> infinity value R L2q/(L1 |||x| b||_1) of the bound."""
    norms.require_reliable()
    return R * norms.l2sq_hat / (norms.l1_hat * norms.l1_weighted)


def best_analytic_bound(norms, n, k, r_sweep):
    lo, hi, count = r_sweep
    Rs = np.geomspace(lo, hi, int(count))
    vals = [analytic_bound(norms, n, k, R) for R in Rs]
    i = int(np.argmax(vals))
    return float(vals[i]), float(Rs[i])


@dataclass
class SweepRow:
    k: int
    status: str
    r: float = None
    l2sq_hat: float = None
    l1_time: float = None
    hankel_norm: float = None
    ratio: float = None
    analytic_bound: float = None
    best_R: float = None
    certificates_ok: bool = False
    reason: str = ""
    certificates: dict = field(default_factory=dict)
    part_norms: list = field(default_factory=list)

    def csv_values(self):
        def num(x):
            return "" if x is None else repr(float(x))
        return [str(self.k), num(self.r), num(self.l2sq_hat), num(self.l1_time),
                num(self.hankel_norm), num(self.ratio), num(self.analytic_bound),
                str(bool(self.certificates_ok)).lower()]

    def to_dict(self):
        return {"k": self.k, "status": self.status, "r": self.r,
                "l2sq_hat": self.l2sq_hat, "l1_time": self.l1_time,
                "hankel_norm": self.hankel_norm, "ratio": self.ratio,
                "analytic_bound": self.analytic_bound, "best_R": self.best_R,
                "certificates_ok": self.certificates_ok, "reason": self.reason,
                "certificates": self.certificates,
                "part_hankel_norms": self.part_norms}


@dataclass
class ExperimentReport:
    rows: list
    norms: object
    config: ExperimentConfig

    def to_dict(self):
        return {"schema_version": SCHEMA_VERSION,
                "config": _jsonable(self.config.resolved()),
                "bump_norms": {
                    "l1_hat": self.norms.l1_hat, "l2sq_hat": self.norms.l2sq_hat,
                    "l2sq_time": self.norms.l2sq_time,
                    "l1_weighted": self.norms.l1_weighted,
                    "tail_bound": self.norms.tail_bound,
                    "errors": self.norms.errors},
                "rows": [r.to_dict() for r in self.rows]}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _pow2_at_least(x):
    return 1 << (max(1, int(math.ceil(x))) - 1).bit_length()


def run_ratio_row(omega, k, norms, config, profile=None):
    """One row of the sweep: certify a placement, assemble, and measure."""
    profile = profile or default_profile()
    sel = select_separated_points(
        omega, k, n_candidate_directions=config.n_directions,
        r_floor=config.select_r_floor, n_directions=config.n_directions)
    if sel.status != FOUND:
        return SweepRow(k, BLOCKED, reason=sel.reason or "no certified placement",
                        certificates={"selection": _selection_dict(sel)})
    r = sel.r
    bumps = [BumpSpec(c, r) for c in sel.centers]

    h = r / config.samples_per_bump
    los = np.min(sel.centers, axis=0) - 1.25 * r
    his = np.max(sel.centers, axis=0) + 1.25 * r
    extent = float(np.max(his - los))
    N = int(math.ceil(extent / h))
    if N > config.max_grid:
        return SweepRow(k, BLOCKED, reason=f"assembly grid {N} over max_grid")
    # grid-aligned square box
    lo = np.floor(los / h) * h
    hi = lo + N * h
    phi_hat = assemble_phi_hat(profile, bumps, lo, hi, N,
                               max_entries=config.max_grid ** omega.dim)
    l2sq_hat = phi_hat.norm_l2sq()

    pad_target = max(config.time_pad_extent, extent)
    if _pow2_at_least(pad_target / h) > config.max_grid:
        return SweepRow(k, BLOCKED, reason="padded transform over max_grid")
    phi_time = phi_time_from_hat(phi_hat, min_extent=pad_target,
                                 max_entries=config.max_grid ** omega.dim)
    l1_time = phi_time.norm_l1()
    del phi_time

    hankel_spacing = r / config.hankel_samples_per_bump
    part_estimates = []
    for i, c in enumerate(sel.centers):
        region = interaction_region(omega, Ball(c, r), label=f"bump{i}")
        hk = build_hankel(phi_hat, omega, region, spacing=hankel_spacing,
                          row_cap=config.hankel_row_cap)
        part_estimates.append(op_norm(hk))
    sigma = max(e.sigma_max for e in part_estimates)

    ratio = l2sq_hat / (l1_time * sigma)
    bound, best_R = best_analytic_bound(norms, omega.dim, k, config.r_sweep)
    return SweepRow(k, COMPLETED, r=r, l2sq_hat=l2sq_hat, l1_time=l1_time,
                    hankel_norm=sigma, ratio=ratio, analytic_bound=bound,
                    best_R=best_R, certificates_ok=True,
                    certificates={"selection": _selection_dict(sel),
                                  "disjointness": sel.report.to_dict()},
                    part_norms=[e.sigma_max for e in part_estimates])


def _selection_dict(sel):
    d = {"status": sel.status, "r": sel.r, "rho": sel.rho,
         "attempts": sel.attempts, "reason": sel.reason}
    if sel.points is not None:
        d["points"] = [{"point": p.point.tolist(), "exposed": p.exposed}
                       for p in sel.points]
    if sel.centers is not None:
        d["centers"] = np.asarray(sel.centers).tolist()
    if sel.blocking_pair is not None:
        d["blocking_pair"] = list(sel.blocking_pair)
        d["blocking_involves_non_exposed"] = sel.blocking_involves_non_exposed
    return d


def run_ratio_sweep(config):
    """Full k sweep; certificate failures mark a row BLOCKED, never silent."""
    omega = body_from_dict(config.omega) if isinstance(config.omega, dict) \
        else config.omega
    profile = default_profile()
    norms = bump_norms(profile, omega.dim, config.norm_resolutions, config.norm_pad)
    rows = []
    for k in config.k_sweep:
        rows.append(run_ratio_row(omega, k, norms, config, profile))
    rows.sort(key=lambda r: r.k)
    return ExperimentReport(rows, norms, config)


# ---------------------------------------------------------------------------
# report emission


def _atomic_write_text(path, text):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-report-")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def report_csv_text(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in report.rows:
        w.writerow(row.csv_values())
    return buf.getvalue()


def report_json_text(report):
    return json.dumps(_jsonable(report.to_dict()), indent=2, sort_keys=True) + "\n"


def emit_report(report, fmt, path):
    """Write the report atomically in CSV or JSON; returns the path."""
    fmt = fmt.upper()
    if fmt == "CSV":
        _atomic_write_text(path, report_csv_text(report))
    elif fmt == "JSON":
        _atomic_write_text(path, report_json_text(report))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


# ---------------------------------------------------------------------------
# verdict


@dataclass
class Verdict:
    kind: str
    reason: str = ""
    evidence: dict = field(default_factory=dict)

    def __str__(self):
        return self.kind


def nehari_verdict(omega, annotations=None):
    """Classify a domain and map the class to what is known about Nehari.

    Domains with certified-growing exposed-point evidence fail the
    theorem by the bump-sum construction; polytopes and polyhedra are
    open cases; everything else (including any dimension above two) is
    UNKNOWN.
    """
    if isinstance(omega, cmod.HullRaysRep) or omega.dim == 2:
        cls = cmod.classify(omega)
        if cls.kind == cmod.NON_POLYHEDRAL:
            return Verdict(NEHARI_FAILS,
                           reason="exposed-point count grows under refinement",
                           evidence=cls.evidence)
        if cls.kind == cmod.POLYTOPE:
            return Verdict(OPEN_POLYTOPE, reason="bounded polytopes are an open case",
                           evidence={"classification": cls.kind})
        if cls.kind in (cmod.POLYHEDRON, cmod.LINE_STRIP):
            return Verdict(OPEN_POLYHEDRON,
                           reason="unbounded polyhedra are an open case",
                           evidence={"classification": cls.kind})
        return Verdict(UNKNOWN, reason="classification inconclusive",
                       evidence=cls.evidence)
    if omega.dim == 1:
        return Verdict(OPEN_POLYTOPE, reason="intervals are polytopes")
    ev = {"dimension": omega.dim}
    if annotations:
        ev["annotations"] = annotations
    return Verdict(UNKNOWN,
                   reason=f"no planar decision applies in dimension {omega.dim}",
                   evidence=ev)
