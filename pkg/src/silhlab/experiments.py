"""Scaling sweeps over mesh families, power-law fits and the explicit O(sqrt n) bound."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import InvalidSpec, MissingSilhouetteLength, NonPositiveExpectation, NumericalError
from .expectation import exact_expected_silhouette, mc_count_and_length
from .generators import FamilySpec, generate
from .hypotheses import HypothesisReport, measure_hypotheses

# constants of the explicit bound E <= (BETA_COEF * beta + ALPHA_COEF / alpha * silh) * sqrt(n)
BETA_COEF = 15.0
ALPHA_COEF = 24.0

CSV_HEADER = ("n", "exact", "mc_mean", "mc_se", "mean_len", "alpha", "beta", "gamma", "fatness")


@dataclass(frozen=True)
class SweepConfig:
    mc_samples: int = 10000
    seed: int = 0
    grid_depth: int = 4
    threads: int | None = None


@dataclass(frozen=True)
class SweepRecord:
    n: int
    exact_expected: float
    mc_mean: float = math.nan
    mc_std_error: float = math.nan
    mean_silhouette_length: float = math.nan
    hypothesis: HypothesisReport | None = None
    family: str = ""

    def row(self) -> dict:
        h = self.hypothesis
        nan = math.nan
        return {
            "n": self.n,
            "exact": self.exact_expected,
            "mc_mean": self.mc_mean,
            "mc_se": self.mc_std_error,
            "mean_len": self.mean_silhouette_length,
            "alpha": h.alpha_n if h else nan,
            "beta": h.beta_n if h else nan,
            "gamma": h.gamma_n if h else nan,
            "fatness": h.fatness_n if h else nan,
        }


class ExponentFit(NamedTuple):
    coefficient: float
    exponent: float
    r_squared: float
    records_used: int


class BoundCheck(NamedTuple):
    holds: bool
    lhs: float
    rhs: float


def run_sweep(specs: Sequence[FamilySpec] | Callable[[int], FamilySpec],
              sizes: Sequence[int] | None = None,
              config: SweepConfig = SweepConfig()) -> list[SweepRecord]:
    """One record per family member, in the given order.

    ``specs`` is either a list of family specs, or a callable mapping each entry
    of ``sizes`` to a spec. Member ``i`` uses MC seed ``config.seed ^ i``. With
    ``mc_samples == 0`` the Monte-Carlo columns are left as NaN.
    """
    if callable(specs):
        if sizes is None:
            raise InvalidSpec("sizes required with a family callable")
        if len(sizes) < 3 or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise InvalidSpec("a sweep needs at least 3 strictly increasing sizes")
        specs = [specs(s) for s in sizes]
    specs = list(specs)
    if len(specs) < 3:
        raise InvalidSpec("a sweep needs at least 3 members")
    records = []
    for i, spec in enumerate(specs):
        mesh, surface = generate(spec)
        adj = mesh.adjacency
        exact = exact_expected_silhouette(mesh, adj)
        mc_mean = mc_se = mean_len = math.nan
        if config.mc_samples:
            (mc_mean, mc_se), (mean_len, _) = mc_count_and_length(
                mesh, adj, config.mc_samples, config.seed ^ i, config.threads)
        hyp = measure_hypotheses(mesh, surface, config.grid_depth) if config.grid_depth else None
        records.append(SweepRecord(mesh.n_faces, exact, mc_mean, mc_se, mean_len, hyp, str(spec)))
    return records


def fit_power_law(ns, values) -> ExponentFit:
    """Least squares on (log n, log value); returns value ~ c * n**p."""
    ns = np.asarray(ns, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(ns) < 3:
        raise InvalidSpec("need at least 3 points to fit")
    if np.any(values <= 0) or np.any(ns <= 0):
        raise NonPositiveExpectation("power-law fit needs positive values")
    if not (np.all(np.isfinite(values)) and np.all(np.isfinite(ns))):
        raise NumericalError("power-law fit needs finite values")
    x, y = np.log(ns), np.log(values)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return ExponentFit(math.exp(intercept), float(slope), min(1.0, max(0.0, r2)), len(ns))


def fit_exponent(records: Sequence[SweepRecord]) -> ExponentFit:
    return fit_power_law([r.n for r in records], [r.exact_expected for r in records])


def theorem_bound(alpha: float, beta: float, silh: float, n: int) -> float:
    return (BETA_COEF * beta + ALPHA_COEF / alpha * silh) * math.sqrt(n)


def check_theorem_bound(record: SweepRecord, silh_S: float | None) -> BoundCheck:
    """Compare the exact expectation with the bound at the member's own witnesses.

    A false result with artificially inflated alpha is a misuse diagnostic, not
    a counterexample: the bound only applies with constants the family obeys.
    """
    if silh_S is None:
        raise MissingSilhouetteLength("average silhouette length of the surface is unknown")
    if record.hypothesis is None:
        raise MissingSilhouetteLength("record carries no hypothesis measurements")
    h = record.hypothesis
    rhs = theorem_bound(h.alpha_n, h.beta_n, silh_S, record.n)
    return BoundCheck(record.exact_expected <= rhs, record.exact_expected, rhs)


def _num(x) -> str:
    x = float(x)
    return "nan" if math.isnan(x) else format(x, ".17g")


def emit_csv(records: Sequence[SweepRecord]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        row = r.row()
        w.writerow([row["n"]] + [_num(row[k]) for k in CSV_HEADER[1:]])
    return buf.getvalue().encode()


def _json_value(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def emit_json(records: Sequence[SweepRecord]) -> bytes:
    out = []
    for r in records:
        item = {k: _json_value(v) for k, v in r.row().items()}
        item["family"] = r.family
        if r.hypothesis is not None:
            item["hypothesis"] = {k: _json_value(v) for k, v in r.hypothesis.to_dict().items()}
        out.append(item)
    return (json.dumps(out, indent=2) + "\n").encode()


def _float_or_nan(v):
    return math.nan if v in (None, "", "nan") else float(v)


def load_records(data: bytes, fmt: str = "csv") -> list[SweepRecord]:
    """Read records back from ``emit_csv``/``emit_json`` output (fields used by fits)."""
    rows = []
    if fmt == "json":
        rows = json.loads(data)
    else:
        rows = list(csv.DictReader(io.StringIO(data.decode())))
    out = []
    for row in rows:
        hyp = None
        alpha = _float_or_nan(row.get("alpha"))
        if not math.isnan(alpha):
            hyp = HypothesisReport(
                n=int(row["n"]), alpha_n=alpha, beta_n=_float_or_nan(row.get("beta")),
                gamma_n=_float_or_nan(row.get("gamma")),
                fatness_n=_float_or_nan(row.get("fatness")), grid_depth=0,
                max_distance=math.nan, min_h_sqrt_n=math.nan)
        out.append(SweepRecord(int(row["n"]), _float_or_nan(row["exact"]),
                               _float_or_nan(row.get("mc_mean")), _float_or_nan(row.get("mc_se")),
                               _float_or_nan(row.get("mean_len")), hyp, row.get("family", "")))
    return out


def write_atomic(path, data: bytes) -> None:
    """Write via a temporary file in the same directory, then rename over ``path``."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
