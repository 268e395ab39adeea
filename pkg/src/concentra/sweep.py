"""Corpus sweeps over shapes and radii, with empirical constants."""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _backend
from .functionals import GUARD_FACTOR, concentration_deficit, shape_functionals
from .shapes import ShapeSpec, generate

DEFAULT_R_GRID = (0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0)

CSV_COLUMNS = ("shape_id", "h", "r", "r_E", "delta_r", "alpha", "alpha_cx", "alpha_cy",
               "delta_iso", "beta", "beta_star", "ratio_alpha2_over_delta")


@dataclass(frozen=True)
class SweepRow:
    shape_id: str
    kind: str
    h: float
    r_multiple: float
    r: float
    r_E: float
    delta_r: float
    alpha: float
    alpha_cx: float
    alpha_cy: float
    delta_iso: float
    beta: float
    beta_star: float
    tol_disc: float
    eps: float | None = None

    @property
    def guarded(self) -> bool:
        """Whether the deficit is large enough to enter ratio statistics."""
        return self.delta_r > GUARD_FACTOR * self.tol_disc

    @property
    def ratio(self) -> float | None:
        return self.alpha ** 2 / self.delta_r if self.guarded else None

    def csv_fields(self) -> list[str]:
        vals = [self.h, self.r, self.r_E, self.delta_r, self.alpha, self.alpha_cx, self.alpha_cy,
                self.delta_iso, self.beta, self.beta_star]
        ratio = self.ratio
        return [self.shape_id] + [f"{v:.12g}" for v in vals] + ["" if ratio is None else f"{ratio:.12g}"]


def _shape_rows(spec: ShapeSpec, r_grid: tuple[float, ...]) -> list[SweepRow]:
    E = generate(spec)
    sf = shape_functionals(E)
    eps = spec.param("eps") if spec.kind == "ellipse" else None
    rows = []
    for m in r_grid:
        r = m * sf.r_E
        rows.append(SweepRow(
            shape_id=spec.shape_id, kind=spec.kind, h=spec.h, r_multiple=m, r=r, r_E=sf.r_E,
            delta_r=concentration_deficit(E, r), alpha=sf.alpha.alpha,
            alpha_cx=sf.alpha.center[0], alpha_cy=sf.alpha.center[1], delta_iso=sf.delta_iso,
            beta=sf.osc.beta, beta_star=sf.osc.beta_star, tol_disc=sf.tol_disc, eps=eps,
        ))
    return rows


def _sup(values) -> float | None:
    values = [v for v in values if v is not None and math.isfinite(v)]
    return max(values) if values else None


def ellipse_slope(rows: list[SweepRow], r_multiple: float = 1.0) -> float | None:
    """Log-log slope of delta_r against eps over ellipse rows at one r/r_E."""
    pts = sorted((r.eps, r.delta_r) for r in rows
                 if r.kind == "ellipse" and r.r_multiple == r_multiple and r.delta_r > 0)
    if len(pts) < 3:
        return None
    x, y = np.log(np.array(pts)).T
    return float(np.polyfit(x, y, 1)[0])


@dataclass
class SweepResult:
    rows: list[SweepRow]
    empirical_C_main: float | None
    empirical_K_osc: float | None
    ellipse_slope: float | None
    metadata: dict = field(default_factory=dict)

    def csv_text(self) -> str:
        lines = [",".join(CSV_COLUMNS)]
        lines += [",".join(r.csv_fields()) for r in self.rows]
        return "\n".join(lines) + "\n"

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(self.csv_text())

    def summary(self) -> dict:
        return {
            "empirical_C_main": self.empirical_C_main,
            "empirical_K_osc": self.empirical_K_osc,
            "ellipse_slope": self.ellipse_slope,
            "guarded_rows": sum(r.guarded for r in self.rows),
            "rows": len(self.rows),
            "metadata": self.metadata,
        }


def run_sweep(specs: list[ShapeSpec], h: float | None = None,
              r_grid: tuple[float, ...] = DEFAULT_R_GRID, corpus_name: str = "custom",
              workers: int | None = None) -> SweepResult:
    """Evaluate every (shape, r) pair; rows come back ordered by shape, then r."""
    from . import __version__
    from .shapes import corpus_version

    if h is not None:
        specs = [s.with_h(h) for s in specs]
    r_grid = tuple(float(m) for m in r_grid)
    workers = workers or _backend.threads()
    if workers > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_shape_rows, specs, [r_grid] * len(specs)))
    else:
        chunks = [_shape_rows(s, r_grid) for s in specs]
    rows = [row for chunk in chunks for row in chunk]
    guarded = [r for r in rows if r.guarded]
    meta = {
        "corpus": corpus_name,
        "h": h,
        "r_grid": list(r_grid),
        "package_version": __version__,
        "backend": _backend.BACKEND,
    }
    if corpus_name in ("smoke", "full"):
        meta["corpus_version"] = corpus_version(corpus_name)
    return SweepResult(
        rows=rows,
        empirical_C_main=_sup(r.ratio for r in guarded),
        empirical_K_osc=_sup(r.beta_star / r.beta if r.beta > 0 else None for r in guarded),
        ellipse_slope=ellipse_slope(rows),
        metadata=meta,
    )
