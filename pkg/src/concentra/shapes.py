"""Deterministic analytic shapes rasterized onto the grid.

A cell is occupied iff its center lies in the closed analytic region. The
lattice puts cell centers at ``(k + 1/2) h``, so shapes centered at the origin
rasterize symmetrically and grids at ``h`` and ``h / k`` nest exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .grid import GridSet, from_mask
from .errors import BadParameters, FormatError, UnknownCorpus

KINDS = ("disc", "ellipse", "two_discs", "annulus", "perforated_disc", "stadium", "square", "blob")

_DEFAULTS = {
    "disc": {"radius": 1.0},
    "ellipse": {"eps": 0.1, "radius": 1.0},
    "two_discs": {"separation": 4.0, "radius": 1.0},
    "annulus": {"inner": 0.3, "outer": 1.0},
    "perforated_disc": {"radius": 1.0, "holes": 20, "hole_radius": 0.02},
    "stadium": {"length": 2.0, "radius": 0.5},
    "square": {"side": 1.0},
    "blob": {"radius": 1.0, "modes": 6, "amplitude": 0.25},
}


@dataclass(frozen=True)
class ShapeSpec:
    kind: str
    params: dict = field(default_factory=dict)
    h: float = 0.01
    seed: int = 0
    name: str = ""

    @property
    def shape_id(self) -> str:
        if self.name:
            return self.name
        body = "_".join(f"{k}{v:g}" for k, v in sorted(self.params.items()))
        return f"{self.kind}_{body}" if body else self.kind

    def param(self, key: str) -> float:
        return self.params.get(key, _DEFAULTS[self.kind][key])

    def with_h(self, h: float) -> "ShapeSpec":
        return replace(self, h=h)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "params": dict(self.params), "h": self.h}
        if self.kind in ("blob", "perforated_disc"):
            d["seed"] = self.seed
        if self.name:
            d["name"] = self.name
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ShapeSpec":
        try:
            return cls(kind=d["kind"], params=dict(d.get("params", {})), h=float(d.get("h", 0.01)),
                       seed=int(d.get("seed", 0)), name=str(d.get("name", "")))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad ShapeSpec: {exc}") from exc


def _lattice(xmin, xmax, ymin, ymax, h):
    i0 = math.floor(xmin / h - 0.5) - 1
    i1 = math.ceil(xmax / h - 0.5) + 1
    j0 = math.floor(ymin / h - 0.5) - 1
    j1 = math.ceil(ymax / h - 0.5) + 1
    xs = (np.arange(i0, i1 + 1) + 0.5) * h
    ys = (np.arange(j0, j1 + 1) + 0.5) * h
    X, Y = np.meshgrid(xs, ys)
    return X, Y, (xs[0], ys[0])


def hole_centers(radius: float, holes: int, hole_radius: float, seed: int) -> np.ndarray:
    """Hole centers from a randomly shifted Halton sequence, mapped to the disc.

    Holes stay at least three hole radii apart (center to center) and keep a
    gap of one hole radius to the outer circle.
    """

    def halton(n, base):
        f, r = 1.0, 0.0
        while n > 0:
            f /= base
            r += f * (n % base)
            n //= base
        return r

    shift = np.random.default_rng(seed).random(2)
    rmax = radius - 2 * hole_radius
    out = []
    n = 1
    while len(out) < holes:
        if n > 100000:
            raise BadParameters("cannot place that many holes")
        u = (halton(n, 2) + shift[0]) % 1.0
        v = (halton(n, 3) + shift[1]) % 1.0
        n += 1
        p = np.array([rmax * math.sqrt(u) * math.cos(2 * math.pi * v),
                      rmax * math.sqrt(u) * math.sin(2 * math.pi * v)])
        if all(np.hypot(*(p - q)) >= 3 * hole_radius for q in out):
            out.append(p)
    return np.array(out)


def blob_coefficients(modes: int, amplitude: float, seed: int):
    """Fourier modes 2..modes+1 with decaying random weights, sum |a_k| = amplitude."""
    rng = np.random.default_rng(seed)
    k = np.arange(2, modes + 2)
    w = rng.uniform(0.2, 1.0, size=modes) / k
    a = amplitude * w / w.sum()
    phase = rng.uniform(0, 2 * math.pi, size=modes)
    return k, a, phase


def _check(spec: ShapeSpec) -> None:
    if spec.kind not in KINDS:
        raise BadParameters(f"unknown shape kind {spec.kind!r}")
    unknown = set(spec.params) - set(_DEFAULTS[spec.kind])
    if unknown:
        raise BadParameters(f"unknown parameters for {spec.kind}: {sorted(unknown)}")
    if not spec.h > 0:
        raise BadParameters("h must be positive")
    p = spec.param
    bad = {
        "disc": lambda: p("radius") <= 0,
        "ellipse": lambda: p("radius") <= 0 or not -0.5 < p("eps") < 1.0,
        "two_discs": lambda: p("radius") <= 0 or p("separation") < 0,
        "annulus": lambda: not 0 < p("inner") < p("outer"),
        "perforated_disc": lambda: (p("radius") <= 0 or p("hole_radius") <= 0 or p("holes") < 0
                                    or 4 * p("hole_radius") >= p("radius") or int(p("holes")) != p("holes")),
        "stadium": lambda: p("radius") <= 0 or p("length") < 0,
        "square": lambda: p("side") <= 0,
        "blob": lambda: (p("radius") <= 0 or not 1 <= p("modes") <= 8 or not 0 <= p("amplitude") <= 0.3
                         or int(p("modes")) != p("modes")),
    }[spec.kind]
    if bad():
        raise BadParameters(f"parameters out of range for {spec.kind}: {spec.params}")


def generate(spec: ShapeSpec) -> GridSet:
    _check(spec)
    p = spec.param
    h = spec.h
    kind = spec.kind
    if kind == "disc":
        R = p("radius")
        X, Y, o = _lattice(-R, R, -R, R, h)
        mask = X * X + Y * Y <= R * R
    elif kind == "ellipse":
        a = p("radius") * (1 + p("eps"))
        b = p("radius") / (1 + p("eps"))
        X, Y, o = _lattice(-a, a, -b, b, h)
        mask = (X / a) ** 2 + (Y / b) ** 2 <= 1.0
    elif kind == "two_discs":
        R, d = p("radius"), p("separation")
        X, Y, o = _lattice(-R, d + R, -R, R, h)
        mask = (X * X + Y * Y <= R * R) | ((X - d) ** 2 + Y * Y <= R * R)
    elif kind == "annulus":
        ri, ro = p("inner"), p("outer")
        X, Y, o = _lattice(-ro, ro, -ro, ro, h)
        rr = X * X + Y * Y
        mask = (rr <= ro * ro) & (rr >= ri * ri)
    elif kind == "perforated_disc":
        R, rho = p("radius"), p("hole_radius")
        X, Y, o = _lattice(-R, R, -R, R, h)
        mask = X * X + Y * Y <= R * R
        for cx, cy in hole_centers(R, int(p("holes")), rho, spec.seed):
            # holes are open, so their rim stays in the closed region
            mask &= (X - cx) ** 2 + (Y - cy) ** 2 >= rho * rho
    elif kind == "stadium":
        L, R = p("length"), p("radius")
        X, Y, o = _lattice(-L / 2 - R, L / 2 + R, -R, R, h)
        dx = np.maximum(np.abs(X) - L / 2, 0.0)
        mask = dx * dx + Y * Y <= R * R
    elif kind == "square":
        s = p("side") / 2
        X, Y, o = _lattice(-s, s, -s, s, h)
        mask = (np.abs(X) <= s) & (np.abs(Y) <= s)
    else:  # blob
        R = p("radius")
        k, a, phase = blob_coefficients(int(p("modes")), p("amplitude"), spec.seed)
        rmax = R * (1 + a.sum())
        X, Y, o = _lattice(-rmax, rmax, -rmax, rmax, h)
        theta = np.arctan2(Y, X)
        rho = R * (1 + np.tensordot(a, np.cos(np.multiply.outer(k, theta) + phase[:, None, None]), axes=1))
        mask = X * X + Y * Y <= rho * rho
    return from_mask(mask, h, o)


def load_corpus_file(path: str | Path) -> list[ShapeSpec]:
    data = json.loads(Path(path).read_text())
    return [ShapeSpec.from_dict(d) for d in data["specs"]]


def corpus(name: str) -> list[ShapeSpec]:
    """Published shape lists: ``smoke`` (6 specs) or ``full`` (25 specs)."""
    if name not in ("smoke", "full"):
        raise UnknownCorpus(f"unknown corpus {name!r}; expected 'smoke' or 'full'")
    text = resources.files("concentra").joinpath(f"corpora/{name}.json").read_text()
    return [ShapeSpec.from_dict(d) for d in json.loads(text)["specs"]]


def corpus_version(name: str) -> int:
    if name not in ("smoke", "full"):
        raise UnknownCorpus(f"unknown corpus {name!r}")
    text = resources.files("concentra").joinpath(f"corpora/{name}.json").read_text()
    return int(json.loads(text)["version"])
